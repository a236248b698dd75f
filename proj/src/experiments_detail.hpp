// Per-cell kernels shared by the serial and parallel drivers.
#pragma once

#include <cstdint>
#include <vector>

#include "popdyn/discrete.hpp"
#include "popdyn/experiments.hpp"

namespace popdyn::detail {

struct SweepCell {
  std::int64_t n;
  int replicate;
};

std::vector<SweepCell> sweep_cells(const PopulationProfile& profile, const SweepConfig& config);
SweepRow run_sweep_cell(const ChainKernel& kernel, const SweepConfig& config, int replicate);

/// Tallies of one state's component checks.
struct DriftTally {
  std::int64_t singleton_matched = 0;
  std::int64_t band_contained = 0;
  std::int64_t formula_checked = 0;
};

/// Mixed-radix decoding of a state index.
DiscreteState decode_state(const ChainKernel& kernel, std::int64_t index);
void check_drift_state(const ChainKernel& kernel, const DiscreteState& state, DriftTally& tally,
                       std::vector<DriftViolation>& violations);
void require_state_cap(const ChainKernel& kernel, std::int64_t cap);

}  // namespace popdyn::detail
