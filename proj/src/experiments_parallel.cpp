// OpenMP drivers for the sweep and the drift check. Each cell or state is
// independent; results are gathered by index so the output matches the
// serial reference exactly.
#include <algorithm>
#include <exception>
#include <map>
#include <optional>

#include <omp.h>

#include "experiments_detail.hpp"
#include "popdyn/experiments.hpp"

namespace popdyn {

std::vector<SweepRow> fluctuation_sweep(const PopulationProfile& profile, const SweepConfig& config) {
  const auto cells = detail::sweep_cells(profile, config);
  std::map<std::int64_t, ChainKernel> kernels;
  for (const auto n : config.sizes) kernels.try_emplace(n, profile, n, config.tie);

  std::vector<SweepRow> rows(cells.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      const auto& cell = cells[static_cast<std::size_t>(k)];
      rows[static_cast<std::size_t>(k)] = detail::run_sweep_cell(kernels.at(cell.n), config, cell.replicate);
    } catch (...) {
#pragma omp critical(popdyn_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  });
  return rows;
}

DriftReport drift_consistency_check(const PopulationProfile& profile, std::int64_t n, TieRule tie,
                                    std::int64_t state_cap) {
  const ChainKernel kernel(profile, n, tie);
  detail::require_state_cap(kernel, state_cap);
  DriftReport report;
  report.n = n;
  report.tie = tie;
  report.states = kernel.state_count();

  const int threads = omp_get_max_threads();
  std::vector<detail::DriftTally> tallies(static_cast<std::size_t>(threads));
  std::vector<std::vector<std::pair<std::int64_t, DriftViolation>>> found(static_cast<std::size_t>(threads));
  std::exception_ptr failure;
  const std::int64_t states = report.states;
#pragma omp parallel num_threads(threads)
  {
    const auto me = static_cast<std::size_t>(omp_get_thread_num());
    std::vector<DriftViolation> local;
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < states; ++k) {
      try {
        local.clear();
        detail::check_drift_state(kernel, detail::decode_state(kernel, k), tallies[me], local);
        for (auto& v : local) found[me].emplace_back(k, std::move(v));
      } catch (...) {
#pragma omp critical(popdyn_drift_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::pair<std::int64_t, DriftViolation>> merged;
  for (std::size_t t = 0; t < tallies.size(); ++t) {
    report.singleton_matched += tallies[t].singleton_matched;
    report.band_contained += tallies[t].band_contained;
    report.formula_checked += tallies[t].formula_checked;
    for (auto& v : found[t]) merged.push_back(std::move(v));
  }
  std::stable_sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [index, v] : merged) report.violations.push_back(std::move(v));
  return report;
}

}  // namespace popdyn
