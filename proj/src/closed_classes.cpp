// Closed communicating classes of the finite chain and their invariant measures.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "popdyn/discrete.hpp"
#include "popdyn/error.hpp"

namespace popdyn {

namespace {

// Mixed-radix codec: state index = sum counts[p] * stride[p].
class StateIndex {
 public:
  explicit StateIndex(const ChainKernel& kernel) : kernel_(kernel), strides_(kernel.dim()) {
    std::int64_t s = 1;
    for (std::size_t p = 0; p < kernel.dim(); ++p) {
      strides_[p] = s;
      s *= kernel.size(p) + 1;
    }
    count_ = s;
  }

  std::int64_t count() const { return count_; }
  std::int64_t stride(std::size_t p) const { return strides_[p]; }

  void decode(std::int64_t index, std::vector<std::int64_t>& counts) const {
    counts.resize(strides_.size());
    for (std::size_t p = 0; p < strides_.size(); ++p) {
      const std::int64_t radix = kernel_.size(p) + 1;
      counts[p] = index % radix;
      index /= radix;
    }
  }

 private:
  const ChainKernel& kernel_;
  std::vector<std::int64_t> strides_;
  std::int64_t count_ = 1;
};

struct Edge {
  std::int64_t target;
  std::int64_t weight;  // numerator over 2N
};

// Outgoing non-loop edges of a state.
void out_edges(const ChainKernel& kernel, const StateIndex& index, std::int64_t v,
               std::vector<std::int64_t>& counts, std::vector<Edge>& edges) {
  edges.clear();
  index.decode(v, counts);
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  for (std::size_t p = 0; p < kernel.dim(); ++p) {
    const auto m = kernel.moves(counts, p, total);
    if (m.up2 > 0) edges.push_back({v + index.stride(p), m.up2});
    if (m.down2 > 0) edges.push_back({v - index.stride(p), m.down2});
  }
}

// Iterative Tarjan; returns the component id of every vertex.
std::vector<std::int32_t> strongly_connected(const ChainKernel& kernel, const StateIndex& index,
                                             std::int32_t& component_count) {
  const std::int64_t n = index.count();
  constexpr std::int32_t unvisited = -1;
  std::vector<std::int32_t> order(static_cast<std::size_t>(n), unvisited);
  std::vector<std::int32_t> low(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> comp(static_cast<std::size_t>(n), unvisited);
  std::vector<std::int64_t> stack;
  struct Frame {
    std::int64_t v;
    std::vector<Edge> edges;
    std::size_t next = 0;
  };
  std::vector<Frame> call;
  std::vector<std::int64_t> counts;
  std::int32_t clock = 0;
  component_count = 0;

  for (std::int64_t root = 0; root < n; ++root) {
    if (order[root] != unvisited) continue;
    auto enter = [&](std::int64_t v) {
      order[v] = low[v] = clock++;
      stack.push_back(v);
      Frame f{v, {}, 0};
      out_edges(kernel, index, v, counts, f.edges);
      call.push_back(std::move(f));
    };
    enter(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < f.edges.size()) {
        const std::int64_t w = f.edges[f.next++].target;
        if (order[w] == unvisited) {
          enter(w);
        } else if (comp[w] == unvisited) {
          low[f.v] = std::min(low[f.v], order[w]);
        }
        continue;
      }
      const std::int64_t v = f.v;
      if (low[v] == order[v]) {
        std::int64_t w;
        do {
          w = stack.back();
          stack.pop_back();
          comp[w] = component_count;
        } while (w != v);
        ++component_count;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::int64_t parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

// Rows of the class-restricted kernel as (local target, numerator over 2N).
struct LocalChain {
  std::int64_t denom = 0;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> rows;
};

std::vector<Rational> solve_exact(const LocalChain& chain) {
  const std::size_t m = chain.rows.size();
  // Unknown mu solves mu (P - I) = 0 with sum mu = 1; work with the
  // transposed system A mu^T = b, replacing the last equation by normalisation.
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
  // Rows omit the self-loop, so the diagonal carries only the leaving weight.
  for (std::size_t from = 0; from < m; ++from) {
    for (const auto& [to, w] : chain.rows[from]) {
      a[to][from] += Rational(w);
      a[from][from] -= Rational(w);
    }
  }
  for (std::size_t c = 0; c < m; ++c) a[m - 1][c] = Rational(1);
  a[m - 1][m] = Rational(1);
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    while (piv < m && a[piv][col].sign() == 0) ++piv;
    if (piv == m) throw Error(ErrorCode::MalformedSet, "singular invariant-measure system");
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col].sign() == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<Rational> mu(m);
  for (std::size_t r = 0; r < m; ++r) mu[r] = a[r][m] / a[r][r];
  return mu;
}

std::vector<double> solve_dense(const LocalChain& chain) {
  const std::size_t m = chain.rows.size();
  const double denom = static_cast<double>(chain.denom);
  std::vector<double> a(m * (m + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (m + 1) + c]; };
  for (std::size_t from = 0; from < m; ++from) {
    for (const auto& [to, w] : chain.rows[from]) {
      at(to, from) += static_cast<double>(w) / denom;
      at(from, from) -= static_cast<double>(w) / denom;
    }
  }
  for (std::size_t c = 0; c < m; ++c) at(m - 1, c) = 1.0;
  at(m - 1, m) = 1.0;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
    }
    if (piv != col) {
      for (std::size_t c = 0; c <= m; ++c) std::swap(at(piv, c), at(col, c));
    }
    const double d = at(col, col);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = at(r, col) / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= m; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<double> mu(m);
  for (std::size_t r = m; r-- > 0;) {
    double s = at(r, m);
    for (std::size_t c = r + 1; c < m; ++c) s -= at(r, c) * mu[c];
    mu[r] = s / at(r, r);
  }
  return mu;
}

// Power iteration on the lazy chain (I + P)/2, which has the same invariant
// measure and is aperiodic.
std::vector<double> solve_power(const LocalChain& chain, double tol, std::int64_t max_iter) {
  const std::size_t m = chain.rows.size();
  const double denom = static_cast<double>(chain.denom);
  std::vector<double> mu(m, 1.0 / static_cast<double>(m));
  std::vector<double> next(m);
  for (std::int64_t it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t from = 0; from < m; ++from) {
      double leave = 0.0;
      for (const auto& [to, w] : chain.rows[from]) {
        const double pr = static_cast<double>(w) / denom;
        next[to] += 0.5 * mu[from] * pr;
        leave += pr;
      }
      next[from] += mu[from] * (1.0 - 0.5 * leave);
    }
    double change = 0.0;
    for (std::size_t k = 0; k < m; ++k) change += std::abs(next[k] - mu[k]);
    mu.swap(next);
    if (change < tol) break;
  }
  const double s = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (auto& v : mu) v /= s;
  return mu;
}

}  // namespace

std::vector<ClosedClass> closed_classes(const ChainKernel& kernel, const ClosedClassOptions& options) {
  const std::int64_t states = kernel.state_count();
  if (states > options.state_cap) {
    throw Error(ErrorCode::StateSpaceTooLarge, std::to_string(states) + " states exceed the cap of " +
                                                   std::to_string(options.state_cap));
  }
  const StateIndex index(kernel);
  std::int32_t ncomp = 0;
  const auto comp = strongly_connected(kernel, index, ncomp);

  std::vector<char> closed(static_cast<std::size_t>(ncomp), 1);
  std::vector<std::int64_t> counts;
  std::vector<Edge> edges;
  for (std::int64_t v = 0; v < index.count(); ++v) {
    if (!closed[comp[v]]) continue;
    out_edges(kernel, index, v, counts, edges);
    for (const auto& e : edges) {
      if (comp[e.target] != comp[v]) {
        closed[comp[v]] = 0;
        break;
      }
    }
  }

  // Members of each closed component, ascending by index.
  std::vector<std::int32_t> slot(static_cast<std::size_t>(ncomp), -1);
  std::vector<std::vector<std::int64_t>> members;
  for (std::int64_t v = 0; v < index.count(); ++v) {
    const auto c = comp[v];
    if (!closed[c]) continue;
    if (slot[c] < 0) {
      slot[c] = static_cast<std::int32_t>(members.size());
      members.emplace_back();
    }
    members[slot[c]].push_back(v);
  }

  std::vector<ClosedClass> out;
  out.reserve(members.size());
  for (const auto& group : members) {
    ClosedClass cls;
    LocalChain chain;
    chain.denom = 2 * kernel.n();
    chain.rows.resize(group.size());
    for (std::size_t k = 0; k < group.size(); ++k) {
      out_edges(kernel, index, group[k], counts, edges);
      cls.states.push_back(DiscreteState{kernel.n(), counts});
      for (const auto& e : edges) {
        const auto pos = std::lower_bound(group.begin(), group.end(), e.target) - group.begin();
        chain.rows[k].emplace_back(static_cast<std::size_t>(pos), e.weight);
      }
    }
    cls.is_singleton = group.size() == 1;
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& s : cls.states) {
      lo = std::min(lo, s.total());
      hi = std::max(hi, s.total());
    }
    cls.abstract_lo = Rational(lo, kernel.n());
    cls.abstract_hi = Rational(hi, kernel.n());

    if (group.size() <= options.exact_limit) {
      auto exact = cls.is_singleton ? std::vector<Rational>{Rational(1)} : solve_exact(chain);
      for (const auto& r : exact) cls.measure.push_back(r.to_double());
      cls.exact_measure = std::move(exact);
    } else if (group.size() <= options.dense_limit) {
      cls.measure = solve_dense(chain);
    } else {
      cls.measure = solve_power(chain, options.power_tol, options.power_max_iter);
    }
    out.push_back(std::move(cls));
  }
  return out;
}

}  // namespace popdyn
