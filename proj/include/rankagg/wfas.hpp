#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "rankagg/errors.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

// Weighted feedback arc set instance: w_{uv} is the penalty paid when v is
// ranked before u. Negative weights are permitted at this level.
class WfasInstance {
 public:
  explicit WfasInstance(int m) : m_(m), w_(static_cast<std::size_t>(m) * m, 0.0) {
    if (m < 1) throw invalid_input_error("instance needs m >= 1");
  }

  static WfasInstance from_pairwise(const PairwiseMatrix& w) {
    WfasInstance inst(w.m());
    for (int u = 1; u <= w.m(); ++u)
      for (int v = 1; v <= w.m(); ++v)
        if (u != v) inst.at(u, v) = w.at(u, v);
    return inst;
  }

  int m() const { return m_; }
  double at(int u, int v) const { return w_[idx(u, v)]; }
  double& at(int u, int v) { return w_[idx(u, v)]; }

  void check_finite() const {
    for (double v : w_)
      if (!std::isfinite(v)) throw invalid_input_error("weights must be finite");
  }

 private:
  std::size_t idx(int u, int v) const {
    if (u < 1 || u > m_ || v < 1 || v > m_) throw invalid_input_error("candidate out of range");
    return static_cast<std::size_t>(u - 1) * m_ + (v - 1);
  }
  int m_;
  std::vector<double> w_;
};

// Total weight of backward pairs: sum of w_{vu} over pairs ranked u before v.
inline double wfas_cost(const WfasInstance& inst, const Ranking& pi) {
  if (pi.m() != inst.m()) throw invalid_input_error("ranking and instance must share m");
  inst.check_finite();
  const std::vector<int> order = pi.order();
  double total = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      total += inst.at(order[j], order[i]);
  return total;
}

// Bounded means every off-diagonal weight is nonnegative and every
// unordered pair's weight sum lies in [1/2, 2] (closed, tolerance 1e-12).
inline bool is_bounded(const WfasInstance& inst) {
  constexpr double kTol = 1e-12;
  for (int u = 1; u <= inst.m(); ++u)
    for (int v = u + 1; v <= inst.m(); ++v) {
      const double a = inst.at(u, v);
      const double b = inst.at(v, u);
      if (!std::isfinite(a) || !std::isfinite(b)) return false;
      if (a < -kTol || b < -kTol) return false;
      const double s = a + b;
      if (s < 0.5 - kTol || s > 2.0 + kTol) return false;
    }
  return true;
}

struct SolverOptions {
  double xi = 0.1;          // accuracy knob; the exact branch is always optimal
  int exact_threshold = 9;  // switch to the heuristic above this m
  int restarts = 32;        // pivot-ordering restarts
  std::uint64_t seed = 0;   // seeds the pivot choices
};

namespace detail {

constexpr int kExactSolverCap = 20;
constexpr double kSwapTol = 1e-12;

// Exact minimum by subset DP: dp[S] is the cheapest cost already incurred
// by a prefix occupying positions 1..|S|, where appending c after prefix S
// pays the backward weight against everything still unplaced.
inline Ranking solve_exact_subset_dp(const WfasInstance& inst) {
  const int m = inst.m();
  if (m > kExactSolverCap)
    throw unsupported_size_error("exact subset DP supports m <= " +
                                 std::to_string(kExactSolverCap));
  const std::size_t full = (std::size_t{1} << m) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full + 1, inf);
  std::vector<int> choice(full + 1, -1);
  dp[0] = 0.0;
  for (std::size_t s = 0; s <= full; ++s) {
    if (dp[s] == inf) continue;
    for (int c = 0; c < m; ++c) {
      if (s & (std::size_t{1} << c)) continue;
      double append = 0;
      for (int v = 0; v < m; ++v) {
        if (v == c || (s & (std::size_t{1} << v))) continue;
        append += inst.at(v + 1, c + 1);
      }
      const std::size_t t = s | (std::size_t{1} << c);
      if (dp[s] + append < dp[t]) {
        dp[t] = dp[s] + append;
        choice[t] = c;
      }
    }
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::size_t s = full;
  for (int pos = m; pos >= 1; --pos) {
    const int c = choice[s];
    order[static_cast<std::size_t>(pos - 1)] = c + 1;
    s &= ~(std::size_t{1} << c);
  }
  return Ranking::from_order(order);
}

// Quicksort-style ordering with random pivots: u precedes the pivot p when
// ranking u first is the cheaper of the two orders (ties go to smaller id).
inline void pivot_order(const WfasInstance& inst, std::vector<int>& items, Rng& rng,
                        std::vector<int>& out) {
  if (items.empty()) return;
  const std::size_t pick = rng.uniform_int(0, static_cast<std::uint64_t>(items.size()) - 1);
  const int p = items[pick];
  std::vector<int> left, right;
  for (const int u : items) {
    if (u == p) continue;
    const double before = inst.at(p, u);  // cost of u ahead of p
    const double after = inst.at(u, p);   // cost of p ahead of u
    const bool u_first = before < after || (before == after && u < p);
    (u_first ? left : right).push_back(u);
  }
  pivot_order(inst, left, rng, out);
  out.push_back(p);
  pivot_order(inst, right, rng, out);
}

}  // namespace detail

// Sweep adjacent transpositions until none lowers the cost by more than
// 1e-12; the result is stable under single adjacent swaps.
inline Ranking local_search_adjacent(const WfasInstance& inst, const Ranking& start) {
  if (start.m() != inst.m()) throw invalid_input_error("ranking and instance must share m");
  std::vector<int> order = start.order();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const int u = order[i];
      const int v = order[i + 1];
      const double delta = inst.at(u, v) - inst.at(v, u);  // swapped minus current
      if (delta < -detail::kSwapTol) {
        std::swap(order[i], order[i + 1]);
        improved = true;
      }
    }
  }
  return Ranking::from_order(order);
}

// Minimum-cost ranking of a bounded instance. Exact by subset DP up to
// exact_threshold; above it, the best locally-searched candidate among a
// row-sum score ordering and seeded random-pivot orderings.
inline Ranking solve_bounded(const WfasInstance& inst, const SolverOptions& opts = {}) {
  inst.check_finite();
  if (!is_bounded(inst)) throw contract_violation_error("instance is not bounded");
  const int m = inst.m();
  if (m <= opts.exact_threshold) return detail::solve_exact_subset_dp(inst);

  std::vector<Ranking> candidates;
  // score ordering: high total outgoing weight first
  std::vector<int> by_score(static_cast<std::size_t>(m));
  std::iota(by_score.begin(), by_score.end(), 1);
  std::vector<double> score(static_cast<std::size_t>(m) + 1, 0.0);
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v)
      if (v != u) score[static_cast<std::size_t>(u)] += inst.at(u, v);
  std::stable_sort(by_score.begin(), by_score.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  candidates.push_back(Ranking::from_order(by_score));

  Rng rng(opts.seed);
  std::vector<int> items(static_cast<std::size_t>(m));
  for (int r = 0; r < opts.restarts; ++r) {
    Rng restart_rng = rng.child(static_cast<std::uint64_t>(r));
    std::iota(items.begin(), items.end(), 1);
    std::vector<int> out;
    out.reserve(items.size());
    detail::pivot_order(inst, items, restart_rng, out);
    candidates.push_back(Ranking::from_order(out));
  }

  Ranking best = local_search_adjacent(inst, candidates.front());
  double best_cost = wfas_cost(inst, best);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    Ranking refined = local_search_adjacent(inst, candidates[i]);
    const double cost = wfas_cost(inst, refined);
    if (cost < best_cost) {
      best = std::move(refined);
      best_cost = cost;
    }
  }
  return best;
}

}  // namespace rankagg
