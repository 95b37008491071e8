#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rankagg/errors.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

// Dense m x m matrix of pairwise comparison weights, 1-indexed accessors.
// Diagonal entries are unused and held at zero.
class PairwiseMatrix {
 public:
  explicit PairwiseMatrix(int m) : m_(m), w_(static_cast<std::size_t>(m) * m, 0.0) {
    if (m < 1) throw invalid_input_error("pairwise matrix needs m >= 1");
  }

  int m() const { return m_; }
  double at(int u, int v) const { return w_[idx(u, v)]; }
  double& at(int u, int v) { return w_[idx(u, v)]; }

 private:
  std::size_t idx(int u, int v) const {
    return static_cast<std::size_t>(u - 1) * m_ + (v - 1);
  }
  int m_;
  std::vector<double> w_;
};

// w_uv = fraction of rankings placing u before v.
inline PairwiseMatrix pairwise_matrix(const RankingDataset& data) {
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  const int m = data.m();
  PairwiseMatrix w(m);
  for (const Ranking& r : data)
    for (int u = 1; u <= m; ++u)
      for (int v = u + 1; v <= m; ++v) {
        if (r.position(u) < r.position(v))
          w.at(u, v) += 1.0;
        else
          w.at(v, u) += 1.0;
      }
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v)
      if (u != v) w.at(u, v) *= inv_n;
  return w;
}

// Average Kemeny cost of sigma against the profile behind w: the sum of
// w_vu over candidate pairs that sigma orders u before v.
inline double kemeny_cost_from_pairwise(const Ranking& sigma, const PairwiseMatrix& w) {
  if (sigma.m() != w.m()) throw invalid_input_error("ranking and matrix must share m");
  double cost = 0;
  const int m = w.m();
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v)
      if (u != v && sigma.position(u) < sigma.position(v)) cost += w.at(v, u);
  return cost;
}

// Nearest point (l1, then midpoint among ties) to (x, y) on the segment
// {(a, 1-a) : a in [0,1]}. Returns the first coordinate a.
inline double clip_pair(double x, double y) {
  // l1 distance |a-x| + |(1-a)-y| is minimized on the interval between
  // x and 1-y, intersected with [0,1]; ties across the interval resolve
  // to its midpoint.
  const double z = 1.0 - y;
  const double lo = std::min(x, z);
  const double hi = std::max(x, z);
  const double flo = std::max(lo, 0.0);
  const double fhi = std::min(hi, 1.0);
  if (flo <= fhi) return 0.5 * (flo + fhi);
  return hi < 0.0 ? 0.0 : 1.0;
}

// Projects every off-diagonal pair (w_uv, w_vu) onto w_uv + w_vu = 1 with
// entries in [0,1].
inline PairwiseMatrix clip_to_feasible(const PairwiseMatrix& w) {
  const int m = w.m();
  PairwiseMatrix out(m);
  for (int u = 1; u <= m; ++u)
    for (int v = u + 1; v <= m; ++v) {
      const double a = clip_pair(w.at(u, v), w.at(v, u));
      out.at(u, v) = a;
      out.at(v, u) = 1.0 - a;
    }
  return out;
}

}  // namespace rankagg
