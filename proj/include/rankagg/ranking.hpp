#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rankagg/errors.hpp"

namespace rankagg {

// A full ranking of m candidates. Candidates and positions are both
// 1-indexed: position(c) is the rank of candidate c, with 1 = best.
class Ranking {
 public:
  // positions[c-1] = position of candidate c; must be a permutation of 1..m.
  explicit Ranking(std::vector<int> positions) : pos_(std::move(positions)) {
    const int m = static_cast<int>(pos_.size());
    if (m == 0) throw invalid_input_error("ranking must have at least one candidate");
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (int p : pos_) {
      if (p < 1 || p > m || seen[static_cast<std::size_t>(p - 1)])
        throw invalid_input_error("ranking is not a permutation of 1..m");
      seen[static_cast<std::size_t>(p - 1)] = 1;
    }
  }

  static Ranking identity(int m) {
    std::vector<int> pos(static_cast<std::size_t>(m));
    std::iota(pos.begin(), pos.end(), 1);
    return Ranking(std::move(pos));
  }

  static Ranking reversed(int m) {
    std::vector<int> pos(static_cast<std::size_t>(m));
    for (int c = 1; c <= m; ++c) pos[static_cast<std::size_t>(c - 1)] = m - c + 1;
    return Ranking(std::move(pos));
  }

  // order[p-1] = candidate placed at position p.
  static Ranking from_order(const std::vector<int>& order) {
    const int m = static_cast<int>(order.size());
    std::vector<int> pos(order.size(), 0);
    for (int p = 1; p <= m; ++p) {
      const int c = order[static_cast<std::size_t>(p - 1)];
      if (c < 1 || c > m) throw invalid_input_error("order is not a permutation of 1..m");
      pos[static_cast<std::size_t>(c - 1)] = p;
    }
    return Ranking(std::move(pos));
  }

  int m() const { return static_cast<int>(pos_.size()); }

  int position(int candidate) const { return pos_[static_cast<std::size_t>(candidate - 1)]; }

  const std::vector<int>& positions() const { return pos_; }

  // candidates listed best to worst.
  std::vector<int> order() const {
    std::vector<int> ord(pos_.size(), 0);
    for (int c = 1; c <= m(); ++c) ord[static_cast<std::size_t>(pos_[static_cast<std::size_t>(c - 1)] - 1)] = c;
    return ord;
  }

  Ranking inverse() const { return Ranking(order()); }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < pos_.size(); ++i) {
      if (i) os << ' ';
      os << pos_[i];
    }
    return os.str();
  }

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.pos_ == b.pos_; }
  friend bool operator!=(const Ranking& a, const Ranking& b) { return !(a == b); }
  // lexicographic on the positions vector, used for tie-breaking.
  friend bool operator<(const Ranking& a, const Ranking& b) { return a.pos_ < b.pos_; }

 private:
  std::vector<int> pos_;
};

// A profile of n rankings over a common candidate set of size m.
class RankingDataset {
 public:
  explicit RankingDataset(int m) : m_(m) {
    if (m < 1) throw invalid_input_error("dataset needs m >= 1");
  }

  static RankingDataset from_rankings(std::vector<Ranking> rankings) {
    if (rankings.empty()) throw invalid_input_error("dataset needs at least one ranking");
    RankingDataset d(rankings.front().m());
    d.rankings_ = std::move(rankings);
    for (const Ranking& r : d.rankings_)
      if (r.m() != d.m_) throw invalid_input_error("all rankings in a dataset must share m");
    return d;
  }

  void add(Ranking r) {
    if (r.m() != m_) throw invalid_input_error("ranking size does not match dataset m");
    rankings_.push_back(std::move(r));
  }

  // swap out one voter's ranking (neighboring-dataset constructions)
  void replace(std::size_t i, Ranking r) {
    if (r.m() != m_) throw invalid_input_error("ranking size does not match dataset m");
    rankings_.at(i) = std::move(r);
  }

  int m() const { return m_; }
  std::size_t n() const { return rankings_.size(); }
  const Ranking& operator[](std::size_t i) const { return rankings_[i]; }
  const std::vector<Ranking>& rankings() const { return rankings_; }
  auto begin() const { return rankings_.begin(); }
  auto end() const { return rankings_.end(); }

 private:
  int m_;
  std::vector<Ranking> rankings_;
};

namespace detail {

// counts inversions by merge sort; modifies the input buffer
inline long long count_inversions(std::vector<int>& seq, std::vector<int>& scratch,
                                  std::size_t lo, std::size_t hi) {
  if (hi - lo <= 1) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(seq, scratch, lo, mid) + count_inversions(seq, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (seq[i] <= seq[j]) {
      scratch[k++] = seq[i++];
    } else {
      inv += static_cast<long long>(mid - i);
      scratch[k++] = seq[j++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            seq.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

// Number of candidate pairs the two rankings order differently, counted in
// O(m log m): walk candidates in b's order and count inversions of their
// positions under a.
inline long long kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.m() != b.m()) throw invalid_input_error("rankings must share m");
  const std::vector<int> order_b = b.order();
  std::vector<int> seq(order_b.size());
  for (std::size_t p = 0; p < order_b.size(); ++p) seq[p] = a.position(order_b[p]);
  std::vector<int> scratch(seq.size());
  return detail::count_inversions(seq, scratch, 0, seq.size());
}

// Sum over candidates of the absolute displacement between the rankings.
inline long long footrule(const Ranking& a, const Ranking& b) {
  if (a.m() != b.m()) throw invalid_input_error("rankings must share m");
  long long dist = 0;
  for (int c = 1; c <= a.m(); ++c)
    dist += std::abs(static_cast<long long>(a.position(c)) - b.position(c));
  return dist;
}

enum class Objective { kemeny, footrule };

inline double avg_distance(const Ranking& sigma, const RankingDataset& data, Objective metric) {
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  double total = 0;
  for (const Ranking& r : data)
    total += static_cast<double>(metric == Objective::kemeny ? kendall_tau(sigma, r)
                                                             : footrule(sigma, r));
  return total / static_cast<double>(data.n());
}

inline std::string objective_name(Objective o) {
  return o == Objective::kemeny ? "kemeny" : "footrule";
}

struct BruteForceResult {
  Ranking ranking;
  double value;  // average distance of `ranking` to the dataset
};

// Exact optimum by enumerating all m! rankings. Ties resolve to the
// lexicographically smallest positions vector. Guarded to m <= 10.
inline BruteForceResult brute_force_optimal(const RankingDataset& data, Objective objective) {
  const int m = data.m();
  if (m > 10) throw unsupported_size_error("brute_force_optimal is limited to m <= 10");
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  const std::size_t n = data.n();

  // unnormalized pair counts for kemeny, displacement sums for footrule
  std::vector<long long> pair_count;  // [u-1][v-1]: #i with pi_i(u) < pi_i(v)
  std::vector<long long> disp;        // [q-1][j-1]: sum_i |j - pi_i(q)|
  if (objective == Objective::kemeny) {
    pair_count.assign(static_cast<std::size_t>(m) * m, 0);
    for (const Ranking& r : data)
      for (int u = 1; u <= m; ++u)
        for (int v = 1; v <= m; ++v)
          if (u != v && r.position(u) < r.position(v))
            ++pair_count[static_cast<std::size_t>(u - 1) * m + (v - 1)];
  } else {
    disp.assign(static_cast<std::size_t>(m) * m, 0);
    for (const Ranking& r : data)
      for (int q = 1; q <= m; ++q)
        for (int j = 1; j <= m; ++j)
          disp[static_cast<std::size_t>(q - 1) * m + (j - 1)] +=
              std::abs(static_cast<long long>(j) - r.position(q));
  }

  std::vector<int> pos(static_cast<std::size_t>(m));
  std::iota(pos.begin(), pos.end(), 1);
  std::vector<int> best = pos;
  long long best_cost = -1;
  do {
    long long cost = 0;
    if (objective == Objective::kemeny) {
      for (int u = 1; u <= m; ++u)
        for (int v = 1; v <= m; ++v)
          if (u != v && pos[static_cast<std::size_t>(u - 1)] < pos[static_cast<std::size_t>(v - 1)])
            cost += pair_count[static_cast<std::size_t>(v - 1) * m + (u - 1)];
    } else {
      for (int q = 1; q <= m; ++q)
        cost += disp[static_cast<std::size_t>(q - 1) * m + (pos[static_cast<std::size_t>(q - 1)] - 1)];
    }
    if (best_cost < 0 || cost < best_cost) {
      best_cost = cost;
      best = pos;
    }
  } while (std::next_permutation(pos.begin(), pos.end()));

  return BruteForceResult{Ranking(std::move(best)),
                          static_cast<double>(best_cost) / static_cast<double>(n)};
}

// Exact optimum value when cheap enough to enumerate, otherwise nullopt.
inline std::optional<double> opt_if_computable(const RankingDataset& data, Objective objective) {
  if (data.m() > 9) return std::nullopt;
  return brute_force_optimal(data, objective).value;
}

}  // namespace rankagg
