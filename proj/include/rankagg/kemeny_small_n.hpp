#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

// Partition of the m positions into B contiguous buckets whose sizes
// differ by at most one.
class BucketScheme {
 public:
  static BucketScheme contiguous(int m, int B) {
    if (m < 1) throw invalid_input_error("bucket scheme needs m >= 1");
    if (B < 1 || B > m) throw invalid_parameter_error("bucket count must be in [1, m]");
    BucketScheme s;
    s.m_ = m;
    s.B_ = B;
    s.bucket_of_position_.resize(static_cast<std::size_t>(m));
    const int base = m / B;
    const int extra = m % B;  // the first `extra` buckets get one more slot
    int pos = 0;
    for (int b = 1; b <= B; ++b) {
      const int size = base + (b <= extra ? 1 : 0);
      for (int k = 0; k < size; ++k) s.bucket_of_position_[static_cast<std::size_t>(pos++)] = b;
    }
    return s;
  }

  int m() const { return m_; }
  int buckets() const { return B_; }

  int bucket(int position) const {
    if (position < 1 || position > m_) throw invalid_input_error("position out of range");
    return bucket_of_position_[static_cast<std::size_t>(position - 1)];
  }

  std::vector<int> sizes() const {
    std::vector<int> out(static_cast<std::size_t>(B_), 0);
    for (int b : bucket_of_position_) ++out[static_cast<std::size_t>(b - 1)];
    return out;
  }

  // number of unordered same-bucket position pairs
  long long same_bucket_pairs() const {
    long long total = 0;
    for (int c : sizes()) total += static_cast<long long>(c) * (c - 1) / 2;
    return total;
  }

 private:
  int m_ = 0;
  int B_ = 0;
  std::vector<int> bucket_of_position_;
};

// Exact decomposition of the pairwise matrix into same-bucket and
// cross-bucket parts: w = s + t entrywise.
struct SplitST {
  PairwiseMatrix s;
  PairwiseMatrix t;
};

inline SplitST split_s_t(const RankingDataset& data, const BucketScheme& scheme) {
  if (scheme.m() != data.m()) throw invalid_input_error("scheme and dataset must share m");
  const int m = data.m();
  SplitST out{PairwiseMatrix(m), PairwiseMatrix(m)};
  for (std::size_t i = 0; i < data.n(); ++i) {
    const Ranking& pi = data[i];
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v) {
        if (u == v) continue;
        const int bu = scheme.bucket(pi.position(u));
        const int bv = scheme.bucket(pi.position(v));
        if (bu == bv) {
          if (pi.position(u) < pi.position(v)) out.s.at(u, v) += 1.0;
        } else if (bu < bv) {
          out.t.at(u, v) += 1.0;
        }
      }
  }
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v) {
      out.s.at(u, v) *= inv_n;
      out.t.at(u, v) *= inv_n;
    }
  return out;
}

// Per-user binary encoding over d = m*B coordinates: coordinate (u, b) is
// set when candidate u falls in bucket b.
class MarginalEncoding {
 public:
  static MarginalEncoding build(const RankingDataset& data, const BucketScheme& scheme) {
    if (scheme.m() != data.m()) throw invalid_input_error("scheme and dataset must share m");
    MarginalEncoding enc;
    enc.m_ = data.m();
    enc.B_ = scheme.buckets();
    enc.bucket_of_.resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
      enc.bucket_of_[i].resize(static_cast<std::size_t>(enc.m_));
      for (int u = 1; u <= enc.m_; ++u)
        enc.bucket_of_[i][static_cast<std::size_t>(u - 1)] =
            scheme.bucket(data[i].position(u));
    }
    return enc;
  }

  int m() const { return m_; }
  int buckets() const { return B_; }
  std::size_t n() const { return bucket_of_.size(); }
  std::size_t d() const { return static_cast<std::size_t>(m_) * B_; }

  int bucket_of(std::size_t user, int candidate) const {
    return bucket_of_.at(user)[static_cast<std::size_t>(candidate - 1)];
  }

  // set coordinates of user i, ascending; exactly m of them
  std::vector<std::size_t> user_coordinates(std::size_t user) const {
    std::vector<std::size_t> coords;
    coords.reserve(static_cast<std::size_t>(m_));
    for (int u = 1; u <= m_; ++u)
      coords.push_back(static_cast<std::size_t>(u - 1) * B_ +
                       (bucket_of(user, u) - 1));
    return coords;
  }

 private:
  int m_ = 0;
  int B_ = 0;
  std::vector<std::vector<int>> bucket_of_;
};

// Two-way marginal over the encoding: fraction of users with candidate u
// in bucket bu and candidate v in bucket bv (bu < bv required).
struct MarginalQuery {
  int u = 0;
  int bu = 0;
  int v = 0;
  int bv = 0;
};

inline std::vector<MarginalQuery> all_cross_bucket_queries(int m, int B) {
  std::vector<MarginalQuery> out;
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v) {
      if (v == u) continue;
      for (int bu = 1; bu <= B; ++bu)
        for (int bv = bu + 1; bv <= B; ++bv) out.push_back({u, bu, v, bv});
    }
  return out;
}

// exact answers, one per query
inline std::vector<double> marginal_truth(const MarginalEncoding& enc,
                                          const std::vector<MarginalQuery>& queries) {
  if (enc.n() == 0) throw invalid_input_error("encoding has no users");
  std::vector<double> out(queries.size(), 0.0);
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const MarginalQuery& q = queries[k];
    if (q.u < 1 || q.u > enc.m() || q.v < 1 || q.v > enc.m() || q.u == q.v)
      throw invalid_input_error("query candidates out of range");
    if (q.bu < 1 || q.bv > enc.buckets() || q.bu >= q.bv)
      throw invalid_input_error("query buckets must satisfy 1 <= bu < bv <= B");
    long long hits = 0;
    for (std::size_t i = 0; i < enc.n(); ++i)
      if (enc.bucket_of(i, q.u) == q.bu && enc.bucket_of(i, q.v) == q.bv) ++hits;
    out[k] = static_cast<double>(hits) / static_cast<double>(enc.n());
  }
  return out;
}

// Optional weighting an advanced backend may use to spend accuracy where
// it matters; the baseline noises every query equally and ignores it.
using QueryImportance = std::function<double(const MarginalQuery&)>;

// Pluggable private marginal estimator contract: unbiased estimates of
// the query answers, spending the given share on the ledger.
using MarginalAlgorithm = std::function<std::vector<double>(
    const MarginalEncoding&, const std::vector<MarginalQuery>&, const PrivacyBudget&,
    BudgetLedger&, Rng&)>;

// Direct noise-addition baseline. One user flips at most 2m coordinates,
// so at most C(2m,2) query answers move by 1/n each; that bounds the l1
// sensitivity by 2*C(2m,2)/n and the l2 sensitivity by sqrt(2*C(2m,2))/n.
inline std::vector<double> two_marginal_baseline(
    const MarginalEncoding& enc, const std::vector<MarginalQuery>& queries,
    const PrivacyBudget& share, BudgetLedger& ledger, Rng& rng,
    const MechanismOptions& options = {}, const QueryImportance& importance = {}) {
  (void)importance;
  ledger.spend(share, "marginals");
  std::vector<double> out = marginal_truth(enc, queries);
  if (options.noise_disabled() || queries.empty()) return out;
  const double n = static_cast<double>(enc.n());
  const double changed = static_cast<double>(2LL * enc.m() * (2LL * enc.m() - 1) / 2);
  const PrivacyBudget eff = share.effective();
  if (eff.kind == BudgetKind::pure) {
    const double scale = (2.0 * changed / n) / eff.epsilon;
    for (double& v : out) v += sample_laplace(scale, rng);
  } else {
    const double sigma = gaussian_sigma_for_zcdp(std::sqrt(2.0 * changed) / n, eff.rho);
    for (double& v : out) v += sample_gaussian(sigma, rng);
  }
  return out;
}

struct SmallNConfig {
  double same_bucket_fraction = 0.5;  // budget share spent on noising s
  MechanismOptions options;
  MarginalAlgorithm marginal;     // empty: use two_marginal_baseline
  QueryImportance importance;     // advisory hint passed to the baseline
};

inline int default_bucket_count(int m, std::size_t n, const PrivacyBudget& budget);

// Bucketed pairwise-matrix estimator: noise the same-bucket part
// directly, estimate the cross-bucket part from private two-way
// marginals, clip the sum into the feasible set. B < 1 selects the
// default bucket count.
inline PairwiseMatrix estimate_w_small_n(const RankingDataset& data, const PrivacyBudget& budget,
                                         int B, BudgetLedger& ledger, Rng& rng,
                                         const SmallNConfig& config = {}) {
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  if (!(config.same_bucket_fraction >= 0 && config.same_bucket_fraction <= 1))
    throw invalid_parameter_error("same_bucket_fraction must be in [0,1]");
  const int m = data.m();
  if (B < 1) B = default_bucket_count(m, data.n(), budget);
  const BucketScheme scheme = BucketScheme::contiguous(m, B);
  const PrivacyBudget s_share = budget.scaled(config.same_bucket_fraction);
  const PrivacyBudget t_share = budget.scaled(1.0 - config.same_bucket_fraction);

  const SplitST parts = split_s_t(data, scheme);
  ledger.spend(s_share, "same-bucket");

  PairwiseMatrix estimate(m);
  const double n = static_cast<double>(data.n());
  // one user changes at most 2P entries of s by 1/n each
  const double P = static_cast<double>(scheme.same_bucket_pairs());
  const PrivacyBudget s_eff = s_share.effective();
  const bool add_s_noise = !config.options.noise_disabled() && P > 0;
  const double s_scale =
      !add_s_noise ? 0.0
      : s_eff.kind == BudgetKind::pure ? (2.0 * P / n) / s_eff.epsilon
                                       : gaussian_sigma_for_zcdp(std::sqrt(2.0 * P) / n, s_eff.rho);
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v) {
      if (u == v) continue;
      double value = parts.s.at(u, v);
      if (add_s_noise)
        value += s_eff.kind == BudgetKind::pure ? sample_laplace(s_scale, rng)
                                                : sample_gaussian(s_scale, rng);
      estimate.at(u, v) = value;
    }

  const MarginalEncoding enc = MarginalEncoding::build(data, scheme);
  const std::vector<MarginalQuery> queries = all_cross_bucket_queries(m, scheme.buckets());
  const std::vector<double> q =
      config.marginal ? config.marginal(enc, queries, t_share, ledger, rng)
                      : two_marginal_baseline(enc, queries, t_share, ledger, rng, config.options,
                                              config.importance);
  if (q.size() != queries.size()) throw invalid_input_error("marginal backend answer count");
  for (std::size_t k = 0; k < queries.size(); ++k)
    estimate.at(queries[k].u, queries[k].v) += q[k];

  return clip_to_feasible(estimate);
}

// Bucket count minimizing the estimator's error rate; ceiling of the
// closed form, clamped to [1, m]. The 1e-9 slack keeps exact-integer
// arguments from rounding up one extra step.
inline int default_bucket_count(int m, std::size_t n, const PrivacyBudget& budget) {
  if (m < 1) throw invalid_input_error("m must be >= 1");
  if (n == 0) throw invalid_input_error("n must be >= 1");
  const PrivacyBudget eff = budget.effective();
  if (eff.magnitude() <= 0) return m;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  double raw;
  if (eff.kind == BudgetKind::pure)
    raw = std::pow(md, 3.0 / 7.0) / (std::pow(nd, 1.0 / 7.0) * std::pow(eff.epsilon, 1.0 / 7.0));
  else
    raw = std::pow(md, 3.0 / 11.0) / (std::pow(nd, 2.0 / 11.0) * std::pow(eff.rho, 1.0 / 11.0));
  const int B = static_cast<int>(std::ceil(raw - 1e-9));
  return std::max(1, std::min(m, B));
}

// Largest n for which the bucketed estimator is the intended regime.
inline double small_n_limit(int m, const PrivacyBudget& budget) {
  const PrivacyBudget eff = budget.effective();
  const double md = static_cast<double>(m);
  if (eff.kind == BudgetKind::pure) {
    if (eff.epsilon <= 0) return 0.0;
    return md * md * md / eff.epsilon;
  }
  if (eff.rho <= 0) return 0.0;
  return std::pow(md, 1.5) / std::sqrt(eff.rho);
}

}  // namespace rankagg
