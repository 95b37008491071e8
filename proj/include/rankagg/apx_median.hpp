#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rankagg/errors.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/vecagg.hpp"

namespace rankagg {

// Complete dyadic tree over [m_padded], m_padded the next power of two
// >= m. Levels run 0 (leaves) to depth() (root); node ids are level-major
// with leaves first. Node (level, p) covers [(p-1)*2^level + 1, p*2^level].
class DyadicTree {
 public:
  explicit DyadicTree(int m) : m_(m) {
    if (m < 1) throw invalid_input_error("tree domain must have m >= 1");
    m_padded_ = 1;
    d_ = 0;
    while (m_padded_ < m) {
      m_padded_ <<= 1;
      ++d_;
    }
    level_offset_.resize(static_cast<std::size_t>(d_) + 2);
    level_offset_[0] = 0;
    for (int l = 0; l <= d_; ++l)
      level_offset_[static_cast<std::size_t>(l) + 1] =
          level_offset_[static_cast<std::size_t>(l)] + (m_padded_ >> l);
  }

  int m() const { return m_; }
  int m_padded() const { return m_padded_; }
  int depth() const { return d_; }
  int node_count() const { return 2 * m_padded_ - 1; }

  int node_id(int level, int p) const {
    return level_offset_[static_cast<std::size_t>(level)] + p - 1;
  }

  int level(int id) const {
    int l = 0;
    while (id >= level_offset_[static_cast<std::size_t>(l) + 1]) ++l;
    return l;
  }

  // 1-indexed position of the node within its level
  int index_in_level(int id) const { return id - level_offset_[static_cast<std::size_t>(level(id))] + 1; }

  int range_start(int id) const {
    const int l = level(id);
    return (index_in_level(id) - 1) * (1 << l) + 1;
  }

  int range_end(int id) const { return range_start(id) + (1 << level(id)) - 1; }

  bool is_root(int id) const { return id == node_count() - 1; }

  // true iff the node's interval precedes its sibling's
  bool is_left(int id) const { return index_in_level(id) % 2 == 1; }

  int sibling(int id) const {
    if (is_root(id)) throw invalid_input_error("root has no sibling");
    const int p = index_in_level(id);
    return node_id(level(id), is_left(id) ? p + 1 : p - 1);
  }

  // the unique node at `level` whose interval contains x
  int node_containing(int level, int x) const {
    const int p = (x + (1 << level) - 1) >> level;  // ceil(x / 2^level)
    return node_id(level, p);
  }

 private:
  int m_;
  int m_padded_;
  int d_;
  std::vector<int> level_offset_;
};

// Appends the weighted tree contributions of one value x to `out`, at
// coordinate offsets [offset, offset+N) for the v-part and
// [offset+N, offset+2N) for the u-part, N = tree.node_count(). One entry
// per level: v = kappa^(d-l) * (x - r(t)), u = kappa^(d-l) * 2^l for the
// node t containing x at level l.
inline void append_weighted_contribution(const DyadicTree& tree, int x, double kappa,
                                         std::size_t offset, SparseVector& out) {
  if (x < 1 || x > tree.m()) throw invalid_input_error("value outside [1, m]");
  const int d = tree.depth();
  const std::size_t n_nodes = static_cast<std::size_t>(tree.node_count());
  for (int l = 0; l <= d; ++l) {
    const int t = tree.node_containing(l, x);
    const double weight = std::pow(kappa, d - l);
    const double v = weight * static_cast<double>(x - tree.range_start(t));
    if (v != 0) out.emplace_back(offset + static_cast<std::size_t>(t), v);
    out.emplace_back(offset + n_nodes + static_cast<std::size_t>(t),
                     weight * static_cast<double>(1 << l));
  }
}

// Exact sup over x in [m_padded] of the contribution norm for one tree
// (the concatenated [v; u] block): per level, |v| <= kappa^(d-l)*(2^l - 1)
// and u = kappa^(d-l)*2^l.
inline double contribution_norm_bound(const DyadicTree& tree, double kappa, bool l1) {
  const int d = tree.depth();
  double acc = 0;
  for (int l = 0; l <= d; ++l) {
    const double weight = std::pow(kappa, d - l);
    const double v = weight * static_cast<double>((1 << l) - 1);
    const double u = weight * static_cast<double>(1 << l);
    acc += l1 ? v + u : v * v + u * u;
  }
  return l1 ? acc : std::sqrt(acc);
}

namespace detail {

inline void check_kappa(double kappa) {
  if (!(kappa > 1.0 && kappa < 2.0))
    throw invalid_parameter_error("kappa must lie strictly between 1 and 2");
}

// shared estimate assembly: reweights one tree's aggregated block and sums
// sibling estimates for every query point j in [m]
inline std::vector<double> assemble_estimates(const DyadicTree& tree, double kappa,
                                              const std::vector<double>& agg,
                                              std::size_t offset) {
  const int d = tree.depth();
  const std::size_t n_nodes = static_cast<std::size_t>(tree.node_count());
  std::vector<double> v_hat(n_nodes), u_hat(n_nodes);
  for (std::size_t t = 0; t < n_nodes; ++t) {
    const double reweight = std::pow(kappa, tree.level(static_cast<int>(t)) - d);
    v_hat[t] = reweight * agg[offset + t];
    u_hat[t] = reweight * agg[offset + n_nodes + t];
  }
  std::vector<double> gamma(static_cast<std::size_t>(tree.m()), 0.0);
  for (int j = 1; j <= tree.m(); ++j) {
    double est = 0;
    for (int l = 0; l < d; ++l) {  // non-root nodes containing j
      const int t = tree.node_containing(l, j);
      const int sib = tree.sibling(t);
      const double sign = tree.is_left(t) ? 1.0 : -1.0;
      const double shift = static_cast<double>(tree.range_start(sib) - j) /
                           static_cast<double>(1 << tree.level(sib));
      est += sign * (v_hat[static_cast<std::size_t>(sib)] +
                     shift * u_hat[static_cast<std::size_t>(sib)]);
    }
    gamma[static_cast<std::size_t>(j - 1)] = est;
  }
  return gamma;
}

}  // namespace detail

// Tree-mechanism estimates of gamma_j = (1/n) sum_i |x_i - j| for every
// j in [m], releasing the weighted node aggregates through one vector
// aggregation under the given budget share.
inline std::vector<double> apx_median(const std::vector<int>& x, int m,
                                      const VecAggBackend& backend, const PrivacyBudget& share,
                                      BudgetLedger& ledger, Rng& rng, double kappa = 1.5) {
  detail::check_kappa(kappa);
  if (x.empty()) throw invalid_input_error("empty input");
  DyadicTree tree(m);
  for (int xi : x)
    if (xi < 1 || xi > m) throw invalid_input_error("value outside [1, m]");

  VecAggRequest request;
  request.d = 2 * static_cast<std::size_t>(tree.node_count());
  request.n = x.size();
  request.norm_bound = contribution_norm_bound(tree, kappa, uses_l1_norm(backend.model));
  request.share = share;
  const std::vector<double> agg = aggregate_contributions(
      [&](std::size_t i, SparseVector& out) {
        append_weighted_contribution(tree, x[i], kappa, 0, out);
      },
      request, backend, ledger, rng);
  return detail::assemble_estimates(tree, kappa, agg, 0);
}

// m-parallel variant over a ranking dataset: estimates gamma_{j,q} =
// (1/n) sum_i |pi_i(q) - j| for all j, q via a single concatenated
// aggregation (one ledger spend). Returns gamma[q-1][j-1].
inline std::vector<std::vector<double>> parallel_apx_median(const RankingDataset& data,
                                                            const VecAggBackend& backend,
                                                            const PrivacyBudget& share,
                                                            BudgetLedger& ledger, Rng& rng,
                                                            double kappa = 1.5) {
  detail::check_kappa(kappa);
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  const int m = data.m();
  DyadicTree tree(m);
  const std::size_t block = 2 * static_cast<std::size_t>(tree.node_count());

  VecAggRequest request;
  request.d = static_cast<std::size_t>(m) * block;
  request.n = data.n();
  const bool l1 = uses_l1_norm(backend.model);
  const double single = contribution_norm_bound(tree, kappa, l1);
  request.norm_bound = l1 ? single * m : single * std::sqrt(static_cast<double>(m));
  request.share = share;

  const std::vector<double> agg = aggregate_contributions(
      [&](std::size_t i, SparseVector& out) {
        for (int q = 1; q <= m; ++q)
          append_weighted_contribution(tree, data[i].position(q), kappa,
                                       static_cast<std::size_t>(q - 1) * block, out);
      },
      request, backend, ledger, rng);

  std::vector<std::vector<double>> gamma;
  gamma.reserve(static_cast<std::size_t>(m));
  for (int q = 1; q <= m; ++q)
    gamma.push_back(detail::assemble_estimates(tree, kappa, agg,
                                               static_cast<std::size_t>(q - 1) * block));
  return gamma;
}

}  // namespace rankagg
