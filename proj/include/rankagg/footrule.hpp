#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rankagg/apx_median.hpp"
#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/matching.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/vecagg.hpp"

namespace rankagg {

// m x m bipartite edge weights: entry (q, j) is the estimated cost of
// placing candidate q at position j.
class AssignmentCostMatrix {
 public:
  explicit AssignmentCostMatrix(int m) : m_(m), c_(static_cast<std::size_t>(m) * m, 0.0) {
    if (m < 1) throw invalid_input_error("cost matrix needs m >= 1");
  }

  // gamma[q-1][j-1] as produced by parallel_apx_median
  static AssignmentCostMatrix from_gamma(const std::vector<std::vector<double>>& gamma) {
    AssignmentCostMatrix c(static_cast<int>(gamma.size()));
    for (int q = 1; q <= c.m(); ++q) {
      if (static_cast<int>(gamma[static_cast<std::size_t>(q - 1)].size()) != c.m())
        throw invalid_input_error("gamma matrix must be square");
      for (int j = 1; j <= c.m(); ++j)
        c.at(q, j) = gamma[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(j - 1)];
    }
    return c;
  }

  int m() const { return m_; }
  double at(int q, int j) const { return c_[idx(q, j)]; }
  double& at(int q, int j) { return c_[idx(q, j)]; }

 private:
  std::size_t idx(int q, int j) const { return static_cast<std::size_t>(q - 1) * m_ + (j - 1); }
  int m_;
  std::vector<double> c_;
};

// Minimum-weight perfect matching of candidates to positions; psi(q) = j
// for each matched edge (q, j).
inline Ranking min_weight_matching(const AssignmentCostMatrix& cost) {
  const int m = cost.m();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(m)));
  for (int q = 1; q <= m; ++q)
    for (int j = 1; j <= m; ++j)
      rows[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(j - 1)] = cost.at(q, j);
  const std::vector<int> match = min_cost_assignment(rows);
  std::vector<int> positions(static_cast<std::size_t>(m));
  for (int q = 1; q <= m; ++q) positions[static_cast<std::size_t>(q - 1)] = match[static_cast<std::size_t>(q - 1)] + 1;
  return Ranking(std::move(positions));
}

inline double matching_cost(const AssignmentCostMatrix& cost, const Ranking& psi) {
  if (psi.m() != cost.m()) throw invalid_input_error("ranking and cost matrix must share m");
  double total = 0;
  for (int q = 1; q <= cost.m(); ++q) total += cost.at(q, psi.position(q));
  return total;
}

struct PipelineConfig {
  double kappa = 1.5;
  LdpMechanism ldp_mechanism = LdpMechanism::laplace;
  MechanismOptions options;
  MessageSink message_sink;
};

inline VecAggBackend make_backend(PrivacyModel model, const PipelineConfig& config) {
  VecAggBackend backend;
  backend.model = model;
  backend.ldp_mechanism = config.ldp_mechanism;
  backend.options = config.options;
  backend.message_sink = config.message_sink;
  return backend;
}

// Estimate the position costs privately, then match. Spends exactly the
// given share on the provided ledger (one aggregation).
inline Ranking footrule_aggregate_with(const RankingDataset& data, PrivacyModel model,
                                       const PrivacyBudget& share, BudgetLedger& ledger,
                                       Rng& rng, const PipelineConfig& config = {}) {
  const std::vector<std::vector<double>> gamma =
      parallel_apx_median(data, make_backend(model, config), share, ledger, rng, config.kappa);
  return min_weight_matching(AssignmentCostMatrix::from_gamma(gamma));
}

struct AggregateResult {
  Ranking ranking;
  LedgerAudit audit;
};

// Whole-budget footrule aggregation: one aggregation consuming the full
// declared budget.
inline AggregateResult footrule_aggregate(const RankingDataset& data, const PrivacyBudget& budget,
                                          PrivacyModel model, Rng& rng,
                                          const PipelineConfig& config = {}) {
  BudgetLedger ledger(budget);
  Ranking psi = footrule_aggregate_with(data, model, budget, ledger, rng, config);
  return AggregateResult{std::move(psi), ledger.audit()};
}

// Same pipeline reported against the Kendall objective; the footrule
// optimum is a factor-2 Kemeny approximation.
inline AggregateResult kemeny_via_footrule(const RankingDataset& data, const PrivacyBudget& budget,
                                           PrivacyModel model, Rng& rng,
                                           const PipelineConfig& config = {}) {
  return footrule_aggregate(data, budget, model, rng, config);
}

}  // namespace rankagg
