#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/footrule.hpp"
#include "rankagg/kemeny_large_n.hpp"
#include "rankagg/kemeny_small_n.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/wfas.hpp"

namespace rankagg {

// Private selection between two candidate rankings: compare their exact
// Kendall objective values and keep the cheaper one up to one noisy
// comparison. The cost difference moves by at most 2*C(m,2)/n <= 2m^2/n
// when one voter changes, in either norm.
inline Ranking combine(const Ranking& pi1, const Ranking& pi2, const RankingDataset& data,
                       const PrivacyBudget& share, BudgetLedger& ledger, Rng& rng,
                       const MechanismOptions& options = {}) {
  if (pi1.m() != data.m() || pi2.m() != data.m())
    throw invalid_input_error("candidate rankings must match the dataset");
  ledger.spend(share, "combine");
  const PairwiseMatrix w = pairwise_matrix(data);
  const double delta =
      kemeny_cost_from_pairwise(pi1, w) - kemeny_cost_from_pairwise(pi2, w);
  double r = 0;
  if (!options.noise_disabled()) {
    const double md = static_cast<double>(data.m());
    const double sensitivity = 2.0 * md * md / static_cast<double>(data.n());
    const PrivacyBudget eff = share.effective();
    r = eff.kind == BudgetKind::pure
            ? sample_laplace(sensitivity / eff.epsilon, rng)
            : sample_gaussian(gaussian_sigma_for_zcdp(sensitivity, eff.rho), rng);
  }
  return delta + r > 0 ? pi2 : pi1;
}

enum class Regime { automatic, small, large };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::automatic: return "auto";
    case Regime::small: return "small";
    case Regime::large: return "large";
  }
  return "?";
}

struct PtasConfig {
  MechanismOptions options;
  int buckets = 0;       // < 1 selects the default bucket count
  double kappa = 1.5;    // tree-mechanism base for the footrule companion
  SolverOptions solver;
  bool warn_below_threshold = true;
};

struct PtasResult {
  Ranking ranking;
  Regime regime_used = Regime::small;
  bool fallback_used = false;
  bool bounded = false;
  std::size_t imbalanced_count = 0;
  std::size_t balanced_count = 0;
  LedgerAudit audit;
};

// Full private Kemeny pipeline: a regime-specific estimator, the
// factor-2 footrule companion, and the noisy combiner, each on a third
// of the budget. Auto regime compares n against the large-n threshold
// evaluated at the regime algorithm's own third.
inline PtasResult kemeny_ptas(const RankingDataset& data, const PrivacyBudget& budget,
                              Regime regime, Rng& rng, const PtasConfig& config = {}) {
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  BudgetLedger ledger(budget);
  const PrivacyBudget third = budget.scaled(1.0 / 3.0);
  const PrivacyBudget last_third = budget.scaled(1.0 - 2.0 / 3.0);

  Regime chosen = regime;
  if (regime == Regime::automatic)
    chosen = static_cast<double>(data.n()) >= large_n_threshold(data.m(), third)
                 ? Regime::large
                 : Regime::small;

  PtasResult result{Ranking::identity(data.m())};
  result.regime_used = chosen;

  Ranking m1 = Ranking::identity(data.m());
  if (chosen == Regime::small) {
    SmallNConfig small_config;
    small_config.options = config.options;
    const PairwiseMatrix estimate =
        estimate_w_small_n(data, third, config.buckets, ledger, rng, small_config);
    m1 = solve_bounded(WfasInstance::from_pairwise(estimate), config.solver);
    result.bounded = true;
  } else {
    LargeNConfig large_config;
    large_config.options = config.options;
    large_config.solver = config.solver;
    large_config.warn_below_threshold = config.warn_below_threshold;
    LargeNResult large = kemeny_large_n_with(data, third, ledger, rng, large_config);
    m1 = std::move(large.ranking);
    result.fallback_used = large.fallback_used;
    result.bounded = large.bounded;
    result.imbalanced_count = large.imbalanced_count;
    result.balanced_count = large.balanced_count;
  }

  PipelineConfig footrule_config;
  footrule_config.kappa = config.kappa;
  footrule_config.options = config.options;
  const PrivacyModel model =
      budget.effective().kind == BudgetKind::pure ? PrivacyModel::pure : PrivacyModel::zcdp;
  const Ranking m2 = footrule_aggregate_with(data, model, third, ledger, rng, footrule_config);

  result.ranking = combine(m1, m2, data, last_third, ledger, rng, config.options);
  result.audit = ledger.audit();
  return result;
}

}  // namespace rankagg
