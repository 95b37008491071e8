#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/generators.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/wfas.hpp"

namespace rankagg {

// Outcome of the noisy pairwise classification: every unordered pair lands
// in exactly one list, in exactly one orientation. Imbalanced pairs are
// stored (dominant, dominated); balanced pairs are stored with u < v.
struct PairClassification {
  int m = 0;
  std::vector<std::pair<int, int>> imbalanced;
  std::vector<std::pair<int, int>> balanced;
};

namespace detail {

// Per-release noise scale for a full-matrix release at the given share:
// Laplace with l1 sensitivity m^2/n, Gaussian with l2 sensitivity m/n.
inline double matrix_release_scale(int m, std::size_t n, const PrivacyBudget& share) {
  const PrivacyBudget eff = share.effective();
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  if (eff.kind == BudgetKind::pure) {
    if (eff.epsilon <= 0) throw invalid_parameter_error("share must be positive");
    return (md * md / nd) / eff.epsilon;
  }
  if (eff.rho <= 0) throw invalid_parameter_error("share must be positive");
  return gaussian_sigma_for_zcdp(md / nd, eff.rho);
}

inline double release_noise(int m, std::size_t n, const PrivacyBudget& share, Rng& rng) {
  const double scale = matrix_release_scale(m, n, share);
  return share.effective().kind == BudgetKind::pure ? sample_laplace(scale, rng)
                                                    : sample_gaussian(scale, rng);
}

}  // namespace detail

// Classify each unordered pair by a noisy comparison fraction: clearly
// one-sided pairs (noisy value beyond 5/6 or below 1/6) become imbalanced,
// the rest balanced. One noise draw per pair, u < v in id order.
inline PairClassification classify_pairs(const PairwiseMatrix& w, std::size_t n,
                                         const PrivacyBudget& share, BudgetLedger& ledger,
                                         Rng& rng, const MechanismOptions& options = {}) {
  if (n == 0) throw invalid_input_error("n must be >= 1");
  ledger.spend(share, "classify");
  PairClassification out;
  out.m = w.m();
  for (int u = 1; u <= w.m(); ++u)
    for (int v = u + 1; v <= w.m(); ++v) {
      const double theta =
          options.noise_disabled() ? 0.0 : detail::release_noise(w.m(), n, share, rng);
      const double noisy = w.at(u, v) + theta;
      if (noisy > 5.0 / 6.0)
        out.imbalanced.emplace_back(u, v);
      else if (noisy < 1.0 / 6.0)
        out.imbalanced.emplace_back(v, u);
      else
        out.balanced.emplace_back(u, v);
    }
  return out;
}

// The rewritten instance: dominated directions of imbalanced pairs are
// zeroed and their complements carry the (noisy) margin; balanced pairs
// keep a (noisy) value with the reverse direction pinned to its exact
// complement. `unnoised` is the same rewrite without the noise draws,
// used by the cost-identity analysis.
struct TransformedInstance {
  WfasInstance noisy;
  WfasInstance unnoised;
};

inline TransformedInstance build_transformed(const PairwiseMatrix& w, std::size_t n,
                                             const PairClassification& cls,
                                             const PrivacyBudget& share, BudgetLedger& ledger,
                                             Rng& rng, const MechanismOptions& options = {}) {
  if (cls.m != w.m()) throw invalid_input_error("classification and matrix must share m");
  if (n == 0) throw invalid_input_error("n must be >= 1");
  ledger.spend(share, "transform");
  TransformedInstance out{WfasInstance(w.m()), WfasInstance(w.m())};
  for (const auto& [u, v] : cls.imbalanced) {
    const double margin = w.at(u, v) - w.at(v, u);
    const double r = options.noise_disabled() ? 0.0 : detail::release_noise(w.m(), n, share, rng);
    out.noisy.at(u, v) = margin + r;
    out.noisy.at(v, u) = 0.0;
    out.unnoised.at(u, v) = margin;
    out.unnoised.at(v, u) = 0.0;
  }
  for (const auto& [u, v] : cls.balanced) {
    const double r = options.noise_disabled() ? 0.0 : detail::release_noise(w.m(), n, share, rng);
    out.noisy.at(u, v) = w.at(u, v) + r;
    out.noisy.at(v, u) = 1.0 - out.noisy.at(u, v);
    out.unnoised.at(u, v) = w.at(u, v);
    out.unnoised.at(v, u) = 1.0 - w.at(u, v);
  }
  return out;
}

// Constant relating the original and transformed objectives:
// cost_w(pi) = cost_transformed(pi) + sum over imbalanced (u,v) of w_vu.
inline double transform_cost_offset(const PairwiseMatrix& w, const PairClassification& cls) {
  double offset = 0;
  for (const auto& [u, v] : cls.imbalanced) offset += w.at(v, u);
  return offset;
}

// Smallest n for which the large-n analysis applies at this budget. The
// inner log is floored at zero so generous budgets give a zero threshold.
inline double large_n_threshold(int m, const PrivacyBudget& budget) {
  const PrivacyBudget eff = budget.effective();
  const double md = static_cast<double>(m);
  if (eff.kind == BudgetKind::pure) {
    if (eff.epsilon <= 0) return std::numeric_limits<double>::infinity();
    return 400.0 * md * md * std::max(0.0, std::log(md / eff.epsilon)) / eff.epsilon;
  }
  if (eff.rho <= 0) return std::numeric_limits<double>::infinity();
  return 10000.0 * md * std::sqrt(std::max(0.0, std::log(md / eff.rho))) / std::sqrt(eff.rho);
}

struct LargeNConfig {
  MechanismOptions options;
  SolverOptions solver;
  bool warn_below_threshold = true;
};

struct LargeNResult {
  Ranking ranking;
  bool fallback_used = false;
  bool bounded = false;
  std::size_t imbalanced_count = 0;
  std::size_t balanced_count = 0;
};

// Classification and transform each take half the share; a bounded
// rewrite is solved, an unbounded one falls back to a random permutation.
inline LargeNResult kemeny_large_n_with(const RankingDataset& data, const PrivacyBudget& share,
                                        BudgetLedger& ledger, Rng& rng,
                                        const LargeNConfig& config = {}) {
  if (data.n() == 0) throw invalid_input_error("dataset is empty");
  const int m = data.m();
  if (config.warn_below_threshold &&
      static_cast<double>(data.n()) < large_n_threshold(m, share))
    std::cerr << "warning: n=" << data.n() << " is below the large-n regime threshold "
              << large_n_threshold(m, share) << "; accuracy guarantees do not apply\n";
  const PairwiseMatrix w = pairwise_matrix(data);
  const PrivacyBudget half = share.scaled(0.5);
  const PairClassification cls =
      classify_pairs(w, data.n(), half, ledger, rng, config.options);
  const TransformedInstance transformed =
      build_transformed(w, data.n(), cls, half, ledger, rng, config.options);

  LargeNResult result{Ranking::identity(m)};
  result.imbalanced_count = cls.imbalanced.size();
  result.balanced_count = cls.balanced.size();
  result.bounded = is_bounded(transformed.noisy);
  if (result.bounded) {
    result.ranking = solve_bounded(transformed.noisy, config.solver);
  } else {
    result.ranking = uniform_random_ranking(m, rng);
    result.fallback_used = true;
  }
  return result;
}

struct LargeNRun {
  LargeNResult result;
  LedgerAudit audit;
};

inline LargeNRun kemeny_large_n(const RankingDataset& data, const PrivacyBudget& budget,
                                Rng& rng, const LargeNConfig& config = {}) {
  BudgetLedger ledger(budget);
  LargeNResult result = kemeny_large_n_with(data, budget, ledger, rng, config);
  return LargeNRun{std::move(result), ledger.audit()};
}

}  // namespace rankagg
