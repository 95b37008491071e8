#pragma once

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "rankagg/errors.hpp"
#include "rankagg/random.hpp"

namespace rankagg {

enum class BudgetKind { pure, zcdp, approx };

// The trust model a run operates under. pure/zcdp/approx are central-model
// accounting flavors; ldp swaps the aggregation backend for a local
// randomizer and accounts its epsilon per user.
enum class PrivacyModel { pure, zcdp, approx, ldp };

inline std::string model_name(PrivacyModel m) {
  switch (m) {
    case PrivacyModel::pure: return "pure";
    case PrivacyModel::zcdp: return "zcdp";
    case PrivacyModel::approx: return "approx";
    case PrivacyModel::ldp: return "ldp";
  }
  return "?";
}

inline double zcdp_to_approx(double rho, double delta) {
  if (rho < 0) throw invalid_parameter_error("rho must be >= 0");
  if (!(delta > 0 && delta < 1)) throw invalid_parameter_error("delta must be in (0,1)");
  if (rho == 0) return 0.0;
  return rho + std::sqrt(rho * std::log(1.0 / delta));
}

// Inverse of zcdp_to_approx in rho: the largest rho whose zCDP guarantee
// converts to (epsilon, delta)-DP.
inline double approx_to_zcdp(double epsilon, double delta) {
  if (epsilon < 0) throw invalid_parameter_error("epsilon must be >= 0");
  if (!(delta > 0 && delta < 1)) throw invalid_parameter_error("delta must be in (0,1)");
  if (epsilon == 0) return 0.0;
  const double l = std::log(1.0 / delta);
  // solve s^2 + s*sqrt(l) = epsilon for s = sqrt(rho)
  const double s = 0.5 * (-std::sqrt(l) + std::sqrt(l + 4.0 * epsilon));
  return s * s;
}

inline double gaussian_sigma_for_zcdp(double l2_sensitivity, double rho) {
  if (l2_sensitivity <= 0) throw invalid_parameter_error("l2 sensitivity must be > 0");
  if (rho <= 0) throw invalid_parameter_error("rho must be > 0");
  return l2_sensitivity / std::sqrt(2.0 * rho);
}

inline double sample_laplace(double scale, Rng& rng) {
  if (scale <= 0) throw invalid_parameter_error("laplace scale must be > 0");
  return rng.laplace(scale);
}

inline double sample_gaussian(double sigma, Rng& rng) {
  if (sigma <= 0) throw invalid_parameter_error("gaussian sigma must be > 0");
  return rng.gaussian(sigma);
}

// One privacy budget in a single accounting flavor.
struct PrivacyBudget {
  BudgetKind kind = BudgetKind::pure;
  double epsilon = 0.0;
  double rho = 0.0;
  double delta = 0.0;

  static PrivacyBudget pure(double epsilon) {
    if (epsilon < 0) throw invalid_parameter_error("epsilon must be >= 0");
    PrivacyBudget b;
    b.kind = BudgetKind::pure;
    b.epsilon = epsilon;
    return b;
  }

  static PrivacyBudget zcdp(double rho) {
    if (rho < 0) throw invalid_parameter_error("rho must be >= 0");
    PrivacyBudget b;
    b.kind = BudgetKind::zcdp;
    b.rho = rho;
    return b;
  }

  static PrivacyBudget approx(double epsilon, double delta) {
    if (epsilon < 0) throw invalid_parameter_error("epsilon must be >= 0");
    if (!(delta > 0 && delta < 0.5)) throw invalid_parameter_error("delta must be in (0, 1/2)");
    PrivacyBudget b;
    b.kind = BudgetKind::approx;
    b.epsilon = epsilon;
    b.delta = delta;
    return b;
  }

  // epsilon for pure, rho for zcdp; approx budgets convert first.
  double magnitude() const {
    switch (kind) {
      case BudgetKind::pure: return epsilon;
      case BudgetKind::zcdp: return rho;
      case BudgetKind::approx: return approx_to_zcdp(epsilon, delta);
    }
    return 0.0;
  }

  // Approx budgets account as zCDP internally; pure and zcdp pass through.
  PrivacyBudget effective() const {
    if (kind == BudgetKind::approx) return zcdp(approx_to_zcdp(epsilon, delta));
    return *this;
  }

  // fraction of this budget, in the effective accounting flavor
  PrivacyBudget scaled(double fraction) const {
    if (!(fraction >= 0 && fraction <= 1))
      throw invalid_parameter_error("budget fraction must be in [0,1]");
    const PrivacyBudget eff = effective();
    if (eff.kind == BudgetKind::pure) return pure(eff.epsilon * fraction);
    return zcdp(eff.rho * fraction);
  }
};

// Disables noise injection for oracle-equivalence tests. Never enable this
// outside tests: outputs are not private with noise off.
class MechanismOptions {
 public:
  MechanismOptions() = default;

  static MechanismOptions unsafe_noise_disabled_for_testing() {
    MechanismOptions o;
    o.noise_disabled_ = true;
    return o;
  }

  bool noise_disabled() const { return noise_disabled_; }

 private:
  bool noise_disabled_ = false;
};

struct SpendEvent {
  std::string label;
  double amount;  // in ledger units (epsilon for pure, rho for zcdp)
};

struct LedgerAudit {
  BudgetKind unit;
  double declared;
  double consumed;
  std::vector<SpendEvent> events;
};

// Additive privacy accountant. Spends are serialized and atomic; a spend
// that would exceed the declared total throws without changing state.
class BudgetLedger {
 public:
  explicit BudgetLedger(const PrivacyBudget& total)
      : declared_(total), effective_(total.effective()) {}

  BudgetKind unit() const { return effective_.kind; }
  const PrivacyBudget& declared_budget() const { return declared_; }
  double declared() const { return effective_.magnitude(); }

  double consumed() const {
    std::lock_guard<std::mutex> lock(mu_);
    return consumed_;
  }

  void spend(double amount, const std::string& label) {
    if (amount < 0) throw invalid_parameter_error("cannot spend a negative budget");
    std::lock_guard<std::mutex> lock(mu_);
    if (consumed_ + amount > declared() + kTolerance)
      throw budget_exhausted_error("budget exhausted: spending " + std::to_string(amount) +
                                   " for '" + label + "' exceeds declared total");
    consumed_ += amount;
    events_.push_back(SpendEvent{label, amount});
  }

  void spend(const PrivacyBudget& share, const std::string& label) {
    const PrivacyBudget eff = share.effective();
    if (eff.kind != effective_.kind)
      throw invalid_parameter_error("budget share flavor does not match ledger");
    spend(eff.magnitude(), label);
  }

  LedgerAudit audit() const {
    std::lock_guard<std::mutex> lock(mu_);
    return LedgerAudit{effective_.kind, declared(), consumed_, events_};
  }

  static constexpr double kTolerance = 1e-12;

 private:
  PrivacyBudget declared_;
  PrivacyBudget effective_;
  double consumed_ = 0.0;
  mutable std::mutex mu_;
  std::vector<SpendEvent> events_;
};

}  // namespace rankagg
