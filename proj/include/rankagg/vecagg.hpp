#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/random.hpp"

namespace rankagg {

enum class LdpMechanism { laplace, sphere };

// Sink for simulated LDP message logs (one call per user).
using MessageSink =
    std::function<void(std::size_t user, std::uint64_t seed, const std::vector<double>& message)>;

struct VecAggBackend {
  PrivacyModel model = PrivacyModel::pure;
  LdpMechanism ldp_mechanism = LdpMechanism::laplace;
  MechanismOptions options;
  MessageSink message_sink;  // optional, LDP only
};

// true if the backend's sensitivity accounting is in l1 (Laplace) rather
// than l2 (Gaussian / local randomizer)
inline bool uses_l1_norm(PrivacyModel model) { return model == PrivacyModel::pure; }

// One private mean-vector release: d coordinates, n contributors, per-user
// norm at most norm_bound (l1 for pure, l2 otherwise).
struct VecAggRequest {
  std::size_t d = 0;
  std::size_t n = 0;
  double norm_bound = 0.0;
  PrivacyBudget share;
};

// Per-user contribution as sparse (coordinate, value) pairs, 0-indexed.
using SparseVector = std::vector<std::pair<std::size_t, double>>;
using ContributionFn = std::function<void(std::size_t user, SparseVector& out)>;

namespace detail {

inline void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

inline double sparse_norm(const SparseVector& v, bool l1) {
  double acc = 0;
  for (const auto& [c, x] : v) acc += l1 ? std::abs(x) : x * x;
  return l1 ? acc : std::sqrt(acc);
}

inline double dense_norm(const std::vector<double>& v, bool l1) {
  double acc = 0;
  for (double x : v) acc += l1 ? std::abs(x) : x * x;
  return l1 ? acc : std::sqrt(acc);
}

// mean absolute value of one coordinate of a uniform point on the unit
// (d-1)-sphere: 2*Gamma(d/2) / ((d-1)*sqrt(pi)*Gamma((d-1)/2))
inline double sphere_coordinate_mean(std::size_t d) {
  if (d == 1) return 1.0;
  const double dd = static_cast<double>(d);
  return std::exp(std::log(2.0) + std::lgamma(dd / 2.0) - std::log(dd - 1.0) -
                  0.5 * std::log(std::numbers::pi) - std::lgamma((dd - 1.0) / 2.0));
}

inline std::vector<double> sample_unit_sphere(std::size_t d, Rng& rng) {
  std::vector<double> z(d);
  double norm2 = 0;
  do {
    norm2 = 0;
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = rng.gaussian(1.0);
      norm2 += z[j] * z[j];
    }
  } while (norm2 == 0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : z) x *= inv;
  return z;
}

// scales v in place to the norm ball of radius c; returns true if clipped
inline bool clip_to_ball(std::vector<double>& v, double c, bool l1) {
  const double norm = dense_norm(v, l1);
  if (norm <= c * (1 + 1e-9)) return false;
  const double s = c / norm;
  for (double& x : v) x *= s;
  return true;
}

}  // namespace detail

// Mean of the input vectors plus i.i.d. Laplace noise of scale 2C/(eps*n)
// per coordinate; each ||v_i||_1 must be <= C (violations scaled down).
inline std::vector<double> aggregate_laplace(const std::vector<std::vector<double>>& vectors,
                                             double c, double epsilon, Rng& rng,
                                             const MechanismOptions& options = {}) {
  if (vectors.empty()) throw invalid_input_error("no vectors to aggregate");
  if (c <= 0) throw invalid_parameter_error("norm bound must be > 0");
  if (epsilon <= 0 && !options.noise_disabled())
    throw invalid_parameter_error("epsilon must be > 0");
  const std::size_t d = vectors.front().size();
  const std::size_t n = vectors.size();
  std::vector<double> mean(d, 0.0);
  std::size_t clipped = 0;
  for (std::vector<double> v : vectors) {
    if (v.size() != d) throw invalid_input_error("vectors must share dimension");
    if (detail::clip_to_ball(v, c, /*l1=*/true)) ++clipped;
    for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
  }
  if (clipped) detail::warn(std::to_string(clipped) + " contribution(s) exceeded the l1 bound; scaled down");
  for (double& x : mean) x /= static_cast<double>(n);
  if (!options.noise_disabled()) {
    const double scale = 2.0 * c / (epsilon * static_cast<double>(n));
    for (double& x : mean) x += rng.laplace(scale);
  }
  return mean;
}

// Mean plus i.i.d. Gaussian noise with sigma = (2C/n)/sqrt(2*rho) per
// coordinate; each ||v_i||_2 must be <= C.
inline std::vector<double> aggregate_gaussian(const std::vector<std::vector<double>>& vectors,
                                              double c, double rho, Rng& rng,
                                              const MechanismOptions& options = {}) {
  if (vectors.empty()) throw invalid_input_error("no vectors to aggregate");
  if (c <= 0) throw invalid_parameter_error("norm bound must be > 0");
  if (rho <= 0 && !options.noise_disabled())
    throw invalid_parameter_error("rho must be > 0");
  const std::size_t d = vectors.front().size();
  const std::size_t n = vectors.size();
  std::vector<double> mean(d, 0.0);
  std::size_t clipped = 0;
  for (std::vector<double> v : vectors) {
    if (v.size() != d) throw invalid_input_error("vectors must share dimension");
    if (detail::clip_to_ball(v, c, /*l1=*/false)) ++clipped;
    for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
  }
  if (clipped) detail::warn(std::to_string(clipped) + " contribution(s) exceeded the l2 bound; scaled down");
  for (double& x : mean) x /= static_cast<double>(n);
  if (!options.noise_disabled()) {
    const double sigma = gaussian_sigma_for_zcdp(2.0 * c / static_cast<double>(n), rho);
    for (double& x : mean) x += rng.gaussian(sigma);
  }
  return mean;
}

// One user's eps-LDP report with E[message] = v; ||v||_2 must be <= C.
// laplace: embed the l2 ball in the l1 ball of radius sqrt(d)*C and add
// per-coordinate Laplace of scale 2*sqrt(d)*C/eps. sphere: project v onto
// a random unit direction with v-dependent sign bias, flip the hemisphere
// with probability 1/(1+e^eps), and rescale to debias.
inline std::vector<double> ldp_randomize(const std::vector<double>& v, double c, double epsilon,
                                         Rng& rng, LdpMechanism mechanism = LdpMechanism::laplace,
                                         const MechanismOptions& options = {}) {
  if (c <= 0) throw invalid_parameter_error("norm bound must be > 0");
  if (epsilon <= 0 && !options.noise_disabled())
    throw invalid_parameter_error("epsilon must be > 0");
  if (v.empty()) throw invalid_input_error("empty vector");
  const std::size_t d = v.size();
  std::vector<double> x = v;
  if (detail::clip_to_ball(x, c, /*l1=*/false))
    detail::warn("LDP input exceeded the l2 bound; scaled down");
  if (options.noise_disabled()) return x;

  if (mechanism == LdpMechanism::laplace) {
    const double scale = 2.0 * std::sqrt(static_cast<double>(d)) * c / epsilon;
    for (double& xi : x) xi += rng.laplace(scale);
    return x;
  }

  // sphere mechanism
  const double norm = detail::dense_norm(x, /*l1=*/false);
  std::vector<double> direction(d, 0.0);
  if (norm > 0)
    for (std::size_t j = 0; j < d; ++j) direction[j] = x[j] / norm;
  else
    direction[0] = 1.0;
  const double p_aligned = 0.5 + norm / (2.0 * c);
  const double dir_sign = rng.bernoulli(p_aligned) ? 1.0 : -1.0;
  const double p_keep = std::exp(epsilon) / (1.0 + std::exp(epsilon));
  const double hemi_sign = rng.bernoulli(p_keep) ? 1.0 : -1.0;

  std::vector<double> z = detail::sample_unit_sphere(d, rng);
  double dot = 0;
  for (std::size_t j = 0; j < d; ++j) dot += z[j] * direction[j];
  const double orient = (dot < 0 ? -1.0 : 1.0) * dir_sign * hemi_sign;
  const double debias = c / (detail::sphere_coordinate_mean(d) * (2.0 * p_keep - 1.0));
  for (double& zj : z) zj *= orient * debias;
  return z;
}

// Analyst side of the local protocol: the plain mean of the reports.
inline std::vector<double> ldp_analyze(const std::vector<std::vector<double>>& messages) {
  if (messages.empty()) throw invalid_input_error("no messages to analyze");
  const std::size_t d = messages.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& msg : messages) {
    if (msg.size() != d) throw invalid_input_error("messages must share dimension");
    for (std::size_t j = 0; j < d; ++j) mean[j] += msg[j];
  }
  for (double& x : mean) x /= static_cast<double>(messages.size());
  return mean;
}

// Single private release of the mean of n sparse per-user contributions.
// Spends the request's budget share on the ledger up front, then runs the
// backend matching the model. Central models see only the summed vector;
// the LDP model randomizes each user's densified contribution separately.
inline std::vector<double> aggregate_contributions(const ContributionFn& contribution,
                                                   const VecAggRequest& request,
                                                   const VecAggBackend& backend,
                                                   BudgetLedger& ledger, Rng& rng,
                                                   const std::string& label = "vecagg") {
  if (request.d == 0) throw invalid_parameter_error("dimension must be >= 1");
  if (request.n == 0) throw invalid_input_error("no contributors");
  if (request.norm_bound <= 0) throw invalid_parameter_error("norm bound must be > 0");
  const PrivacyBudget share = request.share.effective();
  const bool l1 = uses_l1_norm(backend.model);
  if (backend.model == PrivacyModel::pure || backend.model == PrivacyModel::ldp) {
    if (share.kind != BudgetKind::pure)
      throw invalid_parameter_error("pure/ldp backends need an epsilon budget share");
  } else if (share.kind != BudgetKind::zcdp) {
    throw invalid_parameter_error("zcdp/approx backends need a zcdp budget share");
  }
  if (share.magnitude() <= 0 && !backend.options.noise_disabled())
    throw invalid_parameter_error("budget share must be > 0");
  ledger.spend(share, label);

  const double c = request.norm_bound;
  std::vector<double> mean(request.d, 0.0);
  SparseVector buf;

  if (backend.model == PrivacyModel::ldp && !backend.options.noise_disabled()) {
    // Each release gets its own family of per-user noise streams. Reusing one
    // seed for two randomized messages from the same user would let their
    // difference cancel the noise entirely.
    Rng release_rng = rng.fork();
    std::vector<double> dense(request.d);
    for (std::size_t i = 0; i < request.n; ++i) {
      buf.clear();
      contribution(i, buf);
      std::fill(dense.begin(), dense.end(), 0.0);
      for (const auto& [coord, val] : buf) {
        if (coord >= request.d) throw invalid_input_error("contribution coordinate out of range");
        dense[coord] += val;
      }
      Rng user_rng = release_rng.child(i);
      const std::vector<double> msg =
          ldp_randomize(dense, c, share.epsilon, user_rng, backend.ldp_mechanism);
      if (backend.message_sink) backend.message_sink(i, user_rng.seed(), msg);
      for (std::size_t j = 0; j < request.d; ++j) mean[j] += msg[j];
    }
    for (double& x : mean) x /= static_cast<double>(request.n);
    return mean;
  }

  std::size_t clipped = 0;
  for (std::size_t i = 0; i < request.n; ++i) {
    buf.clear();
    contribution(i, buf);
    const double norm = detail::sparse_norm(buf, l1);
    double scale = 1.0;
    if (norm > c * (1 + 1e-9)) {
      scale = c / norm;
      ++clipped;
    }
    for (const auto& [coord, val] : buf) {
      if (coord >= request.d) throw invalid_input_error("contribution coordinate out of range");
      mean[coord] += scale * val;
    }
  }
  if (clipped)
    detail::warn(std::to_string(clipped) + " contribution(s) exceeded the declared norm bound; scaled down");
  for (double& x : mean) x /= static_cast<double>(request.n);

  if (backend.options.noise_disabled()) return mean;
  if (backend.model == PrivacyModel::pure) {
    const double scale = 2.0 * c / (share.epsilon * static_cast<double>(request.n));
    for (double& x : mean) x += rng.laplace(scale);
  } else {
    const double sigma =
        gaussian_sigma_for_zcdp(2.0 * c / static_cast<double>(request.n), share.rho);
    for (double& x : mean) x += rng.gaussian(sigma);
  }
  return mean;
}

}  // namespace rankagg
