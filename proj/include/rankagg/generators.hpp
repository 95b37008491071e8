#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rankagg/errors.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

inline Ranking uniform_random_ranking(int m, Rng& rng) {
  std::vector<int> pos(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pos[static_cast<std::size_t>(i)] = i + 1;
  for (int i = m - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
    std::swap(pos[static_cast<std::size_t>(i)], pos[j]);
  }
  return Ranking(std::move(pos));
}

// One Mallows(phi) sample around `center` via repeated insertion: the
// center's i-th best candidate lands at insertion slot j <= i with
// probability proportional to phi^(i-j). phi = 0 reproduces the center
// exactly; phi = 1 is uniform.
inline Ranking sample_mallows(const Ranking& center, double phi, Rng& rng) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw invalid_parameter_error("phi must lie in [0, 1]");
  const int m = center.m();
  const std::vector<int> center_order = center.order();
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(m));
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    double total = 0;
    for (int j = 1; j <= i; ++j) {
      double w = 1.0;
      for (int k = 0; k < i - j; ++k) w *= phi;
      weights[static_cast<std::size_t>(j - 1)] = w;
      total += w;
    }
    const double u = rng.uniform01() * total;
    double acc = 0;
    int slot = i;
    for (int j = 1; j <= i; ++j) {
      acc += weights[static_cast<std::size_t>(j - 1)];
      if (u < acc) {
        slot = j;
        break;
      }
    }
    order.insert(order.begin() + (slot - 1), center_order[static_cast<std::size_t>(i - 1)]);
  }
  return Ranking::from_order(order);
}

inline RankingDataset generate_mallows(int m, std::size_t n, double phi, const Ranking& center,
                                       Rng& rng) {
  if (center.m() != m) throw invalid_input_error("center must have m candidates");
  if (n == 0) throw invalid_input_error("need n >= 1");
  RankingDataset data(m);
  for (std::size_t i = 0; i < n; ++i) data.add(sample_mallows(center, phi, rng));
  return data;
}

enum class GeneratorKind { mallows, uniform, unanimous, adversarial_two_block };

inline std::string generator_name(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::mallows: return "mallows";
    case GeneratorKind::uniform: return "uniform";
    case GeneratorKind::unanimous: return "unanimous";
    case GeneratorKind::adversarial_two_block: return "adversarial-two-block";
  }
  return "?";
}

// reflect the ranking: position p becomes m + 1 - p
inline Ranking reverse_of(const Ranking& r) {
  std::vector<int> pos(static_cast<std::size_t>(r.m()));
  for (int c = 1; c <= r.m(); ++c)
    pos[static_cast<std::size_t>(c - 1)] = r.m() + 1 - r.position(c);
  return Ranking(std::move(pos));
}

inline RankingDataset generate_dataset(GeneratorKind kind, int m, std::size_t n, double phi,
                                       const Ranking& center, Rng& rng) {
  if (center.m() != m) throw invalid_input_error("center must have m candidates");
  if (n == 0) throw invalid_input_error("need n >= 1");
  RankingDataset data(m);
  switch (kind) {
    case GeneratorKind::mallows:
      for (std::size_t i = 0; i < n; ++i) data.add(sample_mallows(center, phi, rng));
      break;
    case GeneratorKind::uniform:
      for (std::size_t i = 0; i < n; ++i) data.add(uniform_random_ranking(m, rng));
      break;
    case GeneratorKind::unanimous:
      for (std::size_t i = 0; i < n; ++i) data.add(center);
      break;
    case GeneratorKind::adversarial_two_block: {
      const Ranking rev = reverse_of(center);
      const std::size_t half = (n + 1) / 2;
      for (std::size_t i = 0; i < n; ++i) data.add(i < half ? center : rev);
      break;
    }
  }
  return data;
}

}  // namespace rankagg
