#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "rankagg/generators.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"

namespace {

using namespace rankagg;

// oracle: direct O(m^2) loop over candidate pairs
long long kendall_oracle(const Ranking& a, const Ranking& b) {
  long long dist = 0;
  for (int u = 1; u <= a.m(); ++u)
    for (int v = u + 1; v <= a.m(); ++v)
      if ((a.position(u) < a.position(v)) != (b.position(u) < b.position(v))) ++dist;
  return dist;
}

// oracle: O(m^2) inversion count of a plain sequence
long long inversion_oracle(const std::vector<int>& seq) {
  long long inv = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++inv;
  return inv;
}

// oracle: enumerate all m! rankings and recompute avg_distance from scratch
BruteForceResult brute_oracle(const RankingDataset& data, Objective objective) {
  std::vector<int> pos(static_cast<std::size_t>(data.m()));
  std::iota(pos.begin(), pos.end(), 1);
  Ranking best(pos);
  double best_value = avg_distance(best, data, objective);
  while (std::next_permutation(pos.begin(), pos.end())) {
    Ranking candidate(pos);
    const double value = avg_distance(candidate, data, objective);
    if (value < best_value) {
      best_value = value;
      best = candidate;
    }
  }
  return BruteForceResult{best, best_value};
}

RankingDataset random_dataset(int m, std::size_t n, Rng& rng) {
  RankingDataset data(m);
  for (std::size_t i = 0; i < n; ++i) data.add(uniform_random_ranking(m, rng));
  return data;
}

}  // namespace

TEST_CASE("ranking validation and views", "[core]") {
  REQUIRE_THROWS_AS(Ranking({}), invalid_input_error);
  REQUIRE_THROWS_AS(Ranking({1, 1, 3}), invalid_input_error);
  REQUIRE_THROWS_AS(Ranking({0, 1, 2}), invalid_input_error);
  REQUIRE_THROWS_AS(Ranking({1, 2, 4}), invalid_input_error);

  const Ranking r({2, 3, 1});
  REQUIRE(r.m() == 3);
  REQUIRE(r.position(1) == 2);
  REQUIRE(r.order() == std::vector<int>{3, 1, 2});
  REQUIRE(Ranking::from_order({3, 1, 2}) == r);
  REQUIRE(r.inverse().inverse() == r);
  REQUIRE(Ranking::identity(4) == Ranking({1, 2, 3, 4}));
  REQUIRE(Ranking::reversed(4) == Ranking({4, 3, 2, 1}));
  REQUIRE(r.to_string() == "2 3 1");
}

TEST_CASE("dataset validation", "[core]") {
  RankingDataset data(3);
  data.add(Ranking::identity(3));
  REQUIRE_THROWS_AS(data.add(Ranking::identity(4)), invalid_input_error);
  REQUIRE(data.n() == 1);
  REQUIRE_THROWS_AS(RankingDataset::from_rankings({}), invalid_input_error);
  REQUIRE_THROWS_AS(
      RankingDataset::from_rankings({Ranking::identity(3), Ranking::identity(2)}),
      invalid_input_error);
}

TEST_CASE("kendall tau on pinned cases", "[core]") {
  REQUIRE(kendall_tau(Ranking::identity(4), Ranking::identity(4)) == 0);
  REQUIRE(kendall_tau(Ranking::identity(4), Ranking::reversed(4)) == 6);
  REQUIRE(kendall_tau(Ranking({1, 3, 2}), Ranking({1, 2, 3})) == 1);
  REQUIRE_THROWS_AS(kendall_tau(Ranking::identity(3), Ranking::identity(4)), invalid_input_error);
}

TEST_CASE("kendall tau matches pair-loop oracle", "[core]") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 199));
    const Ranking a = uniform_random_ranking(m, rng);
    const Ranking b = uniform_random_ranking(m, rng);
    REQUIRE(kendall_tau(a, b) == kendall_oracle(a, b));
    REQUIRE(kendall_tau(a, b) == kendall_tau(b, a));
    REQUIRE((kendall_tau(a, b) == 0) == (a == b));
  }
}

TEST_CASE("kendall tau vs inversion count of the order sequence", "[core]") {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 198));
    const Ranking b = uniform_random_ranking(m, rng);
    REQUIRE(kendall_tau(Ranking::identity(m), b) == inversion_oracle(b.order()));
  }
}

TEST_CASE("footrule on pinned cases", "[core]") {
  REQUIRE(footrule(Ranking::identity(4), Ranking::identity(4)) == 0);
  REQUIRE(footrule(Ranking::identity(4), Ranking::reversed(4)) == 8);
  REQUIRE_THROWS_AS(footrule(Ranking::identity(3), Ranking::identity(4)), invalid_input_error);
}

TEST_CASE("kendall-footrule sandwich on random pairs", "[core]") {
  Rng rng(103);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 29));
    const Ranking a = uniform_random_ranking(m, rng);
    const Ranking b = uniform_random_ranking(m, rng);
    const long long k = kendall_tau(a, b);
    const long long f = footrule(a, b);
    REQUIRE(k <= f);
    REQUIRE(f <= 2 * k);
    REQUIRE(footrule(a, b) == footrule(b, a));
    REQUIRE((f == 0) == (a == b));
  }
}

TEST_CASE("avg distance on pinned cases", "[core]") {
  const auto data = RankingDataset::from_rankings({Ranking::identity(4), Ranking::reversed(4)});
  REQUIRE(avg_distance(Ranking::identity(4), data, Objective::kemeny) == 3.0);
  REQUIRE(avg_distance(Ranking::identity(4), data, Objective::footrule) == 4.0);
  const auto same = RankingDataset::from_rankings({Ranking::identity(4), Ranking::identity(4)});
  REQUIRE(avg_distance(Ranking::identity(4), same, Objective::kemeny) == 0.0);
  RankingDataset empty(4);
  REQUIRE_THROWS_AS(avg_distance(Ranking::identity(4), empty, Objective::kemeny),
                    invalid_input_error);
}

TEST_CASE("pairwise matrix pinned cases", "[core]") {
  const auto single = RankingDataset::from_rankings({Ranking::identity(3)});
  const PairwiseMatrix w1 = pairwise_matrix(single);
  REQUIRE(w1.at(1, 2) == 1.0);
  REQUIRE(w1.at(1, 3) == 1.0);
  REQUIRE(w1.at(2, 3) == 1.0);
  REQUIRE(w1.at(2, 1) == 0.0);
  REQUIRE(w1.at(3, 1) == 0.0);
  REQUIRE(w1.at(3, 2) == 0.0);
  REQUIRE(w1.at(1, 1) == 0.0);

  const auto pair = RankingDataset::from_rankings({Ranking::identity(3), Ranking::reversed(3)});
  const PairwiseMatrix w2 = pairwise_matrix(pair);
  for (int u = 1; u <= 3; ++u)
    for (int v = 1; v <= 3; ++v)
      if (u != v) REQUIRE(w2.at(u, v) == 0.5);
}

TEST_CASE("pairwise matrix matches triple-loop oracle and is complementary", "[core]") {
  Rng rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 9));
    const RankingDataset data = random_dataset(m, n, rng);
    const PairwiseMatrix w = pairwise_matrix(data);
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v) {
        if (u == v) {
          REQUIRE(w.at(u, v) == 0.0);
          continue;
        }
        double count = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (data[i].position(u) < data[i].position(v)) count += 1.0;
        REQUIRE_THAT(w.at(u, v),
                     Catch::Matchers::WithinAbs(count / static_cast<double>(n), 1e-12));
        if (u < v)
          REQUIRE_THAT(w.at(u, v) + w.at(v, u), Catch::Matchers::WithinAbs(1.0, 1e-12));
      }
  }
}

TEST_CASE("kemeny cost identity against the pairwise matrix", "[core]") {
  Rng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const RankingDataset data = random_dataset(m, 5, rng);
    const PairwiseMatrix w = pairwise_matrix(data);
    const Ranking psi = uniform_random_ranking(m, rng);
    REQUIRE_THAT(kemeny_cost_from_pairwise(psi, w),
                 Catch::Matchers::WithinAbs(avg_distance(psi, data, Objective::kemeny), 1e-12));
  }
}

TEST_CASE("brute force optimum pinned cases", "[core]") {
  const auto unanimous = RankingDataset::from_rankings(
      {Ranking::identity(3), Ranking::identity(3), Ranking::identity(3)});
  REQUIRE(brute_force_optimal(unanimous, Objective::kemeny).ranking == Ranking::identity(3));
  REQUIRE(brute_force_optimal(unanimous, Objective::footrule).ranking == Ranking::identity(3));

  const auto skewed = RankingDataset::from_rankings(
      {Ranking({1, 2, 3}), Ranking({1, 2, 3}), Ranking({3, 2, 1})});
  const BruteForceResult r = brute_force_optimal(skewed, Objective::kemeny);
  REQUIRE(r.ranking == Ranking({1, 2, 3}));
  REQUIRE(r.value == 1.0);

  RankingDataset big(11);
  big.add(Ranking::identity(11));
  REQUIRE_THROWS_AS(brute_force_optimal(big, Objective::kemeny), unsupported_size_error);
}

TEST_CASE("brute force optimum matches independent enumeration oracle", "[core]") {
  Rng rng(106);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 3));
    const RankingDataset data = random_dataset(m, 5, rng);
    for (Objective obj : {Objective::kemeny, Objective::footrule}) {
      const BruteForceResult fast = brute_force_optimal(data, obj);
      const BruteForceResult slow = brute_oracle(data, obj);
      REQUIRE(fast.ranking == slow.ranking);
      REQUIRE_THAT(fast.value, Catch::Matchers::WithinAbs(slow.value, 1e-12));
    }
  }
}

TEST_CASE("brute force optimum is no worse than sampled rankings", "[core]") {
  Rng rng(107);
  const RankingDataset data = random_dataset(5, 7, rng);
  const BruteForceResult opt = brute_force_optimal(data, Objective::kemeny);
  for (int trial = 0; trial < 100; ++trial) {
    const Ranking candidate = uniform_random_ranking(5, rng);
    REQUIRE(opt.value <= avg_distance(candidate, data, Objective::kemeny) + 1e-12);
  }
}

TEST_CASE("opt value is reported only at enumerable sizes", "[core]") {
  Rng rng(108);
  const RankingDataset small = random_dataset(4, 3, rng);
  const auto value = opt_if_computable(small, Objective::kemeny);
  REQUIRE(value.has_value());
  REQUIRE_THAT(*value,
               Catch::Matchers::WithinAbs(brute_force_optimal(small, Objective::kemeny).value, 0.0));
  const RankingDataset big = random_dataset(10, 3, rng);
  REQUIRE_FALSE(opt_if_computable(big, Objective::kemeny).has_value());
}

TEST_CASE("clip projection closed form matches 1-D grid search", "[dp]") {
  REQUIRE_THAT(clip_pair(0.3, 0.7), Catch::Matchers::WithinAbs(0.3, 1e-12));
  REQUIRE(clip_pair(1.2, -0.1) == 1.0);
  Rng rng(109);
  for (int trial = 0; trial < 400; ++trial) {
    const double x = -1.5 + 3.0 * rng.uniform01();
    const double y = -1.5 + 3.0 * rng.uniform01();
    const double a = clip_pair(x, y);
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
    const double obj = std::abs(a - x) + std::abs((1.0 - a) - y);
    double best = 1e300;
    for (int k = 0; k <= 10000; ++k) {
      const double cand = static_cast<double>(k) / 10000.0;
      best = std::min(best, std::abs(cand - x) + std::abs((1.0 - cand) - y));
    }
    REQUIRE_THAT(obj, Catch::Matchers::WithinAbs(best, 1e-3));
    // idempotence: the projected pair is a fixed point
    REQUIRE_THAT(clip_pair(a, 1.0 - a), Catch::Matchers::WithinAbs(a, 1e-12));
  }
}

TEST_CASE("clip at most doubles the l1 distance to feasible matrices", "[dp]") {
  Rng rng(110);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 4));
    // random feasible w, random perturbation
    PairwiseMatrix w(m), noisy(m);
    for (int u = 1; u <= m; ++u)
      for (int v = u + 1; v <= m; ++v) {
        const double a = rng.uniform01();
        w.at(u, v) = a;
        w.at(v, u) = 1.0 - a;
        noisy.at(u, v) = a + (rng.uniform01() - 0.5);
        noisy.at(v, u) = (1.0 - a) + (rng.uniform01() - 0.5);
      }
    const PairwiseMatrix clipped = clip_to_feasible(noisy);
    double dist_before = 0, dist_after = 0;
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v)
        if (u != v) {
          dist_before += std::abs(noisy.at(u, v) - w.at(u, v));
          dist_after += std::abs(clipped.at(u, v) - w.at(u, v));
        }
    REQUIRE(dist_after <= 2.0 * dist_before + 1e-12);
    // feasibility and idempotence of the matrix form
    const PairwiseMatrix twice = clip_to_feasible(clipped);
    for (int u = 1; u <= m; ++u)
      for (int v = u + 1; v <= m; ++v) {
        REQUIRE(clipped.at(u, v) >= 0.0);
        REQUIRE(clipped.at(u, v) <= 1.0);
        REQUIRE_THAT(clipped.at(u, v) + clipped.at(v, u), Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(twice.at(u, v), Catch::Matchers::WithinAbs(clipped.at(u, v), 1e-12));
      }
  }
}
