#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "rankagg/generators.hpp"
#include "rankagg/kemeny_small_n.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/wfas.hpp"

namespace {

using namespace rankagg;

const MechanismOptions kNoNoise = MechanismOptions::unsafe_noise_disabled_for_testing();

RankingDataset random_dataset(int m, std::size_t n, Rng& rng) {
  RankingDataset data(m);
  for (std::size_t i = 0; i < n; ++i) data.add(uniform_random_ranking(m, rng));
  return data;
}

double matrix_l1(const PairwiseMatrix& a, const PairwiseMatrix& b) {
  double total = 0;
  for (int u = 1; u <= a.m(); ++u)
    for (int v = 1; v <= a.m(); ++v)
      if (u != v) total += std::abs(a.at(u, v) - b.at(u, v));
  return total;
}

}  // namespace

TEST_CASE("contiguous buckets are balanced and ordered", "[smalln]") {
  const BucketScheme s = BucketScheme::contiguous(10, 3);
  REQUIRE(s.sizes() == std::vector<int>{4, 3, 3});
  REQUIRE(s.bucket(1) == 1);
  REQUIRE(s.bucket(4) == 1);
  REQUIRE(s.bucket(5) == 2);
  REQUIRE(s.bucket(10) == 3);
  REQUIRE(s.same_bucket_pairs() == 6 + 3 + 3);

  for (int m : {1, 2, 7, 16, 33}) {
    for (int B = 1; B <= m; ++B) {
      const BucketScheme scheme = BucketScheme::contiguous(m, B);
      const std::vector<int> sizes = scheme.sizes();
      REQUIRE(static_cast<int>(sizes.size()) == B);
      int total = 0, min_size = m + 1, max_size = 0, prev = 1;
      for (int c : sizes) {
        REQUIRE(c >= 1);
        total += c;
        min_size = std::min(min_size, c);
        max_size = std::max(max_size, c);
      }
      REQUIRE(total == m);
      REQUIRE(max_size - min_size <= 1);
      REQUIRE(max_size <= (m + B - 1) / B);
      for (int p = 1; p <= m; ++p) {
        REQUIRE(scheme.bucket(p) >= prev);
        prev = scheme.bucket(p);
      }
      REQUIRE(prev == B);
    }
  }
  REQUIRE_THROWS_AS(BucketScheme::contiguous(5, 0), invalid_parameter_error);
  REQUIRE_THROWS_AS(BucketScheme::contiguous(5, 6), invalid_parameter_error);
}

TEST_CASE("bucket decomposition recovers the pairwise matrix", "[smalln]") {
  Rng rng(701);
  for (int trial = 0; trial < 15; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 8));
    const RankingDataset data = random_dataset(m, 1 + rng.uniform_int(0, 19), rng);
    const PairwiseMatrix w = pairwise_matrix(data);
    const int B = 1 + static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(m - 1)));
    const SplitST parts = split_s_t(data, BucketScheme::contiguous(m, B));
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v)
        if (u != v)
          REQUIRE_THAT(parts.s.at(u, v) + parts.t.at(u, v),
                       Catch::Matchers::WithinAbs(w.at(u, v), 1e-12));
  }
}

TEST_CASE("single and singleton bucket schemes are degenerate splits", "[smalln]") {
  Rng rng(702);
  const int m = 7;
  const RankingDataset data = random_dataset(m, 12, rng);
  const PairwiseMatrix w = pairwise_matrix(data);

  const SplitST one = split_s_t(data, BucketScheme::contiguous(m, 1));
  const SplitST singletons = split_s_t(data, BucketScheme::contiguous(m, m));
  for (int u = 1; u <= m; ++u)
    for (int v = 1; v <= m; ++v) {
      if (u == v) continue;
      REQUIRE(one.t.at(u, v) == 0.0);
      REQUIRE_THAT(one.s.at(u, v), Catch::Matchers::WithinAbs(w.at(u, v), 1e-12));
      REQUIRE(singletons.s.at(u, v) == 0.0);
      REQUIRE_THAT(singletons.t.at(u, v), Catch::Matchers::WithinAbs(w.at(u, v), 1e-12));
    }
}

TEST_CASE("the binary encoding has exactly one set coordinate per candidate", "[smalln]") {
  Rng rng(703);
  const int m = 9;
  const RankingDataset data = random_dataset(m, 8, rng);
  const BucketScheme scheme = BucketScheme::contiguous(m, 4);
  const MarginalEncoding enc = MarginalEncoding::build(data, scheme);
  REQUIRE(enc.d() == static_cast<std::size_t>(m) * 4);
  REQUIRE(enc.n() == 8);
  for (std::size_t i = 0; i < enc.n(); ++i) {
    const auto coords = enc.user_coordinates(i);
    REQUIRE(coords.size() == static_cast<std::size_t>(m));
    REQUIRE(std::set<std::size_t>(coords.begin(), coords.end()).size() == coords.size());
    for (std::size_t c : coords) REQUIRE(c < enc.d());
    for (int u = 1; u <= m; ++u)
      REQUIRE(enc.bucket_of(i, u) == scheme.bucket(data[i].position(u)));
  }
}

TEST_CASE("cross-bucket part equals the sum of its marginal queries", "[smalln]") {
  Rng rng(704);
  for (int B : {2, 3, 4}) {
    const int m = 12;
    const RankingDataset data = random_dataset(m, 15, rng);
    const BucketScheme scheme = BucketScheme::contiguous(m, B);
    const SplitST parts = split_s_t(data, scheme);
    const MarginalEncoding enc = MarginalEncoding::build(data, scheme);
    const std::vector<MarginalQuery> queries = all_cross_bucket_queries(m, B);
    REQUIRE(queries.size() ==
            static_cast<std::size_t>(m) * (m - 1) * (static_cast<std::size_t>(B) * (B - 1) / 2));
    const std::vector<double> q = marginal_truth(enc, queries);
    PairwiseMatrix t(m);
    for (std::size_t k = 0; k < queries.size(); ++k) t.at(queries[k].u, queries[k].v) += q[k];
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v)
        if (u != v)
          REQUIRE_THAT(t.at(u, v), Catch::Matchers::WithinAbs(parts.t.at(u, v), 1e-12));
  }
}

TEST_CASE("marginal truths on a unanimous dataset are indicator values", "[smalln]") {
  const int m = 6;
  Rng rng(705);
  const Ranking sigma = uniform_random_ranking(m, rng);
  RankingDataset data(m);
  for (int i = 0; i < 5; ++i) data.add(sigma);
  const BucketScheme scheme = BucketScheme::contiguous(m, 3);
  const MarginalEncoding enc = MarginalEncoding::build(data, scheme);
  const auto queries = all_cross_bucket_queries(m, 3);
  const auto q = marginal_truth(enc, queries);
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const bool matches = scheme.bucket(sigma.position(queries[k].u)) == queries[k].bu &&
                         scheme.bucket(sigma.position(queries[k].v)) == queries[k].bv;
    REQUIRE(q[k] == (matches ? 1.0 : 0.0));
  }
}

TEST_CASE("marginal truth validates its query set", "[smalln]") {
  Rng rng(706);
  const RankingDataset data = random_dataset(5, 4, rng);
  const MarginalEncoding enc = MarginalEncoding::build(data, BucketScheme::contiguous(5, 2));
  REQUIRE_THROWS_AS(marginal_truth(enc, {{1, 2, 2, 1}}), invalid_input_error);  // bu >= bv
  REQUIRE_THROWS_AS(marginal_truth(enc, {{1, 1, 1, 2}}), invalid_input_error);  // u == v
  REQUIRE_THROWS_AS(marginal_truth(enc, {{1, 1, 9, 2}}), invalid_input_error);  // v out of range
}

TEST_CASE("neighboring datasets move queries by less than the declared sensitivity",
          "[smalln]") {
  Rng rng(707);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 10));
    RankingDataset a = random_dataset(m, n, rng);
    RankingDataset b = a;
    b.replace(0, uniform_random_ranking(m, rng));
    const int B = 2 + static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(m - 2)));
    const BucketScheme scheme = BucketScheme::contiguous(m, B);
    const auto queries = all_cross_bucket_queries(m, B);
    const auto qa = marginal_truth(MarginalEncoding::build(a, scheme), queries);
    const auto qb = marginal_truth(MarginalEncoding::build(b, scheme), queries);
    double l1 = 0, l2 = 0;
    for (std::size_t k = 0; k < queries.size(); ++k) {
      const double d = std::abs(qa[k] - qb[k]);
      l1 += d;
      l2 += d * d;
    }
    const double nd = static_cast<double>(n);
    const double pair_bound = static_cast<double>(m) * (2.0 * m - 1.0);  // C(2m, 2)
    REQUIRE(l1 <= 2.0 * pair_bound / nd + 1e-9);
    REQUIRE(std::sqrt(l2) <= std::sqrt(2.0 * pair_bound) / nd + 1e-9);

    // the same-bucket part obeys its own declared sensitivities
    const SplitST sa = split_s_t(a, scheme);
    const SplitST sb = split_s_t(b, scheme);
    double s_l1 = 0, s_l2 = 0;
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v) {
        if (u == v) continue;
        const double d = std::abs(sa.s.at(u, v) - sb.s.at(u, v));
        s_l1 += d;
        s_l2 += d * d;
      }
    const double P = static_cast<double>(scheme.same_bucket_pairs());
    REQUIRE(s_l1 <= 2.0 * P / nd + 1e-9);
    REQUIRE(std::sqrt(s_l2) <= std::sqrt(2.0 * P) / nd + 1e-9);
  }
}

TEST_CASE("baseline with noise disabled returns exact marginals and still spends", "[smalln]") {
  Rng rng(708);
  const RankingDataset data = random_dataset(8, 10, rng);
  const BucketScheme scheme = BucketScheme::contiguous(8, 3);
  const MarginalEncoding enc = MarginalEncoding::build(data, scheme);
  const auto queries = all_cross_bucket_queries(8, 3);
  BudgetLedger ledger(PrivacyBudget::zcdp(0.4));
  const auto q = two_marginal_baseline(enc, queries, PrivacyBudget::zcdp(0.4), ledger, rng,
                                       kNoNoise);
  REQUIRE(q == marginal_truth(enc, queries));
  REQUIRE_THAT(ledger.consumed(), Catch::Matchers::WithinAbs(0.4, 1e-12));
}

TEST_CASE("noiseless bucketed estimate reproduces the pairwise matrix", "[smalln]") {
  Rng rng(709);
  for (int B : {1, 2, 3, 7}) {
    const int m = 7;
    const RankingDataset data = random_dataset(m, 11, rng);
    const PairwiseMatrix w = pairwise_matrix(data);
    BudgetLedger ledger(PrivacyBudget::zcdp(1.0));
    SmallNConfig config;
    config.options = kNoNoise;
    const PairwiseMatrix est =
        estimate_w_small_n(data, PrivacyBudget::zcdp(1.0), B, ledger, rng, config);
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v)
        if (u != v) REQUIRE_THAT(est.at(u, v), Catch::Matchers::WithinAbs(w.at(u, v), 1e-12));
    REQUIRE_THAT(ledger.consumed(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE(ledger.audit().events.size() == 2);
  }
}

TEST_CASE("single bucket sends no marginal queries to the backend", "[smalln]") {
  Rng rng(710);
  const RankingDataset data = random_dataset(6, 9, rng);
  std::size_t backend_calls = 0, backend_queries = 99;
  SmallNConfig config;
  config.marginal = [&](const MarginalEncoding& enc, const std::vector<MarginalQuery>& queries,
                        const PrivacyBudget& share, BudgetLedger& ledger, Rng&) {
    ++backend_calls;
    backend_queries = queries.size();
    ledger.spend(share, "marginals");
    return marginal_truth(enc, queries);
  };
  BudgetLedger ledger(PrivacyBudget::pure(1.0));
  const PairwiseMatrix est =
      estimate_w_small_n(data, PrivacyBudget::pure(1.0), 1, ledger, rng, config);
  REQUIRE(backend_calls == 1);
  REQUIRE(backend_queries == 0);
  // with B=1 the cross-bucket part vanishes and only the direct noising of
  // the full matrix remains
  for (int u = 1; u <= 6; ++u)
    for (int v = u + 1; v <= 6; ++v)
      REQUIRE_THAT(est.at(u, v) + est.at(v, u), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("custom marginal backend receives the full cross-bucket query set", "[smalln]") {
  Rng rng(711);
  const RankingDataset data = random_dataset(8, 9, rng);
  std::vector<MarginalQuery> seen;
  SmallNConfig config;
  config.options = kNoNoise;
  config.marginal = [&](const MarginalEncoding& enc, const std::vector<MarginalQuery>& queries,
                        const PrivacyBudget& share, BudgetLedger& ledger, Rng&) {
    seen = queries;
    ledger.spend(share, "marginals");
    return marginal_truth(enc, queries);
  };
  BudgetLedger ledger(PrivacyBudget::zcdp(0.8));
  estimate_w_small_n(data, PrivacyBudget::zcdp(0.8), 4, ledger, rng, config);
  REQUIRE(seen.size() == 8u * 7u * 6u);  // m(m-1) * C(B,2)
  REQUIRE_THAT(ledger.consumed(), Catch::Matchers::WithinAbs(0.8, 1e-12));
}

TEST_CASE("noisy estimates stay in the feasible polytope", "[smalln]") {
  Rng rng(712);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_int(0, 5));
    const RankingDataset data = random_dataset(m, 20, rng);
    BudgetLedger ledger(PrivacyBudget::zcdp(0.5));
    const PairwiseMatrix est =
        estimate_w_small_n(data, PrivacyBudget::zcdp(0.5), 2, ledger, rng);
    for (int u = 1; u <= m; ++u)
      for (int v = u + 1; v <= m; ++v) {
        REQUIRE(est.at(u, v) >= -1e-12);
        REQUIRE(est.at(u, v) <= 1.0 + 1e-12);
        REQUIRE_THAT(est.at(u, v) + est.at(v, u), Catch::Matchers::WithinAbs(1.0, 1e-12));
      }
  }
}

TEST_CASE("noiseless estimate plus exact solver recovers a kemeny optimum", "[smalln]") {
  Rng rng(713);
  for (int trial = 0; trial < 12; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_int(0, 5));
    const RankingDataset data = random_dataset(m, 1 + rng.uniform_int(0, 12), rng);
    BudgetLedger ledger(PrivacyBudget::zcdp(1.0));
    SmallNConfig config;
    config.options = kNoNoise;
    const PairwiseMatrix est =
        estimate_w_small_n(data, PrivacyBudget::zcdp(1.0), 2 > m ? 1 : 2, ledger, rng, config);
    const Ranking pi = solve_bounded(WfasInstance::from_pairwise(est));
    const double opt = brute_force_optimal(data, Objective::kemeny).value;
    REQUIRE_THAT(avg_distance(pi, data, Objective::kemeny),
                 Catch::Matchers::WithinAbs(opt, 1e-9));
  }
}

TEST_CASE("default bucket count follows the closed form", "[smalln]") {
  REQUIRE(default_bucket_count(1024, 1024, PrivacyBudget::zcdp(1.0)) == 2);
  REQUIRE(default_bucket_count(128, 128, PrivacyBudget::pure(1.0)) == 4);
  Rng rng(714);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 400));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 100000));
    const double mag = 0.01 + 4.0 * rng.uniform01();
    const int bz = default_bucket_count(m, n, PrivacyBudget::zcdp(mag));
    const int bp = default_bucket_count(m, n, PrivacyBudget::pure(mag));
    REQUIRE(bz >= 1);
    REQUIRE(bz <= m);
    REQUIRE(bp >= 1);
    REQUIRE(bp <= m);
  }
  // huge n or budget pushes toward one bucket
  REQUIRE(default_bucket_count(8, 100000000, PrivacyBudget::zcdp(10.0)) == 1);
}

TEST_CASE("small-n regime limit matches the closed forms", "[smalln]") {
  REQUIRE_THAT(small_n_limit(16, PrivacyBudget::zcdp(1.0)),
               Catch::Matchers::WithinAbs(64.0, 1e-9));
  REQUIRE_THAT(small_n_limit(16, PrivacyBudget::zcdp(4.0)),
               Catch::Matchers::WithinAbs(32.0, 1e-9));
  REQUIRE_THAT(small_n_limit(10, PrivacyBudget::pure(2.0)),
               Catch::Matchers::WithinAbs(500.0, 1e-9));
}

TEST_CASE("baseline estimator error grows toward the all-singleton extreme", "[smalln]") {
  // With the direct-noise marginal baseline, pushing comparisons into the
  // cross-bucket path costs more noise per entry, so few buckets beat many.
  Rng rng(715);
  const int m = 12;
  const std::size_t n = 1024;
  const PrivacyBudget budget = PrivacyBudget::zcdp(1.0);
  auto mean_error = [&](int B, int trials) {
    double acc = 0;
    for (int t = 0; t < trials; ++t) {
      const RankingDataset data = random_dataset(m, n, rng);
      const PairwiseMatrix w = pairwise_matrix(data);
      BudgetLedger ledger(budget);
      acc += matrix_l1(estimate_w_small_n(data, budget, B, ledger, rng), w);
    }
    return acc / trials;
  };
  REQUIRE(mean_error(1, 10) < mean_error(m, 10));
}

TEST_CASE("bucketed estimator validates its inputs", "[smalln]") {
  Rng rng(716);
  RankingDataset empty(4);
  BudgetLedger ledger(PrivacyBudget::zcdp(1.0));
  REQUIRE_THROWS_AS(estimate_w_small_n(empty, PrivacyBudget::zcdp(1.0), 2, ledger, rng),
                    invalid_input_error);
  const RankingDataset data = random_dataset(4, 5, rng);
  REQUIRE_THROWS_AS(estimate_w_small_n(data, PrivacyBudget::zcdp(1.0), 9, ledger, rng),
                    invalid_parameter_error);
  SmallNConfig config;
  config.same_bucket_fraction = 1.5;
  REQUIRE_THROWS_AS(estimate_w_small_n(data, PrivacyBudget::zcdp(1.0), 2, ledger, rng, config),
                    invalid_parameter_error);
}
