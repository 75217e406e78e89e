#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "posthoc/calibration.hpp"
#include "posthoc/rng.hpp"

using namespace posthoc;

namespace {

TwoSampleDataset gaussian(std::size_t m, std::size_t n1, std::size_t n2, std::uint64_t seed,
                          double shift = 0.0, std::size_t shifted_from = 0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  const std::size_t n = n1 + n2;
  std::vector<double> data(m * n);
  std::vector<int> labels(n, 1);
  for (std::size_t j = n1; j < n; ++j) labels[j] = 2;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      data[i * n + j] = z(gen) + (j >= n1 && i >= shifted_from ? shift : 0.0);
    }
  }
  return TwoSampleDataset(m, n, std::move(data), std::move(labels));
}

}  // namespace

TEST(PermutationPlan, FirstIsIdentityAndAllAreBijections) {
  const PermutationPlan plan(20, 42);
  std::vector<std::size_t> id(9);
  std::iota(id.begin(), id.end(), 0);
  EXPECT_EQ(plan.permutation(1, 9), id);
  for (std::size_t j = 2; j <= 20; ++j) {
    auto g = plan.permutation(j, 9);
    EXPECT_EQ(g, plan.permutation(j, 9));
    std::sort(g.begin(), g.end());
    EXPECT_EQ(g, id);
  }
  EXPECT_NE(plan.permutation(2, 9), PermutationPlan(20, 43).permutation(2, 9));
  EXPECT_THROW(plan.permutation(0, 9), InputError);
  EXPECT_THROW(plan.permutation(21, 9), InputError);
  EXPECT_THROW(PermutationPlan(1, 1), ConfigError);
}

TEST(ApplyGroupElement, Examples) {
  const auto ds = gaussian(6, 3, 3, 1);
  const std::vector<std::size_t> id{0, 1, 2, 3, 4, 5};
  const auto same = apply_group_element(ds, id);
  EXPECT_TRUE(std::equal(same.data().begin(), same.data().end(), ds.data().begin()));

  const std::vector<std::size_t> swap_in_group1{1, 0, 2, 3, 4, 5};
  const auto a = two_sample_pvalues(ds);
  const auto b = two_sample_pvalues(apply_group_element(ds, swap_in_group1));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);

  const TwoSampleDataset pair(2, 2, {1.0, 3.0, 5.0, 2.0}, {1, 2});
  const std::vector<std::size_t> flip{1, 0};
  const auto q = two_sample_pvalues(pair);
  const auto r = two_sample_pvalues(apply_group_element(pair, flip));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(q[i], r[i], 1e-14);

  EXPECT_THROW(apply_group_element(ds, std::vector<std::size_t>{0, 0, 2, 3, 4, 5}), InputError);
  EXPECT_THROW(apply_group_element(ds, std::vector<std::size_t>{0, 1}), InputError);
}

TEST(ApplyGroupElement, RelabellingGivesSamePvalues) {
  const auto ds = gaussian(15, 4, 6, 3, 1.0);
  const PermutationPlan plan(10, 5);
  for (std::size_t j = 1; j <= 10; ++j) {
    const auto g = plan.permutation(j, ds.cols());
    const auto direct = two_sample_pvalues(apply_group_element(ds, g));
    const auto relabelled =
        two_sample_pvalues(ds, permuted_labels(ds.labels(), g), TwoSampleStatistic::KnownVariance);
    for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(direct[i], relabelled[i], 1e-12);
  }
}

TEST(Pivot, Examples) {
  EXPECT_NEAR(pivot_statistic(PValueVector{0.1, 0.2, 0.9}, Template::linear(3)), 0.3, 1e-15);
  EXPECT_EQ(pivot_statistic(PValueVector{0.0, 0.5, 0.7}, Template::beta(3)), 0.0);
  EXPECT_EQ(pivot_statistic(PValueVector{0.0, 0.5, 0.7}, Template::linear(3)), 0.0);
  EXPECT_NEAR(pivot_statistic(PValueVector{0.4}, Template::beta(1)), 0.4, 1e-12);
  EXPECT_THROW(pivot_statistic(PValueVector{0.4, 0.5}, Template::beta(1)), InputError);
}

TEST(Pivot, RestrictedToK) {
  const PValueVector p{0.5, 0.6, 0.001};
  EXPECT_NEAR(pivot_statistic(p, Template::linear(3, 1)), std::min(1.0, 0.001 * 3), 1e-15);
  const PValueVector q{0.5, 0.6, 0.7};
  EXPECT_NEAR(pivot_statistic(q, Template::linear(3, 2)), 0.9, 1e-15);
}

TEST(CalibrationRank, Examples) {
  EXPECT_EQ(calibration_rank(0.4, 2), 1u);
  EXPECT_EQ(calibration_rank(0.1, 1000), 101u);
  EXPECT_EQ(calibration_rank(0.2, 100), 21u);
  EXPECT_EQ(calibration_rank(0.05, 100), 6u);
  EXPECT_EQ(calibration_rank(0.99, 50), 50u);
  EXPECT_THROW(calibration_rank(1.0 - 1e-14, 50), ConfigError);
  EXPECT_THROW(calibration_rank(1.0, 50), InputError);
}

TEST(Calibrate, LambdaIsRankedPivot) {
  const auto ds = gaussian(30, 10, 10, 8);
  const PermutationPlan plan(50, 3);
  const auto tpl = Template::beta(30);
  const auto res = calibrate_lambda(ds, 0.2, tpl, plan);
  ASSERT_EQ(res.pivots.size(), 50u);
  EXPECT_TRUE(std::is_sorted(res.pivots.begin(), res.pivots.end()));
  EXPECT_EQ(res.rank, 11u);
  EXPECT_EQ(res.lambda, res.pivots[10]);
  EXPECT_EQ(res.B, 50u);
  EXPECT_EQ(res.template_name, "beta");

  std::vector<double> manual;
  for (std::size_t j = 1; j <= 50; ++j) {
    const auto g = plan.permutation(j, ds.cols());
    manual.push_back(pivot_statistic(two_sample_pvalues(apply_group_element(ds, g)), tpl));
  }
  std::sort(manual.begin(), manual.end());
  for (std::size_t j = 0; j < 50; ++j) EXPECT_NEAR(res.pivots[j], manual[j], 1e-12);
}

TEST(Calibrate, TwoPermutationPlan) {
  const auto ds = gaussian(10, 5, 5, 2);
  const PermutationPlan plan(2, 17);
  const auto tpl = Template::linear(10);
  const auto res = calibrate_lambda(ds, 0.4, tpl, plan);
  std::vector<double> pivots;
  for (std::size_t j = 1; j <= 2; ++j) {
    pivots.push_back(
        pivot_statistic(two_sample_pvalues(apply_group_element(ds, plan.permutation(j, 10))), tpl));
  }
  EXPECT_EQ(res.lambda, std::min(pivots[0], pivots[1]));

  const auto s = IndexSet{0, 2, 4, 6};
  const auto composed = threshold_bound(two_sample_pvalues(ds), s, tpl, res.lambda);
  EXPECT_EQ(calibrated_bound(ds, 0.4, tpl, plan, s).v, composed.v);
  EXPECT_EQ(calibrated_bound(ds, 0.4, tpl, plan, {}).v, 0u);
}

TEST(Calibrate, DeterministicAndMonotoneInAlpha) {
  const auto ds = gaussian(25, 8, 8, 4);
  const PermutationPlan plan(200, 9);
  const auto tpl = Template::linear(25);
  EXPECT_EQ(calibrate_lambda(ds, 0.1, tpl, plan).lambda, calibrate_lambda(ds, 0.1, tpl, plan).lambda);
  double prev = 0.0;
  for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5}) {
    const double l = calibrate_lambda(ds, alpha, tpl, plan).lambda;
    EXPECT_GE(l, prev);
    prev = l;
  }
  EXPECT_EQ(calibrate_lambda(ds, 0.95, tpl, PermutationPlan(10, 1)).rank, 10u);
  EXPECT_THROW(calibrate_lambda(ds, 1.0 - 1e-14, tpl, PermutationPlan(10, 1)), ConfigError);
}

TEST(Calibrate, LinearAdaptivityImplication) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ds = gaussian(30, 10, 10, seed);
    const auto p = two_sample_pvalues(ds);
    const auto tpl = Template::linear(30);
    const double alpha = 0.2;
    const double lambda = calibrate_lambda(ds, alpha, tpl, PermutationPlan(100, seed)).lambda;
    if (lambda < alpha) continue;
    std::mt19937_64 gen(seed);
    for (int rep = 0; rep < 50; ++rep) {
      const auto s = oracle::random_subset(gen, 30);
      EXPECT_LE(threshold_bound(p, s, tpl, lambda).v, simes_bound(p, s, alpha).v);
    }
  }
}

TEST(Calibrate, HalfNullLambdaNoLargerThanFullNull) {
  std::size_t not_larger = 0;
  const double s = std::sqrt(1.0 / 50 + 1.0 / 50);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto null_ds = gaussian(50, 50, 50, seed);
    const auto half_ds = gaussian(50, 50, 50, seed, 3.0 / s, 25);
    const auto tpl = Template::linear(50);
    const PermutationPlan plan(100, seed);
    const double l0 = calibrate_lambda(null_ds, 0.2, tpl, plan).lambda;
    const double l1 = calibrate_lambda(half_ds, 0.2, tpl, plan).lambda;
    not_larger += l1 <= l0 ? 1 : 0;
  }
  EXPECT_GE(not_larger, 90u);
}

TEST(SingleSetBeta, Examples) {
  const auto ds = gaussian(20, 6, 6, 12);
  const PermutationPlan plan(100, 2);
  const auto p = two_sample_pvalues(ds);
  const auto all = IndexSet::all(20);
  EXPECT_EQ(single_set_beta_zeta(ds, all, 0.2, plan),
            calibrated_bound(ds, 0.2, Template::beta(20), plan, all).v);

  std::size_t big = 0;
  for (std::size_t i = 1; i < 20; ++i) {
    if (p[i] > p[big]) big = i;
  }
  const IndexSet single{big};
  const auto sub = ds.select_rows(single);
  const double lambda = calibrate_lambda(sub, 0.2, Template::beta(1), plan).lambda;
  const std::size_t zeta = single_set_beta_zeta(ds, single, 0.2, plan);
  EXPECT_LE(zeta, 1u);
  EXPECT_EQ(zeta, p[big] >= Template::beta(1).threshold(1, lambda) ? 1u : 0u);
  EXPECT_THROW(single_set_beta_zeta(ds, {}, 0.2, plan), InputError);
}

TEST(SingleSetBeta, FullNullCoverage) {
  const std::size_t reps = 1000;
  std::size_t violations = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    const auto ds = gaussian(10, 5, 5, 1000 + r);
    const auto r1 = IndexSet::all(10);
    violations += single_set_beta_zeta(ds, r1, 0.2, PermutationPlan(40, r)) < 10 ? 1 : 0;
  }
  const double rate = static_cast<double>(violations) / reps;
  EXPECT_LE(rate, 0.2 + 3 * std::sqrt(0.2 * 0.8 / reps));
}
