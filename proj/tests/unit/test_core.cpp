#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "posthoc/core.hpp"
#include "posthoc/special.hpp"

using namespace posthoc;

TEST(PValueVector, RejectsOutOfRangeAndNan) {
  EXPECT_THROW(PValueVector({0.2, 1.2}), InputError);
  EXPECT_THROW(PValueVector({-0.1}), InputError);
  EXPECT_THROW(PValueVector({std::nan("")}), InputError);
  EXPECT_THROW(PValueVector(std::vector<double>{}), InputError);
  const PValueVector p{0.0, 1.0, 0.5};
  EXPECT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
}

TEST(IndexSet, SortsAndRejectsDuplicates) {
  const IndexSet s{4, 1, 2};
  EXPECT_EQ(std::vector<std::size_t>(s.begin(), s.end()), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_THROW(IndexSet({1, 1}), InputError);
  EXPECT_TRUE(s.contains(4));
  EXPECT_FALSE(s.contains(3));
  EXPECT_THROW(s.check_within(4), InputError);
  EXPECT_NO_THROW(s.check_within(5));
  EXPECT_EQ(IndexSet::range(2, 5), (IndexSet{2, 3, 4}));
  EXPECT_TRUE(IndexSet::range(3, 3).empty());
}

TEST(IndexSet, SetAlgebra) {
  const IndexSet a{0, 1, 2, 5};
  const IndexSet b{2, 3, 5};
  EXPECT_EQ(intersection_size(a, b), 2u);
  EXPECT_EQ(set_union(a, b), (IndexSet{0, 1, 2, 3, 5}));
  EXPECT_EQ(set_intersection(a, b), (IndexSet{2, 5}));
  EXPECT_EQ(set_difference(a, b), (IndexSet{0, 1}));
}

TEST(SortedRestriction, Examples) {
  const PValueVector p{0.9, 0.1, 0.5};
  EXPECT_EQ(sorted_restriction(p, {0, 1, 2}), (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_TRUE(sorted_restriction(p, {}).empty());
  const PValueVector q{0.2, 0.2, 0.1};
  EXPECT_EQ(sorted_restriction(q, {0, 2}), (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(sorted_restriction(q, {0, 1, 2}), (std::vector<double>{0.1, 0.2, 0.2}));
  EXPECT_THROW(sorted_restriction(p, {3}), InputError);
}

TEST(SortedRestriction, PermutationInvariantAndIdempotent) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto values = oracle::random_pvalues(gen, 20, true);
    const auto s = oracle::random_subset(gen, 20);
    const auto sorted = sorted_restriction(PValueVector(values), s);
    EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
    std::vector<std::size_t> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> shuffled(20);
    std::vector<std::size_t> moved;
    for (std::size_t i = 0; i < 20; ++i) shuffled[perm[i]] = values[i];
    for (std::size_t i : s) moved.push_back(perm[i]);
    EXPECT_EQ(sorted_restriction(PValueVector(shuffled), IndexSet(moved)), sorted);
    if (!sorted.empty()) {
      EXPECT_EQ(sorted_restriction(PValueVector(sorted), IndexSet::all(sorted.size())), sorted);
    }
  }
}

TEST(BetaCdf, SelectionEffectValue) {
  EXPECT_NEAR(1.0 - beta_cdf(0.025, 5, 496), 0.005, 1e-3);
}

TEST(BetaCdf, UniformAndSymmetricCases) {
  for (double x : {0.0, 0.3, 1.0}) EXPECT_NEAR(beta_cdf(x, 1, 1), x, 1e-14);
  EXPECT_NEAR(beta_cdf(0.5, 2, 2), 0.5, 1e-14);
  EXPECT_EQ(beta_cdf(0.0, 3, 7), 0.0);
  EXPECT_EQ(beta_cdf(1.0, 3, 7), 1.0);
  EXPECT_THROW(beta_cdf(0.5, 0, 1), InputError);
  EXPECT_THROW(beta_cdf(0.5, 1, -1), InputError);
  EXPECT_THROW(beta_cdf(1.5, 1, 1), InputError);
}

TEST(BetaCdf, MatchesBinomialTailForIntegerShapes) {
  for (int a : {1, 2, 5, 17, 50}) {
    for (int b : {1, 3, 30, 496}) {
      for (double x : {1e-6, 0.001, 0.025, 0.1, 0.3, 0.5, 0.77, 0.99}) {
        EXPECT_NEAR(beta_cdf(x, a, b), oracle::binomial_upper_tail(a + b - 1, a, x), 1e-12)
            << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
  EXPECT_NEAR(beta_cdf(0.3, 1, 7.5), 1.0 - std::pow(0.7, 7.5), 1e-14);
  EXPECT_NEAR(beta_cdf(0.3, 2.5, 1), std::pow(0.3, 2.5), 1e-14);
}

TEST(BetaCdf, ReflectionIdentity) {
  for (double a : {1.0, 2.5, 10.0, 40.0}) {
    for (double b : {1.0, 3.0, 100.0, 500.0}) {
      for (double x = 0.0; x <= 1.0; x += 0.05) {
        EXPECT_NEAR(beta_cdf(x, a, b), 1.0 - beta_cdf(1.0 - x, b, a), 1e-10);
      }
    }
  }
}

TEST(BetaCdf, MonotoneInX) {
  double prev = 0.0;
  for (double x = 0.0; x <= 1.0; x += 0.001) {
    const double v = beta_cdf(x, 5, 496);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(BetaQuantile, Examples) {
  EXPECT_NEAR(beta_quantile(0.5, 1, 1), 0.5, 1e-12);
  EXPECT_NEAR(beta_quantile(0.5, 1, 10), 1.0 - std::pow(0.5, 0.1), 1e-10);
  EXPECT_NEAR(beta_quantile(0.5, 1, 10), 0.066967, 1e-6);
  EXPECT_EQ(beta_quantile(0.0, 3, 4), 0.0);
  EXPECT_EQ(beta_quantile(1.0, 3, 4), 1.0);
  EXPECT_THROW(beta_quantile(1.5, 3, 4), InputError);
}

TEST(BetaQuantile, TinyProbabilities) {
  EXPECT_NEAR(beta_quantile(std::pow(0.025, 12), 12, 1), 0.025, 1e-12);
  EXPECT_NEAR(beta_quantile(1e-30, 1, 10), -std::expm1(std::log1p(-1e-30) / 10), 1e-40);
}

TEST(BetaQuantile, ExtremeLowerTail) {
  for (double q : {1e-300, 1e-200, 1e-120}) {
    for (int k : {2, 9, 30}) {
      const double x = beta_quantile(q, k, 51 - k);
      EXPECT_GT(x, 0.0);
      EXPECT_NEAR(beta_cdf(x, k, 51 - k) / q, 1.0, 1e-9) << q << " " << k;
    }
  }
}

TEST(BetaQuantile, RoundTripGrid) {
  for (int a = 1; a <= 50; a += 7) {
    for (int b : {1, 2, 10, 77, 250, 500}) {
      for (double q = 0.01; q < 0.995; q += 0.07) {
        const double x = beta_quantile(q, a, b);
        EXPECT_NEAR(beta_cdf(x, a, b), q, 1e-8) << a << " " << b << " " << q;
      }
    }
  }
}

TEST(GaussianTail, Examples) {
  EXPECT_DOUBLE_EQ(gaussian_tail(0.0), 0.5);
  EXPECT_NEAR(gaussian_tail(1.959964), 0.025, 1e-6);
  EXPECT_NEAR(gaussian_tail(1.959964), oracle::normal_tail_quadrature(1.959964), 1e-9);
  EXPECT_NEAR(gaussian_tail(-0.7), oracle::normal_tail_quadrature(-0.7), 1e-9);
  EXPECT_NEAR(gaussian_tail_inv(0.5), 0.0, 1e-14);
  EXPECT_THROW(gaussian_tail_inv(0.0), InputError);
  EXPECT_THROW(gaussian_tail_inv(1.0), InputError);
}

TEST(GaussianTail, InverseRoundTrip) {
  for (double q : {1e-12, 1e-8, 1e-4, 0.01, 0.025, 0.1, 0.3, 0.5, 0.8, 0.99, 0.999999}) {
    EXPECT_NEAR(gaussian_tail(gaussian_tail_inv(q)), q, 1e-10 * std::max(1.0, q)) << q;
  }
}

namespace {

TwoSampleDataset two_by(std::size_t rows, std::size_t n1, std::size_t n2,
                        const std::function<double(std::size_t, std::size_t)>& f) {
  const std::size_t n = n1 + n2;
  std::vector<double> data(rows * n);
  std::vector<int> labels(n, 2);
  for (std::size_t j = 0; j < n1; ++j) labels[j] = 1;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) data[i * n + j] = f(i, j);
  }
  return TwoSampleDataset(rows, n, std::move(data), std::move(labels));
}

}  // namespace

TEST(TwoSampleDataset, Validation) {
  EXPECT_THROW(TwoSampleDataset(1, 2, {1.0, 2.0}, {1, 1}), InputError);
  EXPECT_THROW(TwoSampleDataset(1, 2, {1.0, 2.0}, {1, 3}), InputError);
  EXPECT_THROW(TwoSampleDataset(1, 2, {1.0}, {1, 2}), InputError);
  EXPECT_THROW(TwoSampleDataset(1, 2, {1.0, std::nan("")}, {1, 2}), InputError);
  const TwoSampleDataset ds(5, 4, std::vector<double>(20, 1.0), {1, 1, 2, 2});
  EXPECT_EQ(ds.n1(), 2u);
  EXPECT_EQ(ds.n2(), 2u);
  EXPECT_EQ(ds.select_rows({1, 3}).rows(), 2u);
}

TEST(TwoSamplePvalues, Examples) {
  const double s = std::sqrt(1.0 / 50 + 1.0 / 50);
  const auto ds = two_by(3, 50, 50, [s](std::size_t i, std::size_t j) {
    if (i == 0) return 1.0;
    if (i == 1) return j >= 50 ? 1.959964 * s : 0.0;
    return j >= 50 ? 0.2 : 0.0;
  });
  const auto p = two_sample_pvalues(ds);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_NEAR(p[1], 0.05, 1e-6);
  EXPECT_NEAR(p[2], 2.0 * oracle::normal_tail_quadrature(1.0), 1e-9);
  EXPECT_NEAR(p[2], 0.3173, 1e-4);
}

TEST(TwoSamplePvalues, RowShiftInvariance) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  std::vector<double> raw(4 * 12);
  for (auto& x : raw) x = z(gen);
  auto base = two_by(4, 5, 7, [&](std::size_t i, std::size_t j) { return raw[i * 12 + j]; });
  auto shifted =
      two_by(4, 5, 7, [&](std::size_t i, std::size_t j) { return raw[i * 12 + j] + 3.5 * i; });
  for (auto stat : {TwoSampleStatistic::KnownVariance, TwoSampleStatistic::Welch}) {
    const auto a = two_sample_pvalues(base, stat);
    const auto b = two_sample_pvalues(shifted, stat);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(TwoSamplePvalues, WelchMatchesHandComputation) {
  const auto ds = two_by(1, 3, 3, [](std::size_t, std::size_t j) {
    const double v[] = {1.0, 2.0, 3.0, 2.0, 4.0, 6.0};
    return v[j];
  });
  // means 2 and 4, variances 1 and 4, se = sqrt(1/3 + 4/3)
  const double z = 2.0 / std::sqrt(5.0 / 3.0);
  EXPECT_NEAR(two_sample_pvalues(ds, TwoSampleStatistic::Welch)[0],
              2.0 * oracle::normal_tail_quadrature(z), 1e-9);
}

TEST(FoldChange, Examples) {
  const auto ds = two_by(4, 2, 2, [](std::size_t i, std::size_t j) {
    const double g1[] = {2.0, 3.0, 4.0, 0.0};
    const double g2[] = {4.0, 3.0, 2.0, 1.0};
    return j < 2 ? g1[i] : g2[i];
  });
  const auto fc = fold_change(ds);
  EXPECT_DOUBLE_EQ(fc.ratio[0], 2.0);
  EXPECT_NEAR(fc.log_ratio[0], 0.6931, 1e-4);
  EXPECT_DOUBLE_EQ(fc.ratio[1], 1.0);
  EXPECT_DOUBLE_EQ(fc.log_ratio[1], 0.0);
  EXPECT_DOUBLE_EQ(fc.ratio[2], 0.5);
  EXPECT_NEAR(fc.log_ratio[2], -0.6931, 1e-4);
  EXPECT_TRUE(std::isnan(fc.ratio[3]));
  EXPECT_EQ(fc.undefined, (std::vector<std::size_t>{3}));
}
