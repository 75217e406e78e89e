#pragma once

// Permutation calibration of template bounds. Under the randomization
// hypothesis the joint law of the null p-values is invariant when the
// sample columns are permuted, so the (floor(alpha B) + 1)-th smallest pivot
// over B random permutations gives a lambda whose threshold bound holds with
// probability 1 - alpha (jointly over data and permutation draw).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posthoc/bounds.hpp"
#include "posthoc/core.hpp"
#include "posthoc/templates.hpp"

namespace posthoc {

/// g_1 = identity, g_2..g_B drawn i.i.d. uniformly (with replacement) from the
/// permutations of the n columns. Permutation j comes from its own random
/// stream (seed, j) and can be regenerated independently.
class PermutationPlan {
 public:
  PermutationPlan(std::size_t B, std::uint64_t seed);

  std::size_t size() const noexcept { return B_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// g_j for j in [1, B], as a permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t j, std::size_t n) const;

 private:
  std::size_t B_;
  std::uint64_t seed_;
};

/// Reorders the columns: column j of the result is column g[j] of ds.
/// Labels stay with positions.
TwoSampleDataset apply_group_element(const TwoSampleDataset& ds, std::span<const std::size_t> g);

/// Labels that, applied to the original columns, reproduce the group split
/// of apply_group_element(ds, g).
std::vector<int> permuted_labels(std::span<const int> labels, std::span<const std::size_t> g);

/// min over k <= K of t_k^{-1}(p_(k:m)). Requires tpl.m() == p.size().
double pivot_statistic(const PValueVector& p, const Template& tpl);

/// Same, from already sorted p-values.
double pivot_statistic_sorted(std::span<const double> sorted, const Template& tpl);

/// 1-based rank floor(alpha B) + 1 of the calibrated pivot. Throws
/// ConfigError when it exceeds B.
std::size_t calibration_rank(double alpha, std::size_t B);

struct CalibrationResult {
  double lambda = 0.0;
  std::vector<double> pivots;  // ascending
  double alpha = 0.0;
  std::size_t rank = 0;        // 1-based position of lambda in pivots
  std::string template_name;
  std::size_t template_size = 0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

CalibrationResult calibrate_lambda(const TwoSampleDataset& ds, double alpha, const Template& tpl,
                                   const PermutationPlan& plan,
                                   TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

/// Threshold bound at the calibrated lambda.
BoundValue calibrated_bound(const TwoSampleDataset& ds, double alpha, const Template& tpl,
                            const PermutationPlan& plan, const IndexSet& s,
                            TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

/// Budget for one fixed reference set R1: the calibration above run on the
/// rows of R1 alone with a beta template of size |R1|, followed by the
/// threshold bound of R1 itself.
std::size_t single_set_beta_zeta(const TwoSampleDataset& ds, const IndexSet& r1, double alpha,
                                 const PermutationPlan& plan,
                                 TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

}  // namespace posthoc
