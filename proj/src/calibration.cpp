#include "posthoc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "posthoc/parallel.hpp"
#include "posthoc/rng.hpp"

namespace posthoc {

PermutationPlan::PermutationPlan(std::size_t B, std::uint64_t seed) : B_(B), seed_(seed) {
  if (B_ < 2) throw ConfigError("permutation plan needs B >= 2, got " + std::to_string(B_));
}

std::vector<std::size_t> PermutationPlan::permutation(std::size_t j, std::size_t n) const {
  if (j < 1 || j > B_) {
    throw InputError("permutation index " + std::to_string(j) + " outside [1," +
                     std::to_string(B_) + "]");
  }
  if (j == 1) {
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    return id;
  }
  Rng rng(seed_, j);
  return random_permutation(n, rng);
}

namespace {

void check_permutation(std::span<const std::size_t> g, std::size_t n) {
  if (g.size() != n) throw InputError("group element has the wrong length");
  std::vector<bool> seen(n, false);
  for (std::size_t v : g) {
    if (v >= n || seen[v]) throw InputError("group element is not a permutation");
    seen[v] = true;
  }
}

}  // namespace

TwoSampleDataset apply_group_element(const TwoSampleDataset& ds, std::span<const std::size_t> g) {
  check_permutation(g, ds.cols());
  std::vector<double> data(ds.rows() * ds.cols());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) data[i * ds.cols() + j] = ds(i, g[j]);
  }
  auto labels = ds.labels();
  return TwoSampleDataset(ds.rows(), ds.cols(), std::move(data),
                          std::vector<int>(labels.begin(), labels.end()));
}

std::vector<int> permuted_labels(std::span<const int> labels, std::span<const std::size_t> g) {
  check_permutation(g, labels.size());
  std::vector<int> out(labels.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[g[j]] = labels[j];
  return out;
}

double pivot_statistic_sorted(std::span<const double> sorted, const Template& tpl) {
  if (tpl.m() != sorted.size()) {
    throw InputError("template built for m=" + std::to_string(tpl.m()) + " but " +
                     std::to_string(sorted.size()) + " p-values were given");
  }
  double best = 1.0;
  for (std::size_t k = 1; k <= tpl.size() && best > 0.0; ++k) {
    best = std::min(best, tpl.inverse(k, sorted[k - 1]));
  }
  return best;
}

double pivot_statistic(const PValueVector& p, const Template& tpl) {
  std::vector<double> sorted(p.values().begin(), p.values().end());
  std::sort(sorted.begin(), sorted.end());
  return pivot_statistic_sorted(sorted, tpl);
}

std::size_t calibration_rank(double alpha, std::size_t B) {
  check_alpha(alpha);
  const auto rank =
      static_cast<std::size_t>(std::floor(alpha * static_cast<double>(B) * (1.0 + 1e-12))) + 1;
  if (rank > B) {
    throw ConfigError("alpha=" + std::to_string(alpha) + " is too large for B=" +
                      std::to_string(B) + " permutations");
  }
  return rank;
}

CalibrationResult calibrate_lambda(const TwoSampleDataset& ds, double alpha, const Template& tpl,
                                   const PermutationPlan& plan, TwoSampleStatistic stat) {
  const std::size_t rank = calibration_rank(alpha, plan.size());
  if (tpl.m() != ds.rows()) {
    throw InputError("template built for m=" + std::to_string(tpl.m()) + " but dataset has " +
                     std::to_string(ds.rows()) + " rows");
  }
  CalibrationResult result;
  result.pivots.resize(plan.size());
  parallel_for(plan.size(), [&](std::size_t idx) {
    const auto g = plan.permutation(idx + 1, ds.cols());
    const auto labels = permuted_labels(ds.labels(), g);
    auto p = two_sample_pvalues(ds, labels, stat);
    std::sort(p.begin(), p.end());
    result.pivots[idx] = pivot_statistic_sorted(p, tpl);
  });
  std::sort(result.pivots.begin(), result.pivots.end());
  result.lambda = result.pivots[rank - 1];
  result.alpha = alpha;
  result.rank = rank;
  result.template_name = tpl.name();
  result.template_size = tpl.size();
  result.B = plan.size();
  result.seed = plan.seed();
  return result;
}

BoundValue calibrated_bound(const TwoSampleDataset& ds, double alpha, const Template& tpl,
                            const PermutationPlan& plan, const IndexSet& s,
                            TwoSampleStatistic stat) {
  const auto cal = calibrate_lambda(ds, alpha, tpl, plan, stat);
  auto bound = threshold_bound(two_sample_pvalues(ds, stat), s, tpl, cal.lambda);
  bound.method = "calibrated-" + tpl.name();
  bound.alpha = alpha;
  return bound;
}

std::size_t single_set_beta_zeta(const TwoSampleDataset& ds, const IndexSet& r1, double alpha,
                                 const PermutationPlan& plan, TwoSampleStatistic stat) {
  if (r1.empty()) throw InputError("reference set must be nonempty");
  const auto restricted = ds.select_rows(r1);
  const auto tpl = Template::beta(r1.size());
  const auto cal = calibrate_lambda(restricted, alpha, tpl, plan, stat);
  const auto p = two_sample_pvalues(restricted, stat);
  return threshold_bound(p, IndexSet::all(r1.size()), tpl, cal.lambda).v;
}

}  // namespace posthoc
