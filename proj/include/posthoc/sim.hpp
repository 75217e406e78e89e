#pragma once

// Monte Carlo laboratory: simulated p-values and two-sample datasets with
// known ground truth, and coverage experiments for every bound.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "posthoc/core.hpp"
#include "posthoc/spatial.hpp"
#include "posthoc/templates.hpp"

namespace posthoc::sim {

enum class ScenarioKind {
  /// m i.i.d. U(0,1) p-values, every hypothesis null.
  FullNullIid,
  /// Unit-variance Gaussian samples; group 2 is shifted by delta / s_{n1,n2}
  /// on the last floor(alt_fraction m) rows.
  TwoSampleGaussian,
  /// Two blocks of m/2 identical p-values Φ̄(X1), Φ̄(X2) with corr(X1, X2) = rho.
  EquicorrelatedPairs,
};

ScenarioKind parse_scenario(std::string_view name);
std::string to_string(ScenarioKind kind);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::FullNullIid;
  std::size_t m = 100;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  double alpha = 0.05;
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  double delta = 0.0;
  double alt_fraction = 0.5;
  double rho = 0.0;

  /// Throws InputError on an inconsistent configuration.
  void validate() const;
};

struct Replicate {
  std::variant<PValueVector, TwoSampleDataset> data;
  GroundTruth truth;

  /// The p-values, computed with the known-variance statistic for datasets.
  PValueVector pvalues() const;
};

/// Replicate r (0-based) drawn from its own stream (seed, r).
Replicate simulate(const ScenarioConfig& cfg, std::size_t r);

/// P(Simes bound violated) for two equicorrelated Gaussian blocks:
/// α/2 + ∫_{α/2}^{α} Φ̄((Φ̄⁻¹(α) − ρΦ̄⁻¹(w))/√(1−ρ²)) dw
///     + ∫_{α}^{1} Φ̄((Φ̄⁻¹(α/2) − ρΦ̄⁻¹(w))/√(1−ρ²)) dw.
double simes_violation_probability(double rho, double alpha);

/// P(|Ŝ ∩ H0| <= V) when Ŝ holds the s0 smallest of m null p-values and V is
/// the k0-Bonferroni bound computed as if Ŝ were fixed: P(Beta(k0, m-k0+1) >= α k0 / s0).
double selection_effect_coverage(std::size_t m, std::size_t s0, std::size_t k0, double alpha);

/// (1 - α/m)^m: coverage of the 1-Bonferroni bound under the full null.
double bonferroni_full_null_coverage(std::size_t m, double alpha);

namespace method {

struct KBonferroni {
  std::size_t k0 = 1;
};
struct Simes {};
struct FixedThreshold {
  Template::Kind kind = Template::Kind::Linear;
  double lambda = 0.05;
  std::size_t K = 0;  // 0 means m
};
struct Calibrated {
  Template::Kind kind = Template::Kind::Linear;
  std::size_t K = 0;
  std::size_t B = 100;
};
/// One reference set R1 = all hypotheses with budget at level alpha.
struct SingleSet {
  BudgetSpec budget;
  std::size_t B = 100;  // perm-beta only
};
struct SpatialFamily {
  std::size_t segment_size = 10;
  BudgetSpec budget;
  bool tree = false;
  std::size_t B = 100;  // perm-beta only
};
/// k0-Bonferroni at level alpha k0 / s0 applied to the s0 smallest p-values
/// as if that set had been fixed in advance.
struct SelectionEffect {
  std::size_t s0 = 10;
  std::size_t k0 = 5;
};

}  // namespace method

using Method = std::variant<method::KBonferroni, method::Simes, method::FixedThreshold,
                            method::Calibrated, method::SingleSet, method::SpatialFamily,
                            method::SelectionEffect>;

std::string describe(const Method& m);

struct ReplicateDiagnostic {
  bool violated = false;
  /// Number of true nulls in the replicate.
  std::size_t null_count = 0;
  /// Calibrated lambda, or the fixed lambda; NaN when the method has none.
  double lambda = 0.0;
};

struct CoverageReport {
  std::string method;
  std::size_t replications = 0;
  std::size_t violations = 0;
  double violation_rate = 0.0;
  double coverage = 0.0;
  /// Binomial standard error of violation_rate.
  double mc_sd = 0.0;
  std::vector<ReplicateDiagnostic> diagnostics;
};

/// Runs cfg.replications independent replicates and records, for each one,
/// whether the method's guarantee failed. Threshold-type bounds fail when
/// p_(k:H0) < t_k for some k <= |H0|; families fail when a budget is exceeded;
/// the selection-effect method fails when |Ŝ ∩ H0| > V(Ŝ).
CoverageReport coverage_experiment(const ScenarioConfig& cfg, const Method& method);

}  // namespace posthoc::sim
