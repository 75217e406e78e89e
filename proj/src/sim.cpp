#include "posthoc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "posthoc/bounds.hpp"
#include "posthoc/calibration.hpp"
#include "posthoc/parallel.hpp"
#include "posthoc/reference_families.hpp"
#include "posthoc/rng.hpp"
#include "posthoc/special.hpp"

namespace posthoc::sim {
namespace {

constexpr std::uint64_t kPlanDomain = 1;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string template_label(Template::Kind kind) {
  switch (kind) {
    case Template::Kind::Linear:
      return "linear";
    case Template::Kind::Beta:
      return "beta";
    case Template::Kind::Custom:
      break;
  }
  throw ConfigError("simulations support the linear and beta templates only");
}

Template make_template(Template::Kind kind, std::size_t m, std::size_t K) {
  switch (kind) {
    case Template::Kind::Linear:
      return Template::linear(m, K);
    case Template::Kind::Beta:
      return Template::beta(m, K);
    case Template::Kind::Custom:
      break;
  }
  throw ConfigError("simulations support the linear and beta templates only");
}

// True when p_(k:H0) < t_k for some k <= min(|H0|, curve size).
bool curve_violated(std::span<const double> sorted_h0, std::span<const double> curve) {
  const std::size_t n = std::min(sorted_h0.size(), curve.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (sorted_h0[k] < curve[k]) return true;
  }
  return false;
}

const TwoSampleDataset& require_dataset(const Replicate& rep, const char* what) {
  if (const auto* ds = std::get_if<TwoSampleDataset>(&rep.data)) return *ds;
  throw ConfigError(std::string(what) + " needs the two_sample_gaussian scenario");
}

struct Outcome {
  bool violated = false;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct Evaluator {
  const ScenarioConfig& cfg;
  const Replicate& rep;
  std::size_t r;

  Outcome operator()(const method::KBonferroni& mth) const {
    if (mth.k0 < 1) throw InputError("k0 must be at least 1");
    const auto p = rep.pvalues();
    const double t = cfg.alpha * static_cast<double>(mth.k0) / static_cast<double>(cfg.m);
    std::size_t below = 0;
    for (std::size_t i : rep.truth.h0) below += p[i] < t ? 1 : 0;
    return {below >= mth.k0};
  }

  Outcome operator()(const method::Simes&) const {
    const auto p = rep.pvalues();
    const auto sorted = sorted_restriction(p, rep.truth.h0);
    std::vector<double> curve(sorted.size());
    for (std::size_t k = 1; k <= curve.size(); ++k) {
      curve[k - 1] = cfg.alpha * static_cast<double>(k) / static_cast<double>(cfg.m);
    }
    return {curve_violated(sorted, curve)};
  }

  Outcome operator()(const method::FixedThreshold& mth) const {
    const auto tpl = make_template(mth.kind, cfg.m, mth.K);
    const auto p = rep.pvalues();
    const auto sorted = sorted_restriction(p, rep.truth.h0);
    const auto curve = tpl.curve(mth.lambda, std::min(tpl.size(), sorted.size()));
    return {curve_violated(sorted, curve), mth.lambda};
  }

  Outcome operator()(const method::Calibrated& mth) const {
    const auto& ds = require_dataset(rep, "calibrated methods");
    const auto tpl = make_template(mth.kind, cfg.m, mth.K);
    const PermutationPlan plan(mth.B, derive_seed(cfg.seed, r, kPlanDomain));
    const auto cal = calibrate_lambda(ds, cfg.alpha, tpl, plan);
    const auto p = two_sample_pvalues(ds);
    const auto sorted = sorted_restriction(p, rep.truth.h0);
    const auto curve = tpl.curve(cal.lambda, std::min(tpl.size(), sorted.size()));
    return {curve_violated(sorted, curve), cal.lambda};
  }

  BudgetRule rule_for(const BudgetSpec& spec, std::size_t B, const PValueVector& p) const {
    if (spec.kind == BudgetSpec::Kind::PermBeta) {
      const auto& ds = require_dataset(rep, "the perm-beta budget");
      const PermutationPlan plan(B, derive_seed(cfg.seed, r, kPlanDomain));
      return make_budget_rule(spec, p, &ds, &plan);
    }
    return make_budget_rule(spec, p, nullptr, nullptr);
  }

  Outcome operator()(const method::SingleSet& mth) const {
    const auto p = rep.pvalues();
    const auto rule = rule_for(mth.budget, mth.B, p);
    const auto r1 = IndexSet::all(cfg.m);
    const std::size_t zeta = rule.zeta(r1, cfg.alpha);
    return {intersection_size(r1, rep.truth.h0) > zeta};
  }

  Outcome operator()(const method::SpatialFamily& mth) const {
    const auto p = rep.pvalues();
    const auto rule = rule_for(mth.budget, mth.B, p);
    const std::size_t sizes[] = {cfg.m};
    const auto fam = build_segments(sizes, mth.segment_size);
    if (mth.tree) {
      const auto tree = build_tree(fam, rule, cfg.alpha);
      return {!jer_holds(tree.as_family(), rep.truth)};
    }
    return {!jer_holds(calibrate_family(fam, cfg.alpha, rule), rep.truth)};
  }

  Outcome operator()(const method::SelectionEffect& mth) const {
    if (mth.k0 < 1 || mth.s0 < 1 || mth.s0 > cfg.m) {
      throw InputError("selection effect needs 1 <= k0 and 1 <= s0 <= m");
    }
    const auto p = rep.pvalues();
    std::vector<std::size_t> order(cfg.m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mth.s0),
                      order.end(), [&p](std::size_t a, std::size_t b) {
                        return p[a] < p[b] || (p[a] == p[b] && a < b);
                      });
    const double t = cfg.alpha * static_cast<double>(mth.k0) / static_cast<double>(mth.s0);
    std::size_t above = 0;
    std::size_t nulls = 0;
    for (std::size_t j = 0; j < mth.s0; ++j) {
      above += p[order[j]] >= t ? 1 : 0;
      nulls += rep.truth.h0.contains(order[j]) ? 1 : 0;
    }
    const std::size_t v = std::min(mth.s0, above + mth.k0 - 1);
    return {nulls > v};
  }
};

}  // namespace

ScenarioKind parse_scenario(std::string_view name) {
  if (name == "full_null_iid") return ScenarioKind::FullNullIid;
  if (name == "two_sample_gaussian") return ScenarioKind::TwoSampleGaussian;
  if (name == "equicorrelated_pairs") return ScenarioKind::EquicorrelatedPairs;
  throw InputError("unknown scenario '" + std::string(name) +
                   "' (expected full_null_iid, two_sample_gaussian or equicorrelated_pairs)");
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::FullNullIid:
      return "full_null_iid";
    case ScenarioKind::TwoSampleGaussian:
      return "two_sample_gaussian";
    case ScenarioKind::EquicorrelatedPairs:
      return "equicorrelated_pairs";
  }
  return "full_null_iid";
}

void ScenarioConfig::validate() const {
  if (m < 1) throw InputError("m must be at least 1");
  if (replications < 1) throw InputError("replications must be at least 1");
  check_alpha(alpha);
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InputError("delta must be >= 0");
  if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("rho must lie in [-1, 1]");
  if (!(alt_fraction >= 0.0 && alt_fraction <= 1.0)) {
    throw InputError("fraction of alternatives must lie in [0, 1]");
  }
  if (kind == ScenarioKind::TwoSampleGaussian && (n1 < 1 || n2 < 1)) {
    throw InputError("both groups need at least one sample");
  }
  if (kind == ScenarioKind::EquicorrelatedPairs && m % 2 != 0) {
    throw InputError("equicorrelated_pairs needs an even m (got " + std::to_string(m) + ")");
  }
}

PValueVector Replicate::pvalues() const {
  if (const auto* p = std::get_if<PValueVector>(&data)) return *p;
  return two_sample_pvalues(std::get<TwoSampleDataset>(data));
}

Replicate simulate(const ScenarioConfig& cfg, std::size_t r) {
  cfg.validate();
  Rng rng(cfg.seed, r);
  switch (cfg.kind) {
    case ScenarioKind::FullNullIid: {
      std::vector<double> p(cfg.m);
      for (auto& x : p) x = rng.uniform();
      return {PValueVector(std::move(p)), {IndexSet::all(cfg.m)}};
    }
    case ScenarioKind::EquicorrelatedPairs: {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double x1 = z1;
      const double x2 = cfg.rho * z1 + std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho)) * z2;
      std::vector<double> p(cfg.m);
      const std::size_t half = cfg.m / 2;
      std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(half), gaussian_tail(x1));
      std::fill(p.begin() + static_cast<std::ptrdiff_t>(half), p.end(), gaussian_tail(x2));
      return {PValueVector(std::move(p)), {IndexSet::all(cfg.m)}};
    }
    case ScenarioKind::TwoSampleGaussian: {
      const std::size_t n = cfg.n1 + cfg.n2;
      std::vector<int> labels(n, 2);
      std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(cfg.n1), 1);
      std::vector<double> data(cfg.m * n);
      for (auto& x : data) x = rng.normal();
      const std::size_t alternatives =
          cfg.delta > 0.0
              ? static_cast<std::size_t>(std::floor(cfg.alt_fraction * static_cast<double>(cfg.m)))
              : 0;
      const std::size_t first_alt = cfg.m - alternatives;
      const double s = std::sqrt(1.0 / static_cast<double>(cfg.n1) + 1.0 / static_cast<double>(cfg.n2));
      const double shift = cfg.delta / s;
      for (std::size_t i = first_alt; i < cfg.m; ++i) {
        for (std::size_t j = cfg.n1; j < n; ++j) data[i * n + j] += shift;
      }
      return {TwoSampleDataset(cfg.m, n, std::move(data), std::move(labels)),
              {IndexSet::range(0, first_alt)}};
    }
  }
  throw InputError("unknown scenario");
}

double simes_violation_probability(double rho, double alpha) {
  check_alpha(alpha);
  if (!(rho > -1.0 && rho < 1.0)) {
    throw InputError("the violation integral needs -1 < rho < 1 (got " + format_double(rho) + ")");
  }
  const double sigma = std::sqrt(1.0 - rho * rho);
  const double z_alpha = gaussian_tail_inv(alpha);
  const double z_half = gaussian_tail_inv(alpha / 2.0);
  auto integrand = [rho, sigma](double z) {
    return [rho, sigma, z](double w) {
      if (w >= 1.0) return rho > 0.0 ? 0.0 : (rho < 0.0 ? 1.0 : gaussian_tail(z));
      return gaussian_tail((z - rho * gaussian_tail_inv(w)) / sigma);
    };
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double first = Quadrature::integrate(integrand(z_alpha), alpha / 2.0, alpha, 15, 1e-10);
  const double second = Quadrature::integrate(integrand(z_half), alpha, 1.0, 15, 1e-10);
  return alpha / 2.0 + first + second;
}

double selection_effect_coverage(std::size_t m, std::size_t s0, std::size_t k0, double alpha) {
  check_alpha(alpha);
  if (k0 < 1 || s0 < 1 || s0 > m || k0 > m) {
    throw InputError("selection effect needs 1 <= k0 <= m and 1 <= s0 <= m");
  }
  const double t = alpha * static_cast<double>(k0) / static_cast<double>(s0);
  if (t >= 1.0) return 0.0;
  return 1.0 - beta_cdf(t, static_cast<double>(k0), static_cast<double>(m - k0 + 1));
}

double bonferroni_full_null_coverage(std::size_t m, double alpha) {
  check_alpha(alpha);
  if (m < 1) throw InputError("m must be at least 1");
  return std::pow(1.0 - alpha / static_cast<double>(m), static_cast<double>(m));
}

std::string describe(const Method& m) {
  struct Visitor {
    std::string operator()(const method::KBonferroni& x) const {
      return "bonf(k0=" + std::to_string(x.k0) + ")";
    }
    std::string operator()(const method::Simes&) const { return "simes"; }
    std::string operator()(const method::FixedThreshold& x) const {
      return "threshold(" + template_label(x.kind) + ",lambda=" + format_double(x.lambda) +
             ",K=" + std::to_string(x.K) + ")";
    }
    std::string operator()(const method::Calibrated& x) const {
      return "calibrated(" + template_label(x.kind) + ",K=" + std::to_string(x.K) +
             ",B=" + std::to_string(x.B) + ")";
    }
    std::string operator()(const method::SingleSet& x) const {
      return "single-set(" + x.budget.to_string() + ")";
    }
    std::string operator()(const method::SpatialFamily& x) const {
      return std::string(x.tree ? "spatial-tree(" : "spatial(") +
             "s=" + std::to_string(x.segment_size) + "," + x.budget.to_string() + ")";
    }
    std::string operator()(const method::SelectionEffect& x) const {
      return "selection-effect(s0=" + std::to_string(x.s0) + ",k0=" + std::to_string(x.k0) + ")";
    }
  };
  return std::visit(Visitor{}, m);
}

CoverageReport coverage_experiment(const ScenarioConfig& cfg, const Method& method) {
  cfg.validate();
  CoverageReport report;
  report.method = describe(method);
  report.replications = cfg.replications;
  report.diagnostics.resize(cfg.replications);
  parallel_for(cfg.replications, [&](std::size_t r) {
    const Replicate rep = simulate(cfg, r);
    const Outcome out = std::visit(Evaluator{cfg, rep, r}, method);
    report.diagnostics[r] = {out.violated, rep.truth.h0.size(), out.lambda};
  });
  report.violations = static_cast<std::size_t>(
      std::count_if(report.diagnostics.begin(), report.diagnostics.end(),
                    [](const ReplicateDiagnostic& d) { return d.violated; }));
  const double n = static_cast<double>(cfg.replications);
  report.violation_rate = static_cast<double>(report.violations) / n;
  report.coverage = 1.0 - report.violation_rate;
  report.mc_sd = std::sqrt(report.violation_rate * (1.0 - report.violation_rate) / n);
  return report;
}

}  // namespace posthoc::sim
