#include "posthoc/app/session.hpp"

#include <algorithm>

namespace posthoc::app {
namespace {

Template make_template(const std::string& name, std::size_t m, std::size_t K) {
  if (name == "linear") return Template::linear(m, K);
  if (name == "beta") return Template::beta(m, K);
  throw UsageError("unknown template '" + name + "' (expected linear or beta)");
}

}  // namespace

MethodSpec MethodSpec::parse(std::string_view name, std::string_view default_template,
                             std::size_t k0) {
  if (name == "simes") return {Kind::Simes, 1, {}};
  if (name == "bonf" || name == "k0-bonferroni") {
    if (k0 < 1) throw UsageError("k0 must be at least 1");
    return {Kind::KBonferroni, k0, {}};
  }
  if (name == "calibrated") return {Kind::Calibrated, 1, std::string(default_template)};
  if (name == "calibrated-linear") return {Kind::Calibrated, 1, "linear"};
  if (name == "calibrated-beta") return {Kind::Calibrated, 1, "beta"};
  if (name == "spatial") return {Kind::Spatial, 1, {}};
  throw UsageError("unknown method '" + std::string(name) +
                   "' (expected simes, bonf, calibrated, calibrated-linear, calibrated-beta "
                   "or spatial)");
}

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::Simes:
      return "simes";
    case Kind::KBonferroni:
      return "bonf(k0=" + std::to_string(k0) + ")";
    case Kind::Calibrated:
      return "calibrated-" + template_name;
    case Kind::Spatial:
      return "spatial";
  }
  return "simes";
}

BoundResult make_bound_result(std::string method, std::size_t size, std::size_t v,
                              std::optional<double> lambda) {
  BoundResult out;
  out.method = std::move(method);
  out.size = size;
  out.v = std::min(v, size);
  out.tp_lower = size - out.v;
  out.fdp_upper = size == 0 ? 0.0 : static_cast<double>(out.v) / static_cast<double>(size);
  out.lambda = lambda;
  return out;
}

Session::Session(Inputs inputs, SessionConfig config)
    : inputs_(std::move(inputs)), config_(std::move(config)) {
  check_alpha(config_.alpha);
  const std::size_t m = inputs_.m();
  if (config_.K > m) {
    throw UsageError("K=" + std::to_string(config_.K) + " exceeds m=" + std::to_string(m));
  }
  if (!config_.templates.empty() && !inputs_.two_sample()) {
    throw UsageError("calibrated templates need two-sample inputs (--data and --labels)");
  }
  std::optional<PermutationPlan> plan;
  if (inputs_.two_sample()) plan.emplace(config_.B, config_.seed);
  for (const auto& name : config_.templates) {
    if (calibrations_.count(name) > 0) continue;
    auto tpl = make_template(name, m, config_.K);
    calibrations_.emplace(name, calibrate_lambda(*inputs_.dataset, config_.alpha, tpl, *plan,
                                                 config_.stat));
    templates_.emplace(name, std::move(tpl));
  }
  if (config_.spatial) {
    const auto& sc = *config_.spatial;
    if (sc.budget.kind == BudgetSpec::Kind::PermBeta && !inputs_.two_sample()) {
      throw UsageError("the perm-beta budget needs two-sample inputs");
    }
    const auto sizes = inputs_.chromosome_sizes();
    auto segments = build_segments(sizes, sc.segment_size);
    const auto rule = make_budget_rule(sc.budget, inputs_.pvalues,
                                       inputs_.dataset ? &*inputs_.dataset : nullptr,
                                       plan ? &*plan : nullptr, config_.stat);
    SpatialState state{sc, segments, std::nullopt, std::nullopt};
    if (sc.tree) {
      state.tree = build_tree(segments, rule, config_.alpha);
    } else {
      state.family = calibrate_family(segments, config_.alpha, rule);
    }
    spatial_.emplace(std::move(state));
  }
}

const CalibrationResult* Session::calibration(const std::string& template_name) const {
  const auto it = calibrations_.find(template_name);
  return it == calibrations_.end() ? nullptr : &it->second;
}

void Session::check_method(const MethodSpec& method) const {
  if (method.kind == MethodSpec::Kind::Calibrated && calibration(method.template_name) == nullptr) {
    if (!inputs_.two_sample()) {
      throw UsageError("calibrated methods need two-sample inputs (--data and --labels)");
    }
    throw UsageError("template '" + method.template_name + "' was not calibrated in this session");
  }
  if (method.kind == MethodSpec::Kind::Spatial && !spatial_) {
    throw UsageError("the spatial method needs a segment size and budget rule");
  }
}

std::vector<double> Session::curve(const MethodSpec& method) const {
  const std::size_t count = m();
  if (method.kind == MethodSpec::Kind::Simes) {
    std::vector<double> c(count);
    for (std::size_t k = 1; k <= count; ++k) {
      c[k - 1] = config_.alpha * static_cast<double>(k) / static_cast<double>(count);
    }
    return c;
  }
  const auto& tpl = templates_.at(method.template_name);
  return tpl.curve(calibration(method.template_name)->lambda);
}

std::size_t Session::raw_bound(const IndexSet& s, const MethodSpec& method) const {
  switch (method.kind) {
    case MethodSpec::Kind::Simes:
      return simes_bound(inputs_.pvalues, s, config_.alpha).v;
    case MethodSpec::Kind::KBonferroni:
      return k0_bonferroni(inputs_.pvalues, s, config_.alpha, method.k0).v;
    case MethodSpec::Kind::Calibrated:
      return threshold_bound(inputs_.pvalues, s, templates_.at(method.template_name),
                             calibration(method.template_name)->lambda)
          .v;
    case MethodSpec::Kind::Spatial:
      if (spatial_->tree) return tree_bound(s, *spatial_->tree);
      return disjoint_sum_bound(s, *spatial_->family);
  }
  return s.size();
}

BoundResult Session::bound(const IndexSet& s, const MethodSpec& method) const {
  check_method(method);
  s.check_within(m());
  std::optional<double> lambda;
  if (method.kind == MethodSpec::Kind::Calibrated) {
    lambda = calibration(method.template_name)->lambda;
  }
  std::string name = method.name();
  if (method.kind == MethodSpec::Kind::Spatial && spatial_->tree) name = "spatial-tree";
  return make_bound_result(std::move(name), s.size(), raw_bound(s, method), lambda);
}

EnvelopeResult Session::envelope(const MethodSpec& method) const {
  check_method(method);
  EnvelopeResult out;
  out.method = bound(IndexSet{}, method).method;
  out.order = level_set_order(inputs_.pvalues);
  if (method.kind == MethodSpec::Kind::Calibrated) {
    out.lambda = calibration(method.template_name)->lambda;
  }
  if (method.kind == MethodSpec::Kind::Simes || method.kind == MethodSpec::Kind::Calibrated) {
    out.envelope = curve_envelope(inputs_.pvalues, curve(method));
  } else {
    out.envelope = posthoc::envelope(inputs_.pvalues,
                                     [&](const IndexSet& s) { return raw_bound(s, method); });
  }
  return out;
}

std::string Session::dataset_digest() const {
  std::string joined;
  for (const auto& [role, digest] : inputs_.digests) joined += role + ":" + digest + "\n";
  return sha256_hex(joined);
}

}  // namespace posthoc::app
