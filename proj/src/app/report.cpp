#include "posthoc/app/report.hpp"

#include <cmath>
#include <cstdio>

namespace posthoc::app {
namespace {

void dump_double(double x, std::string& out) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
  // Keep a marker that the value is a float so readers do not see an integer.
  const std::string_view text(buf);
  if (text.find_first_of(".eE") == std::string_view::npos) out += ".0";
}

void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void dump(const Json& v, std::string& out, int indent, int depth) {
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        dump(item, out, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      dump_double(v.get<double>(), out);
      return;
    default:
      out += v.dump();
      return;
  }
}

Json optional_number(const std::optional<double>& x) {
  return x ? Json(*x) : Json(nullptr);
}

}  // namespace

std::string canonical_dump(const Json& value, int indent) {
  std::string out;
  dump(value, out, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

Json bound_json(const BoundResult& b) {
  Json j;
  j["size"] = b.size;
  j["V"] = b.v;
  j["tp_lower"] = b.tp_lower;
  j["fdp_upper"] = b.fdp_upper;
  j["method"] = b.method;
  j["lambda"] = optional_number(b.lambda);
  return j;
}

Json selection_json(const SelectionResult& s) {
  Json j;
  j["name"] = s.name;
  j["size"] = s.bound.size;
  j["V"] = s.bound.v;
  j["tp_lower"] = s.bound.tp_lower;
  j["fdp_upper"] = s.bound.fdp_upper;
  return j;
}

Json envelope_json(const EnvelopeResult& e, const Inputs& inputs) {
  Json k = Json::array();
  Json id = Json::array();
  Json v = Json::array();
  Json tp = Json::array();
  Json fdp = Json::array();
  for (const auto& point : e.envelope.points) {
    k.push_back(point.k);
    id.push_back(inputs.ids[e.order[point.k - 1]]);
    v.push_back(point.v);
    tp.push_back(point.tp_lower);
    fdp.push_back(point.fdp_upper);
  }
  Json j;
  j["method"] = e.method;
  j["lambda"] = optional_number(e.lambda);
  j["k"] = std::move(k);
  j["id"] = std::move(id);
  j["V"] = std::move(v);
  j["tp_lower"] = std::move(tp);
  j["fdp_upper"] = std::move(fdp);
  return j;
}

std::string envelope_csv(const EnvelopeResult& e, const Inputs& inputs) {
  std::string out = "k,id,V,tp_lower,fdp_upper\n";
  for (const auto& point : e.envelope.points) {
    out += std::to_string(point.k) + "," + inputs.ids[e.order[point.k - 1]] + "," +
           std::to_string(point.v) + "," + std::to_string(point.tp_lower) + ",";
    dump_double(point.fdp_upper, out);
    out += '\n';
  }
  return out;
}

Json calibration_json(const CalibrationResult& c) {
  Json j;
  j["template"] = c.template_name;
  j["K"] = c.template_size;
  j["B"] = c.B;
  j["rank"] = c.rank;
  j["lambda"] = c.lambda;
  j["pivots"] = c.pivots;
  return j;
}

Json spatial_json(const SpatialState& s, const Inputs& inputs) {
  Json j;
  j["segment_size"] = s.config.segment_size;
  j["budget"] = s.config.budget.to_string();
  j["tree"] = s.config.tree;
  Json regions = Json::array();
  auto region = [&](std::size_t begin, std::size_t end, std::size_t zeta, std::size_t depth) {
    Json r;
    r["first_id"] = inputs.ids[begin];
    r["last_id"] = inputs.ids[end - 1];
    r["size"] = end - begin;
    r["depth"] = depth;
    r["zeta"] = zeta;
    regions.push_back(std::move(r));
  };
  if (s.tree) {
    for (const auto& n : s.tree->nodes()) region(n.begin, n.end, n.zeta, n.depth);
  } else {
    for (const auto& item : s.family->items()) {
      region(item.region.indices().front(), item.region.indices().back() + 1, item.zeta, 0);
    }
  }
  j["regions"] = std::move(regions);
  return j;
}

Json simulation_json(const sim::ScenarioConfig& cfg, const sim::CoverageReport& r,
                     const std::optional<SimulationReference>& reference) {
  Json j;
  j["scenario"] = sim::to_string(cfg.kind);
  j["m"] = cfg.m;
  if (cfg.kind == sim::ScenarioKind::TwoSampleGaussian) {
    j["n1"] = cfg.n1;
    j["n2"] = cfg.n2;
    j["delta"] = cfg.delta;
    j["alt_fraction"] = cfg.alt_fraction;
  }
  if (cfg.kind == sim::ScenarioKind::EquicorrelatedPairs) j["rho"] = cfg.rho;
  j["method"] = r.method;
  j["replications"] = r.replications;
  j["violations"] = r.violations;
  j["violation_rate"] = r.violation_rate;
  j["coverage"] = r.coverage;
  j["mc_sd"] = r.mc_sd;
  if (reference) {
    Json ref;
    ref["quantity"] = reference->quantity;
    ref["value"] = reference->value;
    j["reference"] = std::move(ref);
  } else {
    j["reference"] = nullptr;
  }
  return j;
}

Json provenance_json(const Provenance& p) {
  Json j;
  j["seed"] = p.seed;
  j["B"] = p.B ? Json(*p.B) : Json(nullptr);
  Json digests = Json::object();
  for (const auto& [role, digest] : p.input_sha256) digests[role] = digest;
  j["input_sha256"] = std::move(digests);
  return j;
}

Json report_json(const Report& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = r.method;
  j["alpha"] = r.alpha;
  if (r.lambda) j["lambda"] = *r.lambda;
  Json selections = Json::array();
  for (const auto& s : r.selections) selections.push_back(selection_json(s));
  j["selections"] = std::move(selections);
  if (r.envelope) j["envelope"] = *r.envelope;
  if (r.calibration) j["calibration"] = *r.calibration;
  if (r.spatial) j["spatial"] = *r.spatial;
  if (r.simulation) j["simulation"] = *r.simulation;
  j["provenance"] = provenance_json(r.provenance);
  return j;
}

}  // namespace posthoc::app
