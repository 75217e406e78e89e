#pragma once

// JSON reports written by the command line and served over HTTP. Key order is
// fixed and floating-point numbers are printed with 17 significant digits, so
// identical inputs and seeds give byte-identical output.

#include <cstdint>
#include <map>
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posthoc/app/session.hpp"
#include "posthoc/sim.hpp"

namespace posthoc::app {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Deterministic serialization: keys in insertion order, doubles via %.17g,
/// NaN and infinities as null. indent < 0 gives a single line.
std::string canonical_dump(const Json& value, int indent = 2);

struct SelectionResult {
  std::string name;
  BoundResult bound;
};

Json bound_json(const BoundResult& b);
Json selection_json(const SelectionResult& s);
/// {"method", "lambda", "k", "id", "V", "tp_lower", "fdp_upper"}
Json envelope_json(const EnvelopeResult& e, const Inputs& inputs);
/// Envelope rows as CSV: k,id,V,tp_lower,fdp_upper.
std::string envelope_csv(const EnvelopeResult& e, const Inputs& inputs);
Json calibration_json(const CalibrationResult& c);
Json spatial_json(const SpatialState& s, const Inputs& inputs);
/// Closed-form value of the simulated quantity, when one is known.
struct SimulationReference {
  std::string quantity;  // "coverage" or "violation_rate"
  double value = 0.0;
};

Json simulation_json(const sim::ScenarioConfig& cfg, const sim::CoverageReport& r,
                     const std::optional<SimulationReference>& reference);

struct Provenance {
  std::uint64_t seed = 0;
  std::optional<std::size_t> B;
  std::map<std::string, std::string> input_sha256;
};

Json provenance_json(const Provenance& p);

/// Top-level report. Optional parts are left out when absent.
struct Report {
  std::string method;
  double alpha = 0.0;
  std::optional<double> lambda;
  std::vector<SelectionResult> selections;
  std::optional<Json> envelope;
  std::optional<Json> calibration;
  std::optional<Json> spatial;
  std::optional<Json> simulation;
  Provenance provenance;
};

Json report_json(const Report& r);

}  // namespace posthoc::app
