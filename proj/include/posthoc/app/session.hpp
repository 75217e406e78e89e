#pragma once

// The bound engine shared by the command line and the HTTP server: inputs,
// calibrations and spatial families are computed once, then bounds are
// answered for any selection without further randomness.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posthoc/app/inputs.hpp"
#include "posthoc/bounds.hpp"
#include "posthoc/calibration.hpp"
#include "posthoc/reference_families.hpp"
#include "posthoc/spatial.hpp"

namespace posthoc::app {

/// Raised for flag combinations that cannot work together (calibration on
/// p-value inputs, a method that was not configured, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MethodSpec {
  enum class Kind { Simes, KBonferroni, Calibrated, Spatial };
  Kind kind = Kind::Simes;
  std::size_t k0 = 1;
  std::string template_name;  // calibrated only: "linear" or "beta"

  /// "simes", "bonf", "calibrated" (with default_template), "calibrated-linear",
  /// "calibrated-beta", "spatial".
  static MethodSpec parse(std::string_view name, std::string_view default_template = "beta",
                          std::size_t k0 = 1);
  std::string name() const;
};

struct SpatialConfig {
  std::size_t segment_size = 10;
  BudgetSpec budget;
  bool tree = false;
};

struct SessionConfig {
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::size_t B = 1000;
  std::size_t K = 0;  // 0 means m
  TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance;
  /// Templates calibrated at startup (two-sample inputs only).
  std::vector<std::string> templates;
  std::optional<SpatialConfig> spatial;
};

struct BoundResult {
  std::string method;
  std::size_t size = 0;
  std::size_t v = 0;
  std::size_t tp_lower = 0;
  double fdp_upper = 0.0;
  std::optional<double> lambda;
};

struct EnvelopeResult {
  std::string method;
  std::optional<double> lambda;
  /// Row added at step k (level-set order).
  std::vector<std::size_t> order;
  Envelope envelope;
};

struct SpatialState {
  SpatialConfig config;
  SegmentFamily segments;
  std::optional<ReferenceFamily> family;  // flat segments
  std::optional<AggregationTree> tree;
};

class Session {
 public:
  /// Runs every configured calibration and builds the spatial family.
  Session(Inputs inputs, SessionConfig config);

  const Inputs& inputs() const noexcept { return inputs_; }
  const SessionConfig& config() const noexcept { return config_; }
  std::size_t m() const noexcept { return inputs_.m(); }

  /// Calibration of a configured template, or nullptr.
  const CalibrationResult* calibration(const std::string& template_name) const;
  const std::map<std::string, CalibrationResult>& calibrations() const noexcept {
    return calibrations_;
  }
  const SpatialState* spatial() const noexcept { return spatial_ ? &*spatial_ : nullptr; }

  /// Throws UsageError when the method is not available in this session.
  void check_method(const MethodSpec& method) const;

  BoundResult bound(const IndexSet& s, const MethodSpec& method) const;
  EnvelopeResult envelope(const MethodSpec& method) const;

  /// SHA-256 over the input digests, identifying the dataset.
  std::string dataset_digest() const;

 private:
  std::size_t raw_bound(const IndexSet& s, const MethodSpec& method) const;
  std::vector<double> curve(const MethodSpec& method) const;

  Inputs inputs_;
  SessionConfig config_;
  std::map<std::string, CalibrationResult> calibrations_;
  std::map<std::string, Template> templates_;
  std::optional<SpatialState> spatial_;
};

BoundResult make_bound_result(std::string method, std::size_t size, std::size_t v,
                              std::optional<double> lambda);

}  // namespace posthoc::app
