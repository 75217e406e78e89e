#pragma once

// Selection specifications: which hypotheses a bound is asked about.
//
// A spec is a comma-separated conjunction of terms:
//   all            every hypothesis
//   top=k          the k smallest p-values (ties broken by row order)
//   bh=q           hypotheses rejected by the BH step-up procedure at level q
//   p<x, p<=x      p-value cutoffs
//   fc>x, fc<x     natural log fold change above / below x (two-sample data)
//   |fc|>x         absolute log fold change above x
//   ids=a|b|c      explicit identifiers
//   idx=1|2|3      explicit 1-based row numbers

#include <string>
#include <string_view>
#include <vector>

#include "posthoc/app/inputs.hpp"
#include "posthoc/core.hpp"

namespace posthoc::app {

/// Raised when a selection names identifiers that are not in the inputs.
class UnknownIdsError : public InputError {
 public:
  explicit UnknownIdsError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

/// Raised when a term needs data the session does not have (fold changes in
/// a p-value-only session).
class SelectionModeError : public InputError {
 public:
  using InputError::InputError;
};

IndexSet resolve_selection(std::string_view spec, const Inputs& inputs);

/// Explicit identifiers; unknown ones are all reported together.
IndexSet resolve_ids(const std::vector<std::string>& ids, const Inputs& inputs);

/// Number of BH rejections at level q: max{k : p_(k) <= q k / m}.
std::size_t bh_count(const PValueVector& p, double q);

struct NamedSelection {
  std::string name;
  std::string spec;
};

/// "name:spec", or a bare spec named after itself.
NamedSelection parse_named_selection(std::string_view text);

}  // namespace posthoc::app
