#include "posthoc/app/selection.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "posthoc/bounds.hpp"

namespace posthoc::app {
namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    std::string part(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    const auto first = part.find_first_not_of(" \t");
    const auto last = part.find_last_not_of(" \t");
    parts.push_back(first == std::string::npos ? std::string{}
                                               : part.substr(first, last - first + 1));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double number(const std::string& text, const std::string& term) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !std::isfinite(value)) {
    throw InputError("selection term '" + term + "': '" + text + "' is not a number");
  }
  return value;
}

std::size_t count(const std::string& text, const std::string& term) {
  const double value = number(text, term);
  if (value < 0.0 || value != std::floor(value)) {
    throw InputError("selection term '" + term + "' needs a non-negative integer");
  }
  return static_cast<std::size_t>(value);
}

const std::vector<double>& log_fc(const Inputs& inputs, const std::string& term) {
  if (!inputs.fold_change) {
    throw SelectionModeError("selection term '" + term +
                             "' needs fold changes, which p-value inputs do not have");
  }
  return inputs.fold_change->log_ratio;
}

template <class Pred>
IndexSet filter(std::size_t m, Pred pred) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (pred(i)) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

IndexSet resolve_term(const std::string& term, const Inputs& inputs) {
  const std::size_t m = inputs.m();
  const auto& p = inputs.pvalues;
  if (term == "all") return IndexSet::all(m);
  auto after = [&term](std::size_t n) { return term.substr(n); };
  if (term.rfind("top=", 0) == 0) {
    return level_set(p, std::min(count(after(4), term), m));
  }
  if (term.rfind("bh=", 0) == 0) {
    const double q = number(after(3), term);
    const std::size_t k = bh_count(p, q);
    const double cutoff = q * static_cast<double>(k) / static_cast<double>(m);
    return filter(m, [&](std::size_t i) { return k > 0 && p[i] <= cutoff; });
  }
  if (term.rfind("p<=", 0) == 0) {
    const double x = number(after(3), term);
    return filter(m, [&](std::size_t i) { return p[i] <= x; });
  }
  if (term.rfind("p<", 0) == 0) {
    const double x = number(after(2), term);
    return filter(m, [&](std::size_t i) { return p[i] < x; });
  }
  if (term.rfind("|fc|>", 0) == 0) {
    const double x = number(after(5), term);
    const auto& fc = log_fc(inputs, term);
    return filter(m, [&](std::size_t i) { return std::abs(fc[i]) > x; });
  }
  if (term.rfind("fc>", 0) == 0) {
    const double x = number(after(3), term);
    const auto& fc = log_fc(inputs, term);
    return filter(m, [&](std::size_t i) { return fc[i] > x; });
  }
  if (term.rfind("fc<", 0) == 0) {
    const double x = number(after(3), term);
    const auto& fc = log_fc(inputs, term);
    return filter(m, [&](std::size_t i) { return fc[i] < x; });
  }
  if (term.rfind("ids=", 0) == 0) {
    auto ids = split(after(4), '|');
    ids.erase(std::remove(ids.begin(), ids.end(), std::string{}), ids.end());
    return resolve_ids(ids, inputs);
  }
  if (term.rfind("idx=", 0) == 0) {
    std::vector<std::size_t> rows;
    for (const auto& part : split(after(4), '|')) {
      if (part.empty()) continue;
      const std::size_t k = count(part, term);
      if (k < 1 || k > m) {
        throw InputError("selection term '" + term + "': row " + part + " outside 1.." +
                         std::to_string(m));
      }
      rows.push_back(k - 1);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return IndexSet(std::move(rows));
  }
  throw InputError("unknown selection term '" + term +
                   "' (expected all, top=k, bh=q, p<x, fc>x, fc<x, |fc|>x, ids=..., idx=...)");
}

}  // namespace

UnknownIdsError::UnknownIdsError(std::vector<std::string> ids)
    : InputError("unknown ids: " + join(ids, ", ")), ids_(std::move(ids)) {}

std::size_t bh_count(const PValueVector& p, double q) {
  std::vector<double> sorted(p.values().begin(), p.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  for (std::size_t k = sorted.size(); k >= 1; --k) {
    if (sorted[k - 1] <= q * static_cast<double>(k) / m) return k;
  }
  return 0;
}

IndexSet resolve_ids(const std::vector<std::string>& ids, const Inputs& inputs) {
  std::vector<std::size_t> rows;
  std::vector<std::string> unknown;
  for (const auto& id : ids) {
    const auto it = inputs.index.find(id);
    if (it == inputs.index.end()) {
      unknown.push_back(id);
    } else {
      rows.push_back(it->second);
    }
  }
  if (!unknown.empty()) throw UnknownIdsError(std::move(unknown));
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return IndexSet(std::move(rows));
}

IndexSet resolve_selection(std::string_view spec, const Inputs& inputs) {
  std::optional<IndexSet> result;
  for (const auto& term : split(spec, ',')) {
    if (term.empty()) throw InputError("empty term in selection '" + std::string(spec) + "'");
    auto set = resolve_term(term, inputs);
    result = result ? set_intersection(*result, set) : std::move(set);
  }
  return *result;
}

NamedSelection parse_named_selection(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {std::string(text), std::string(text)};
  NamedSelection out{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
  if (out.name.empty() || out.spec.empty()) {
    throw InputError("selection '" + std::string(text) + "' should read name:spec");
  }
  return out;
}

}  // namespace posthoc::app
