#include "posthoc/reference_families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "posthoc/bounds.hpp"

namespace posthoc {
namespace {

// floor() with a small relative tolerance below integers.
std::size_t floor_budget(double x) {
  if (!(x > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(x * (1.0 + 1e-12)));
}

}  // namespace

bool is_nested(std::span<const ReferenceSet> items) {
  for (std::size_t k = 1; k < items.size(); ++k) {
    const auto& inner = items[k - 1].region;
    const auto& outer = items[k].region;
    if (!std::includes(outer.begin(), outer.end(), inner.begin(), inner.end())) return false;
  }
  return true;
}

bool is_disjoint(std::span<const ReferenceSet> items) {
  std::vector<std::size_t> all;
  for (const auto& item : items) all.insert(all.end(), item.region.begin(), item.region.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

ReferenceFamily::ReferenceFamily(std::vector<ReferenceSet> items, FamilyStructure structure)
    : items_(std::move(items)), structure_(structure) {
  for (auto& item : items_) item.zeta = std::min(item.zeta, item.region.size());
  if (structure_ == FamilyStructure::Nested && !is_nested(items_)) {
    throw InputError("reference family tagged nested but R_k ⊄ R_{k+1} for some k");
  }
  if (structure_ == FamilyStructure::Disjoint && !is_disjoint(items_)) {
    throw InputError("reference family tagged disjoint but two regions intersect");
  }
}

namespace {

struct BranchAndBound {
  std::vector<std::size_t> budgets;
  // element_constraints[e]: constraints touching element e.
  std::vector<std::vector<std::size_t>> element_constraints;
  std::size_t best = 0;

  void search(std::size_t e, std::size_t chosen) {
    const std::size_t n = element_constraints.size();
    if (chosen + (n - e) <= best) return;
    if (e == n) {
      best = chosen;
      return;
    }
    const auto& touching = element_constraints[e];
    const bool fits = std::all_of(touching.begin(), touching.end(),
                                  [this](std::size_t c) { return budgets[c] > 0; });
    if (fits) {
      for (std::size_t c : touching) --budgets[c];
      search(e + 1, chosen + 1);
      for (std::size_t c : touching) ++budgets[c];
    }
    search(e + 1, chosen);
  }
};

}  // namespace

std::size_t optimal_bound(const IndexSet& s, const ReferenceFamily& fam) {
  if (s.size() > kOptimalBoundMaxSize) {
    throw InputError("optimal_bound is exponential and limited to |S| <= 24 (got " +
                     std::to_string(s.size()) +
                     "); use augmentation_bound or disjoint_sum_bound instead");
  }
  const auto elems = s.indices();
  // Active constraints: those whose budget is smaller than their overlap with S.
  std::vector<std::vector<std::size_t>> members;  // positions within S
  std::vector<std::size_t> budgets;
  for (const auto& item : fam.items()) {
    std::vector<std::size_t> inside;
    for (std::size_t pos = 0; pos < elems.size(); ++pos) {
      if (item.region.contains(elems[pos])) inside.push_back(pos);
    }
    if (item.zeta < inside.size()) {
      members.push_back(std::move(inside));
      budgets.push_back(item.zeta);
    }
  }
  std::vector<std::vector<std::size_t>> touching(elems.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t pos : members[c]) touching[pos].push_back(c);
  }
  std::size_t free_count = 0;
  std::vector<std::size_t> constrained;
  for (std::size_t pos = 0; pos < elems.size(); ++pos) {
    if (touching[pos].empty()) {
      ++free_count;
    } else {
      constrained.push_back(pos);
    }
  }
  // Tightest elements first: fewest total slack across the constraints they touch.
  auto tightness = [&](std::size_t pos) {
    double score = 0.0;
    for (std::size_t c : touching[pos]) {
      score += 1.0 / (1.0 + static_cast<double>(budgets[c]));
    }
    return score;
  };
  std::stable_sort(constrained.begin(), constrained.end(),
                   [&](std::size_t a, std::size_t b) { return tightness(a) > tightness(b); });

  BranchAndBound solver;
  solver.budgets = budgets;
  solver.element_constraints.reserve(constrained.size());
  for (std::size_t pos : constrained) solver.element_constraints.push_back(touching[pos]);
  solver.search(0, 0);
  return free_count + solver.best;
}

std::size_t augmentation_bound(const IndexSet& s, const ReferenceFamily& fam) {
  std::size_t best = s.size();
  for (const auto& item : fam.items()) {
    const std::size_t outside = s.size() - intersection_size(s, item.region);
    best = std::min(best, outside + item.zeta);
  }
  return best;
}

std::size_t disjoint_sum_bound(const IndexSet& s, const ReferenceFamily& fam) {
  std::size_t total = 0;
  std::vector<bool> covered(s.size(), false);
  const auto elems = s.indices();
  for (const auto& item : fam.items()) {
    std::size_t inside = 0;
    for (std::size_t pos = 0; pos < elems.size(); ++pos) {
      if (item.region.contains(elems[pos])) {
        ++inside;
        covered[pos] = true;
      }
    }
    total += std::min(inside, item.zeta);
  }
  total += static_cast<std::size_t>(std::count(covered.begin(), covered.end(), false));
  return std::min(total, s.size());
}

ReferenceFamily threshold_family(const PValueVector& p, std::span<const double> curve) {
  std::vector<ReferenceSet> items;
  items.reserve(curve.size());
  for (std::size_t k = 1; k <= curve.size(); ++k) {
    std::vector<std::size_t> region;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < curve[k - 1]) region.push_back(i);
    }
    items.push_back({IndexSet(std::move(region)), k - 1});
  }
  const bool nested = is_nested(items);
  return ReferenceFamily(std::move(items),
                         nested ? FamilyStructure::Nested : FamilyStructure::General);
}

std::size_t markov_zeta(const PValueVector& p, const IndexSet& r1, double alpha, double t) {
  check_alpha(alpha);
  r1.check_within(p.size());
  if (!(t > 0.0 && t < alpha)) {
    throw InputError("Markov budget needs 0 < t < alpha (t=" + std::to_string(t) +
                     ", alpha=" + std::to_string(alpha) + ")");
  }
  std::size_t count = 0;
  for (std::size_t i : r1) count += p[i] > t ? 1 : 0;
  return std::min(r1.size(), floor_budget(static_cast<double>(count) / (1.0 - t / alpha)));
}

namespace {

std::size_t dkw_value(std::size_t count, double t, double c, DkwRounding rounding) {
  const double w = 1.0 - t;
  const double inner = c / (2.0 * w) + std::sqrt(c * c / (4.0 * w * w) + static_cast<double>(count) / w);
  if (rounding == DkwRounding::FloorThenSquare) {
    const std::size_t f = floor_budget(inner);
    return f * f;
  }
  return floor_budget(inner * inner);
}

double dkw_constant(double alpha) { return std::sqrt(0.5 * std::log(1.0 / alpha)); }

}  // namespace

std::size_t dkw_zeta_at(const PValueVector& p, const IndexSet& r1, double alpha, double t,
                        DkwRounding rounding) {
  check_alpha(alpha);
  r1.check_within(p.size());
  if (!(t >= 0.0 && t < 1.0)) throw InputError("DKW evaluation point must lie in [0,1)");
  std::size_t count = 0;
  for (std::size_t i : r1) count += p[i] > t ? 1 : 0;
  return dkw_value(count, t, dkw_constant(alpha), rounding);
}

std::size_t dkw_zeta(const PValueVector& p, const IndexSet& r1, double alpha,
                     DkwRounding rounding) {
  check_alpha(alpha);
  const auto sorted = sorted_restriction(p, r1);
  const double c = dkw_constant(alpha);
  // For a fixed count #{p > t} the expression increases with t, and the count
  // only drops at observed p-values, so the minimum over [0,1) is attained at
  // t = 0 or at one of the distinct p-values below 1.
  const auto positive = static_cast<std::size_t>(
      sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), 0.0));
  std::size_t best = dkw_value(positive, 0.0, c, rounding);
  for (std::size_t idx = 0; idx < sorted.size(); ++idx) {
    const double t = sorted[idx];
    if (t >= 1.0) break;
    if (idx > 0 && sorted[idx - 1] == t) continue;
    const auto above = static_cast<std::size_t>(
        sorted.end() - std::upper_bound(sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                                        sorted.end(), t));
    best = std::min(best, dkw_value(above, t, c, rounding));
  }
  return std::min(best, r1.size());
}

bool jer_holds(const ReferenceFamily& fam, const GroundTruth& truth) {
  return std::all_of(fam.items().begin(), fam.items().end(), [&](const ReferenceSet& item) {
    return intersection_size(item.region, truth.h0) <= item.zeta;
  });
}

}  // namespace posthoc
