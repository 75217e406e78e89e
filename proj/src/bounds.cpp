#include "posthoc/bounds.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

namespace posthoc {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("alpha must lie in (0,1), got " + std::to_string(alpha));
  }
}

namespace {

// Number of entries of an ascending range strictly below t.
std::size_t count_below(std::span<const double> sorted, double t) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

// alpha k / m, written once so every Simes-type threshold is bit-identical.
double simes_threshold(double alpha, std::size_t k, std::size_t m) {
  return alpha * static_cast<double>(k) / static_cast<double>(m);
}

}  // namespace

BoundValue k0_bonferroni(const PValueVector& p, const IndexSet& s, double alpha, std::size_t k0) {
  check_alpha(alpha);
  s.check_within(p.size());
  if (k0 < 1) throw InputError("k0 must be at least 1");
  const double t = simes_threshold(alpha, k0, p.size());
  std::size_t count = 0;
  for (std::size_t i : s) count += p[i] >= t ? 1 : 0;
  return {std::min(s.size(), count + k0 - 1), "k0-bonferroni", alpha, std::nullopt};
}

BoundValue simes_bound(const PValueVector& p, const IndexSet& s, double alpha) {
  check_alpha(alpha);
  const auto sorted = sorted_restriction(p, s);
  const std::size_t n = sorted.size();
  std::size_t best = n;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t at_or_above = n - count_below(sorted, simes_threshold(alpha, k, p.size()));
    best = std::min(best, at_or_above + k - 1);
  }
  return {best, "simes", alpha, std::nullopt};
}

std::size_t simes_graphical_u(const PValueVector& p, const IndexSet& s, double alpha) {
  check_alpha(alpha);
  const auto sorted = sorted_restriction(p, s);
  const std::size_t n = sorted.size();
  for (std::size_t u = 0; u <= n; ++u) {
    bool line_below = true;
    for (std::size_t v = u + 1; v <= n && line_below; ++v) {
      line_below = sorted[v - 1] >= simes_threshold(alpha, v - u, p.size());
    }
    if (line_below) return u;
  }
  return n;
}

std::size_t curve_bound(std::span<const double> sorted_selection, std::span<const double> curve) {
  const std::size_t n = sorted_selection.size();
  const std::size_t kmax = std::min(n, curve.size());
  std::size_t best = n;
  std::size_t below = 0;  // #{x < t_k}, advanced monotonically while the curve is nondecreasing
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double t = curve[k - 1];
    if (t < previous) {
      below = count_below(sorted_selection, t);
    } else {
      while (below < n && sorted_selection[below] < t) ++below;
    }
    previous = t;
    best = std::min(best, n - below + k - 1);
  }
  return best;
}

BoundValue threshold_bound(const PValueVector& p, const IndexSet& s, const Template& tpl,
                           double lambda) {
  if (tpl.m() != p.size()) {
    throw InputError("template built for m=" + std::to_string(tpl.m()) + " but p has m=" +
                     std::to_string(p.size()));
  }
  const auto sorted = sorted_restriction(p, s);
  const auto curve = tpl.curve(lambda, std::min(sorted.size(), tpl.size()));
  return {curve_bound(sorted, curve), tpl.name(), 0.0, lambda};
}

std::vector<std::size_t> level_set_order(const PValueVector& p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return order;
}

IndexSet level_set(const PValueVector& p, std::size_t k) {
  if (k > p.size()) throw InputError("level set size exceeds m");
  auto order = level_set_order(p);
  order.resize(k);
  return IndexSet(std::move(order));
}

namespace {

EnvelopePoint make_point(std::size_t k, std::size_t v) {
  return {k, v, k - v, k == 0 ? 0.0 : static_cast<double>(v) / static_cast<double>(k)};
}

}  // namespace

Envelope envelope(const PValueVector& p, const BoundFunction& bound) {
  const auto order = level_set_order(p);
  Envelope env;
  env.points.reserve(p.size());
  std::vector<std::size_t> prefix;
  prefix.reserve(p.size());
  for (std::size_t k = 1; k <= p.size(); ++k) {
    prefix.push_back(order[k - 1]);
    const std::size_t v = std::min(bound(IndexSet(prefix)), k);
    env.points.push_back(make_point(k, v));
  }
  return env;
}

Envelope curve_envelope(const PValueVector& p, std::span<const double> curve) {
  // On S_j the count of p-values below t_k is min(j, N_k) with N_k the count
  // over all m hypotheses. For a nondecreasing curve N_k is nondecreasing, so
  // the terms with N_k >= j form a suffix k >= k*(j) contributing k*(j) - 1,
  // and the remaining terms j - N_k + k - 1 are handled by a prefix minimum.
  const std::size_t m = p.size();
  std::vector<double> sorted(p.values().begin(), p.values().end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t K = std::min(curve.size(), m);
  if (!std::is_sorted(curve.begin(), curve.begin() + static_cast<std::ptrdiff_t>(K))) {
    return envelope(p, [&](const IndexSet& s) {
      return curve_bound(sorted_restriction(p, s), curve.first(std::min(K, s.size())));
    });
  }

  std::vector<std::int64_t> below(K + 1, 0);  // below[k] = N_k, 1-based
  std::vector<std::int64_t> prefix_min(K + 1, std::numeric_limits<std::int64_t>::max());
  for (std::size_t k = 1; k <= K; ++k) {
    below[k] = static_cast<std::int64_t>(count_below(sorted, curve[k - 1]));
    const std::int64_t term = static_cast<std::int64_t>(k) - below[k];
    prefix_min[k] = std::min(prefix_min[k - 1], term);
  }

  Envelope env;
  env.points.reserve(m);
  std::size_t k_star = 1;  // smallest k with N_k >= j (K + 1 if none)
  for (std::size_t j = 1; j <= m; ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    while (k_star <= K && below[k_star] < jj) ++k_star;
    const std::size_t kmax = std::min(j, K);
    std::int64_t best = jj;
    if (k_star <= kmax) best = std::min(best, static_cast<std::int64_t>(k_star) - 1);
    const std::size_t last_partial = std::min(k_star - 1, kmax);
    if (last_partial >= 1) best = std::min(best, jj - 1 + prefix_min[last_partial]);
    env.points.push_back(make_point(j, static_cast<std::size_t>(best)));
  }
  return env;
}

}  // namespace posthoc
