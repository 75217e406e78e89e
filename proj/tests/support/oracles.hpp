#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They follow the defining formulas directly (enumeration, brute force,
// quadrature) and share no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "posthoc/core.hpp"
#include "posthoc/reference_families.hpp"
#include "posthoc/spatial.hpp"

namespace oracle {

using posthoc::IndexSet;
using posthoc::PValueVector;

/// min(|S|, #{i in S : p_i >= t} + k - 1)
inline std::size_t count_bound(const PValueVector& p, const IndexSet& s, double t, std::size_t k) {
  std::size_t above = 0;
  for (std::size_t i : s) above += p[i] >= t ? 1 : 0;
  return std::min(s.size(), above + k - 1);
}

inline std::size_t kbonf(const PValueVector& p, const IndexSet& s, double alpha, std::size_t k0) {
  return count_bound(p, s, alpha * static_cast<double>(k0) / static_cast<double>(p.size()), k0);
}

inline std::size_t simes(const PValueVector& p, const IndexSet& s, double alpha) {
  std::size_t best = s.size();
  for (std::size_t k = 1; k <= s.size(); ++k) best = std::min(best, kbonf(p, s, alpha, k));
  return best;
}

/// Smallest u in [0, |S|] with p_(v:S) >= alpha (v - u) / m for every v > u.
inline std::size_t graphical_u(const PValueVector& p, const IndexSet& s, double alpha) {
  std::vector<double> sorted;
  for (std::size_t i : s) sorted.push_back(p[i]);
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(p.size());
  for (std::size_t u = 0; u <= sorted.size(); ++u) {
    bool ok = true;
    for (std::size_t v = u + 1; v <= sorted.size() && ok; ++v) {
      ok = sorted[v - 1] >= alpha * static_cast<double>(v - u) / m;
    }
    if (ok) return u;
  }
  return sorted.size();
}

/// min over k <= min(|S|, K) of count_bound with threshold t(k).
inline std::size_t threshold(const PValueVector& p, const IndexSet& s, std::size_t K,
                             const std::function<double(std::size_t)>& t) {
  std::size_t best = s.size();
  for (std::size_t k = 1; k <= std::min(s.size(), K); ++k) {
    best = std::min(best, count_bound(p, s, t(k), k));
  }
  return best;
}

/// max |A| over A ⊆ S with |A ∩ R_k| <= zeta_k for every k, by enumeration.
inline std::size_t optimal(const IndexSet& s, const std::vector<posthoc::ReferenceSet>& fam) {
  const auto elems = s.indices();
  const std::size_t n = elems.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (size <= best) continue;
    bool ok = true;
    for (const auto& item : fam) {
      std::size_t inside = 0;
      for (std::size_t b = 0; b < n; ++b) {
        if ((mask >> b & 1) && item.region.contains(elems[b])) ++inside;
      }
      if (inside > std::min(item.zeta, item.region.size())) {
        ok = false;
        break;
      }
    }
    if (ok) best = size;
  }
  return best;
}

/// All partitions of node v into tree nodes, each as a list of node ids.
inline std::vector<std::vector<std::size_t>> partitions(std::span<const posthoc::TreeNode> nodes,
                                                        std::size_t v) {
  std::vector<std::vector<std::size_t>> out{{v}};
  if (nodes[v].is_leaf()) return out;
  const auto left = partitions(nodes, static_cast<std::size_t>(nodes[v].left));
  const auto right = partitions(nodes, static_cast<std::size_t>(nodes[v].right));
  for (const auto& a : left) {
    for (const auto& b : right) {
      auto joined = a;
      joined.insert(joined.end(), b.begin(), b.end());
      out.push_back(std::move(joined));
    }
  }
  return out;
}

/// Minimum over explicit partitions of every root of Σ_v min(zeta_v, |S ∩ R_v|),
/// plus the elements of S outside all roots.
inline std::size_t tree_partition_min(const IndexSet& s, const posthoc::AggregationTree& tree) {
  const auto nodes = tree.nodes();
  auto overlap = [&s](const posthoc::TreeNode& n) {
    std::size_t c = 0;
    for (std::size_t i : s) c += (i >= n.begin && i < n.end) ? 1 : 0;
    return c;
  };
  std::size_t total = 0;
  std::size_t covered = 0;
  for (std::size_t r : tree.roots()) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& part : partitions(nodes, r)) {
      std::size_t sum = 0;
      for (std::size_t v : part) sum += std::min(nodes[v].zeta, overlap(nodes[v]));
      best = std::min(best, sum);
    }
    total += best;
    covered += overlap(nodes[r]);
  }
  return std::min(s.size(), total + (s.size() - covered));
}

/// DKW budget minimised over the grid t = j / grid_size, j = 0..grid_size-1.
inline std::size_t dkw_grid(const PValueVector& p, const IndexSet& r1, double alpha,
                            bool floor_square = false, std::size_t grid_size = 10000) {
  const double c = std::sqrt(0.5 * std::log(1.0 / alpha));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(grid_size);
    std::size_t n = 0;
    for (std::size_t i : r1) n += p[i] > t ? 1 : 0;
    const double w = 1.0 - t;
    const double inner = c / (2 * w) + std::sqrt(c * c / (4 * w * w) + static_cast<double>(n) / w);
    const double f = std::floor(inner);
    best = std::min(best, floor_square ? f * f : std::floor(inner * inner));
  }
  return std::min(r1.size(), static_cast<std::size_t>(best));
}

/// Composite Simpson rule with n (even) panels.
inline double binomial_upper_tail(int n, int a, double x) {
  long double total = 0.0L;
  for (int j = a; j <= n; ++j) {
    const long double log_term = std::lgamma(n + 1.0L) - std::lgamma(j + 1.0L) -
                                 std::lgamma(n - j + 1.0L) + j * std::log(static_cast<long double>(x)) +
                                 (n - j) * std::log1p(-static_cast<long double>(x));
    total += std::exp(log_term);
  }
  return static_cast<double>(total);
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t n = 20000) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    sum += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

/// Upper normal tail by integrating the density from z to z + 40.
inline double normal_tail_quadrature(double z) {
  const double norm = 1.0 / std::sqrt(2.0 * M_PI);
  return simpson([norm](double x) { return norm * std::exp(-0.5 * x * x); }, z, z + 40.0, 200000);
}

inline std::vector<double> random_pvalues(std::mt19937_64& gen, std::size_t m,
                                          bool with_ties = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(m);
  for (auto& x : p) {
    x = u(gen);
    if (with_ties) x = std::round(x * 20.0) / 20.0;
  }
  return p;
}

inline IndexSet random_subset(std::mt19937_64& gen, std::size_t m, double keep = 0.5) {
  std::bernoulli_distribution coin(keep);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; ++i) {
    if (coin(gen)) idx.push_back(i);
  }
  return IndexSet(std::move(idx));
}

inline IndexSet mask_subset(std::uint64_t mask, std::size_t m) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; ++i) {
    if (mask >> i & 1) idx.push_back(i);
  }
  return IndexSet(std::move(idx));
}

}  // namespace oracle
