#pragma once

// Post hoc bounds on the number of false positives |S ∩ H0| that hold
// simultaneously over all selections S.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posthoc/core.hpp"
#include "posthoc/templates.hpp"

namespace posthoc {

struct BoundValue {
  std::size_t v = 0;
  std::string method;
  double alpha = 0.0;
  std::optional<double> lambda;
};

/// Throws InputError unless alpha lies in (0, 1).
void check_alpha(double alpha);

/// |S| ∧ (#{i in S : p_i >= alpha k0 / m} + k0 - 1)
BoundValue k0_bonferroni(const PValueVector& p, const IndexSet& s, double alpha, std::size_t k0);

/// Minimum of the k-Bonferroni bounds over k = 1..|S|.
BoundValue simes_bound(const PValueVector& p, const IndexSet& s, double alpha);

/// Smallest u such that the shifted line v -> alpha (v - u) / m stays at or
/// below every ordered p-value p_(v:S), v > u. Always equals |S| - Simes bound.
std::size_t simes_graphical_u(const PValueVector& p, const IndexSet& s, double alpha);

/// min over k <= min(|S|, K) of #{i in S : p_i >= t_k(lambda)} + k - 1, capped at |S|.
BoundValue threshold_bound(const PValueVector& p, const IndexSet& s, const Template& tpl,
                           double lambda);

/// Same minimisation given the ascending p-values of S and a precomputed
/// nondecreasing curve t_1..t_K. Runs in O(|S| + K).
std::size_t curve_bound(std::span<const double> sorted_selection, std::span<const double> curve);

/// Hypothesis indices ordered by p-value, ties broken by index.
std::vector<std::size_t> level_set_order(const PValueVector& p);

/// S_k = first k entries of level_set_order(p).
IndexSet level_set(const PValueVector& p, std::size_t k);

struct EnvelopePoint {
  std::size_t k = 0;
  std::size_t v = 0;
  std::size_t tp_lower = 0;
  double fdp_upper = 0.0;
};

struct Envelope {
  std::vector<EnvelopePoint> points;  // k = 1..m
};

using BoundFunction = std::function<std::size_t(const IndexSet&)>;

/// Evaluates `bound` on the nested level sets S_1 ⊂ ... ⊂ S_m.
Envelope envelope(const PValueVector& p, const BoundFunction& bound);

/// Envelope of the threshold bound for a fixed curve, without rebuilding
/// each level set. Matches envelope() with the corresponding bound function.
Envelope curve_envelope(const PValueVector& p, std::span<const double> curve);

}  // namespace posthoc
