#pragma once

// Reference families (R_k, zeta_k) with joint error rate control, and the
// post hoc bounds obtained from them by interpolation.

#include <cstddef>
#include <span>
#include <vector>

#include "posthoc/core.hpp"

namespace posthoc {

enum class FamilyStructure { General, Nested, Disjoint };

struct ReferenceSet {
  IndexSet region;
  std::size_t zeta = 0;
};

/// A list of reference sets with budgets. Budgets above |R_k| are clamped on
/// construction. A Nested or Disjoint tag is checked, not trusted.
class ReferenceFamily {
 public:
  ReferenceFamily() = default;
  explicit ReferenceFamily(std::vector<ReferenceSet> items,
                           FamilyStructure structure = FamilyStructure::General);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const ReferenceSet& operator[](std::size_t k) const { return items_[k]; }
  std::span<const ReferenceSet> items() const noexcept { return items_; }
  FamilyStructure structure() const noexcept { return structure_; }

 private:
  std::vector<ReferenceSet> items_;
  FamilyStructure structure_ = FamilyStructure::General;
};

bool is_nested(std::span<const ReferenceSet> items);
bool is_disjoint(std::span<const ReferenceSet> items);

/// Largest |S| accepted by optimal_bound.
inline constexpr std::size_t kOptimalBoundMaxSize = 24;

/// max{|A| : A ⊆ S, |R_k ∩ A| <= zeta_k for all k}, by branch and bound.
/// Exponential; meant as an oracle. Throws InputError if |S| > 24.
std::size_t optimal_bound(const IndexSet& s, const ReferenceFamily& fam);

/// |S| ∧ min_k (|S \ R_k| + zeta_k). Exact for nested families.
std::size_t augmentation_bound(const IndexSet& s, const ReferenceFamily& fam);

/// |S| ∧ (Σ_k |S ∩ R_k| ∧ zeta_k + |S \ ∪_k R_k|). Exact for disjoint families.
std::size_t disjoint_sum_bound(const IndexSet& s, const ReferenceFamily& fam);

/// Nested family R_k = {i : p_i < curve[k-1]}, zeta_k = k - 1. Its
/// augmentation bound is the threshold bound of the same curve.
ReferenceFamily threshold_family(const PValueVector& p, std::span<const double> curve);

/// Markov budget for a fixed set: |R1| ∧ floor(#{i in R1 : p_i > t} / (1 - t/alpha)),
/// valid under super-uniformity. Requires 0 < t < alpha.
std::size_t markov_zeta(const PValueVector& p, const IndexSet& r1, double alpha, double t);

enum class DkwRounding {
  /// floor((.)^2): the largest integer allowed by the DKW deviation bound.
  SquareThenFloor,
  /// floor(.)^2. Never larger than SquareThenFloor and can
  /// undercover, e.g. ten null p-values at level 0.0125 give 9.
  FloorThenSquare,
};

/// DKW budget for a fixed set under independence, minimised over t in [0,1).
std::size_t dkw_zeta(const PValueVector& p, const IndexSet& r1, double alpha,
                     DkwRounding rounding = DkwRounding::SquareThenFloor);

/// The DKW expression at one value of t (not capped at |R1|).
std::size_t dkw_zeta_at(const PValueVector& p, const IndexSet& r1, double alpha, double t,
                        DkwRounding rounding = DkwRounding::SquareThenFloor);

/// True iff |R_k ∩ H0| <= zeta_k for every k.
bool jer_holds(const ReferenceFamily& fam, const GroundTruth& truth);

}  // namespace posthoc
