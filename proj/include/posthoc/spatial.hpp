#pragma once

// Spatially structured reference families: fixed-size segments along each
// chromosome, budgets shared through a union bound, and the multi-scale tree
// obtained by merging neighbouring segments pairwise.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posthoc/calibration.hpp"
#include "posthoc/core.hpp"
#include "posthoc/reference_families.hpp"

namespace posthoc {

struct Segment {
  std::size_t chrom = 0;
  std::size_t begin = 0;  // global 0-based, inclusive
  std::size_t end = 0;    // exclusive
  std::size_t size() const noexcept { return end - begin; }
};

struct Chromosome {
  std::size_t offset = 0;  // global index of the first hypothesis
  std::size_t size = 0;    // m_c
  std::size_t first_segment = 0;
  std::size_t segment_count = 0;  // K_c = ceil(m_c / s)
};

class SegmentFamily {
 public:
  SegmentFamily(std::vector<Chromosome> chromosomes, std::vector<Segment> segments,
                std::size_t segment_size);

  std::size_t m() const noexcept { return m_; }
  std::size_t segment_size() const noexcept { return segment_size_; }
  std::span<const Chromosome> chromosomes() const noexcept { return chromosomes_; }
  std::span<const Segment> segments() const noexcept { return segments_; }
  IndexSet region(std::size_t k) const;

 private:
  std::vector<Chromosome> chromosomes_;
  std::vector<Segment> segments_;
  std::size_t segment_size_;
  std::size_t m_ = 0;
};

/// Consecutive segments of s hypotheses per chromosome; the last one of each
/// chromosome may be shorter. Chromosomes are laid out one after the other.
SegmentFamily build_segments(std::span<const std::size_t> m_per_chrom, std::size_t s);

/// f(R, level) -> zeta: a (1 - level) confidence bound on |R ∩ H0| for a
/// fixed region R.
class BudgetRule {
 public:
  using Fn = std::function<std::size_t(const IndexSet&, double)>;

  /// Markov budget with a fixed t (each level must exceed t).
  static BudgetRule markov(PValueVector p, double t);
  /// Markov budget with t = level^2.
  static BudgetRule markov_level_squared(PValueVector p);
  static BudgetRule dkw(PValueVector p, DkwRounding rounding = DkwRounding::SquareThenFloor);
  /// Permutation-calibrated beta template on the region alone.
  static BudgetRule perm_beta(TwoSampleDataset ds, PermutationPlan plan,
                              TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

  std::size_t zeta(const IndexSet& region, double level) const { return fn_(region, level); }
  const std::string& name() const noexcept { return name_; }

 private:
  BudgetRule(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  Fn fn_;
};

/// Budget rule selection as written on the command line:
/// "markov:<t>", "markov:sq" (t = level^2), "dkw", "perm-beta".
struct BudgetSpec {
  enum class Kind { Markov, MarkovLevelSquared, Dkw, DkwFloorSquare, PermBeta };
  Kind kind = Kind::Dkw;
  double t = 0.0;

  static BudgetSpec parse(std::string_view text);
  std::string to_string() const;
};

/// perm-beta needs the dataset and a permutation plan; the other rules use p.
BudgetRule make_budget_rule(const BudgetSpec& spec, const PValueVector& p,
                            const TwoSampleDataset* ds, const PermutationPlan* plan,
                            TwoSampleStatistic stat = TwoSampleStatistic::KnownVariance);

/// zeta_{c,k} = f(R_{c,k}, alpha_c / K_c) with alpha_c = alpha m_c / m.
/// The result is tagged disjoint.
ReferenceFamily calibrate_family(const SegmentFamily& fam, double alpha, const BudgetRule& rule);

struct TreeNode {
  std::size_t chrom = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t zeta = 0;
  std::size_t depth = 0;   // 0 for leaves
  long left = -1;          // child node ids, -1 for leaves
  long right = -1;
  std::size_t size() const noexcept { return end - begin; }
  bool is_leaf() const noexcept { return left < 0; }
};

/// Leaves are the segments; each level merges neighbours left to right and an
/// unpaired last node moves up unchanged, until one root per chromosome.
/// Node ids: children always precede their parent.
class AggregationTree {
 public:
  /// Tree shape for the family with all budgets zero.
  static std::vector<TreeNode> shape(const SegmentFamily& fam);

  /// Attaches budgets (one per node in shape() order), clamped to node size.
  AggregationTree(const SegmentFamily& fam, std::vector<std::size_t> zetas);

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::span<const std::size_t> roots() const noexcept { return roots_; }
  std::size_t m() const noexcept { return m_; }
  /// Number of nodes belonging to chromosome c (2 K_c - 1).
  std::size_t node_count(std::size_t chrom) const;

  ReferenceFamily as_family() const;
  ReferenceFamily leaf_family() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> roots_;
  std::size_t m_ = 0;
};

/// Budgets for every node via the union bound over the chromosome's whole
/// tree: zeta_v = f(R_v, alpha_c / (2 K_c - 1)), alpha_c = alpha m_c / m.
AggregationTree build_tree(const SegmentFamily& fam, const BudgetRule& rule, double alpha);

/// Minimum over partitions of each root into tree nodes of
/// Σ_v min(zeta_v, |S ∩ R_v|), plus the part of S outside every root.
std::size_t tree_bound(const IndexSet& s, const AggregationTree& tree);

}  // namespace posthoc
