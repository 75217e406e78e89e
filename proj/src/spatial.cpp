#include "posthoc/spatial.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "posthoc/bounds.hpp"

namespace posthoc {

SegmentFamily::SegmentFamily(std::vector<Chromosome> chromosomes, std::vector<Segment> segments,
                             std::size_t segment_size)
    : chromosomes_(std::move(chromosomes)),
      segments_(std::move(segments)),
      segment_size_(segment_size) {
  for (const auto& c : chromosomes_) m_ = std::max(m_, c.offset + c.size);
}

IndexSet SegmentFamily::region(std::size_t k) const {
  const auto& seg = segments_.at(k);
  return IndexSet::range(seg.begin, seg.end);
}

SegmentFamily build_segments(std::span<const std::size_t> m_per_chrom, std::size_t s) {
  if (s < 1) throw InputError("segment size must be at least 1");
  if (m_per_chrom.empty()) throw InputError("at least one chromosome is required");
  std::vector<Chromosome> chromosomes;
  std::vector<Segment> segments;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < m_per_chrom.size(); ++c) {
    const std::size_t mc = m_per_chrom[c];
    if (mc == 0) throw InputError("chromosome " + std::to_string(c) + " is empty");
    Chromosome chrom{offset, mc, segments.size(), (mc + s - 1) / s};
    for (std::size_t k = 0; k < chrom.segment_count; ++k) {
      segments.push_back({c, offset + k * s, offset + std::min((k + 1) * s, mc)});
    }
    chromosomes.push_back(chrom);
    offset += mc;
  }
  return SegmentFamily(std::move(chromosomes), std::move(segments), s);
}

BudgetRule BudgetRule::markov(PValueVector p, double t) {
  auto shared = std::make_shared<const PValueVector>(std::move(p));
  return BudgetRule(BudgetSpec{BudgetSpec::Kind::Markov, t}.to_string(), [shared, t](const IndexSet& r, double level) {
    return markov_zeta(*shared, r, level, t);
  });
}

BudgetRule BudgetRule::markov_level_squared(PValueVector p) {
  auto shared = std::make_shared<const PValueVector>(std::move(p));
  return BudgetRule("markov:sq", [shared](const IndexSet& r, double level) {
    return markov_zeta(*shared, r, level, level * level);
  });
}

BudgetRule BudgetRule::dkw(PValueVector p, DkwRounding rounding) {
  auto shared = std::make_shared<const PValueVector>(std::move(p));
  const char* name = rounding == DkwRounding::SquareThenFloor ? "dkw" : "dkw:floor-square";
  return BudgetRule(name, [shared, rounding](const IndexSet& r, double level) {
    return dkw_zeta(*shared, r, level, rounding);
  });
}

BudgetRule BudgetRule::perm_beta(TwoSampleDataset ds, PermutationPlan plan,
                                 TwoSampleStatistic stat) {
  auto shared = std::make_shared<const TwoSampleDataset>(std::move(ds));
  return BudgetRule("perm-beta", [shared, plan, stat](const IndexSet& r, double level) {
    return single_set_beta_zeta(*shared, r, level, plan, stat);
  });
}

BudgetSpec BudgetSpec::parse(std::string_view text) {
  if (text == "dkw") return {Kind::Dkw, 0.0};
  if (text == "dkw:floor-square") return {Kind::DkwFloorSquare, 0.0};
  if (text == "perm-beta") return {Kind::PermBeta, 0.0};
  if (text == "markov:sq") return {Kind::MarkovLevelSquared, 0.0};
  if (text.starts_with("markov:")) {
    const std::string value(text.substr(7));
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty() || !(t > 0.0 && t < 1.0)) {
      throw InputError("invalid Markov threshold in budget '" + std::string(text) + "'");
    }
    return {Kind::Markov, t};
  }
  throw InputError("unknown budget rule '" + std::string(text) +
                   "' (expected markov:<t>, markov:sq, dkw, dkw:floor-square or perm-beta)");
}

std::string BudgetSpec::to_string() const {
  switch (kind) {
    case Kind::Markov: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "markov:%.17g", t);
      return buf;
    }
    case Kind::MarkovLevelSquared:
      return "markov:sq";
    case Kind::Dkw:
      return "dkw";
    case Kind::DkwFloorSquare:
      return "dkw:floor-square";
    case Kind::PermBeta:
      return "perm-beta";
  }
  return "dkw";
}

BudgetRule make_budget_rule(const BudgetSpec& spec, const PValueVector& p,
                            const TwoSampleDataset* ds, const PermutationPlan* plan,
                            TwoSampleStatistic stat) {
  switch (spec.kind) {
    case BudgetSpec::Kind::Markov:
      return BudgetRule::markov(p, spec.t);
    case BudgetSpec::Kind::MarkovLevelSquared:
      return BudgetRule::markov_level_squared(p);
    case BudgetSpec::Kind::Dkw:
      return BudgetRule::dkw(p);
    case BudgetSpec::Kind::DkwFloorSquare:
      return BudgetRule::dkw(p, DkwRounding::FloorThenSquare);
    case BudgetSpec::Kind::PermBeta:
      if (ds == nullptr || plan == nullptr) {
        throw ConfigError("the perm-beta budget needs two-sample data");
      }
      return BudgetRule::perm_beta(*ds, *plan, stat);
  }
  throw InputError("unknown budget rule");
}

ReferenceFamily calibrate_family(const SegmentFamily& fam, double alpha, const BudgetRule& rule) {
  check_alpha(alpha);
  std::vector<ReferenceSet> items;
  items.reserve(fam.segments().size());
  const double m = static_cast<double>(fam.m());
  for (const auto& chrom : fam.chromosomes()) {
    const double alpha_c = alpha * static_cast<double>(chrom.size) / m;
    const double level = alpha_c / static_cast<double>(chrom.segment_count);
    for (std::size_t k = 0; k < chrom.segment_count; ++k) {
      auto region = fam.region(chrom.first_segment + k);
      const std::size_t zeta = rule.zeta(region, level);
      items.push_back({std::move(region), zeta});
    }
  }
  return ReferenceFamily(std::move(items), FamilyStructure::Disjoint);
}

std::vector<TreeNode> AggregationTree::shape(const SegmentFamily& fam) {
  std::vector<TreeNode> nodes;
  for (std::size_t c = 0; c < fam.chromosomes().size(); ++c) {
    const auto& chrom = fam.chromosomes()[c];
    std::vector<std::size_t> level;
    for (std::size_t k = 0; k < chrom.segment_count; ++k) {
      const auto& seg = fam.segments()[chrom.first_segment + k];
      level.push_back(nodes.size());
      nodes.push_back({c, seg.begin, seg.end, 0, 0, -1, -1});
    }
    std::size_t depth = 0;
    while (level.size() > 1) {
      ++depth;
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        const auto& a = nodes[level[i]];
        const auto& b = nodes[level[i + 1]];
        TreeNode parent{c, a.begin, b.end, 0, depth, static_cast<long>(level[i]),
                        static_cast<long>(level[i + 1])};
        next.push_back(nodes.size());
        nodes.push_back(parent);
      }
      if (level.size() % 2 == 1) next.push_back(level.back());
      level = std::move(next);
    }
  }
  return nodes;
}

AggregationTree::AggregationTree(const SegmentFamily& fam, std::vector<std::size_t> zetas)
    : nodes_(shape(fam)), m_(fam.m()) {
  if (zetas.size() != nodes_.size()) {
    throw InputError("tree has " + std::to_string(nodes_.size()) + " nodes but " +
                     std::to_string(zetas.size()) + " budgets were given");
  }
  std::vector<bool> is_child(nodes_.size(), false);
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    nodes_[v].zeta = std::min(zetas[v], nodes_[v].size());
    if (!nodes_[v].is_leaf()) {
      is_child[static_cast<std::size_t>(nodes_[v].left)] = true;
      is_child[static_cast<std::size_t>(nodes_[v].right)] = true;
    }
  }
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (!is_child[v]) roots_.push_back(v);
  }
}

std::size_t AggregationTree::node_count(std::size_t chrom) const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [chrom](const TreeNode& n) { return n.chrom == chrom; }));
}

ReferenceFamily AggregationTree::as_family() const {
  std::vector<ReferenceSet> items;
  items.reserve(nodes_.size());
  for (const auto& n : nodes_) items.push_back({IndexSet::range(n.begin, n.end), n.zeta});
  return ReferenceFamily(std::move(items));
}

ReferenceFamily AggregationTree::leaf_family() const {
  std::vector<ReferenceSet> items;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) items.push_back({IndexSet::range(n.begin, n.end), n.zeta});
  }
  return ReferenceFamily(std::move(items), FamilyStructure::Disjoint);
}

AggregationTree build_tree(const SegmentFamily& fam, const BudgetRule& rule, double alpha) {
  check_alpha(alpha);
  const auto nodes = AggregationTree::shape(fam);
  std::vector<std::size_t> per_chrom(fam.chromosomes().size(), 0);
  for (const auto& n : nodes) ++per_chrom[n.chrom];
  const double m = static_cast<double>(fam.m());
  std::vector<std::size_t> zetas;
  zetas.reserve(nodes.size());
  for (const auto& n : nodes) {
    const auto& chrom = fam.chromosomes()[n.chrom];
    const double alpha_c = alpha * static_cast<double>(chrom.size) / m;
    const double level = alpha_c / static_cast<double>(per_chrom[n.chrom]);
    zetas.push_back(rule.zeta(IndexSet::range(n.begin, n.end), level));
  }
  return AggregationTree(fam, std::move(zetas));
}

std::size_t tree_bound(const IndexSet& s, const AggregationTree& tree) {
  const std::size_t m = tree.m();
  std::vector<std::size_t> prefix(m + 1, 0);
  std::size_t beyond = 0;
  for (std::size_t i : s) {
    if (i < m) {
      prefix[i + 1] = 1;
    } else {
      ++beyond;
    }
  }
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] += prefix[i];

  const auto nodes = tree.nodes();
  std::vector<std::size_t> best(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto& n = nodes[v];
    const std::size_t here = std::min(n.zeta, prefix[n.end] - prefix[n.begin]);
    if (n.is_leaf()) {
      best[v] = here;
    } else {
      const std::size_t split = best[static_cast<std::size_t>(n.left)] +
                                best[static_cast<std::size_t>(n.right)];
      best[v] = std::min(here, split);
    }
  }
  std::size_t total = beyond;
  std::size_t covered = 0;
  for (std::size_t r : tree.roots()) {
    total += best[r];
    covered += prefix[nodes[r].end] - prefix[nodes[r].begin];
  }
  total += (s.size() - beyond) - covered;
  return std::min(total, s.size());
}

}  // namespace posthoc
