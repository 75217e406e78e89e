#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "posthoc/bounds.hpp"
#include "posthoc/reference_families.hpp"

using namespace posthoc;

namespace {

ReferenceFamily two_sets() {
  return ReferenceFamily({{IndexSet{0, 1, 2}, 1}, {IndexSet{2, 3, 4}, 1}});
}

ReferenceFamily random_family(std::mt19937_64& gen, std::size_t m, FamilyStructure kind) {
  std::uniform_int_distribution<std::size_t> count(1, 5);
  std::vector<ReferenceSet> items;
  const std::size_t k = count(gen);
  if (kind == FamilyStructure::Nested) {
    IndexSet current;
    for (std::size_t j = 0; j < k; ++j) {
      current = set_union(current, oracle::random_subset(gen, m, 0.3));
      std::uniform_int_distribution<std::size_t> z(0, current.size());
      items.push_back({current, z(gen)});
    }
  } else if (kind == FamilyStructure::Disjoint) {
    std::uniform_int_distribution<std::size_t> owner(0, k);
    std::vector<std::vector<std::size_t>> parts(k);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t o = owner(gen);
      if (o < k) parts[o].push_back(i);
    }
    for (auto& part : parts) {
      std::uniform_int_distribution<std::size_t> z(0, part.size());
      const std::size_t zeta = z(gen);
      items.push_back({IndexSet(std::move(part)), zeta});
    }
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      auto r = oracle::random_subset(gen, m, 0.4);
      std::uniform_int_distribution<std::size_t> z(0, r.size());
      items.push_back({std::move(r), z(gen)});
    }
  }
  return ReferenceFamily(std::move(items), kind);
}

}  // namespace

TEST(ReferenceFamily, ValidatesStructureTags) {
  EXPECT_NO_THROW(ReferenceFamily({{IndexSet{0}, 0}, {IndexSet{0, 1}, 1}}, FamilyStructure::Nested));
  EXPECT_THROW(ReferenceFamily({{IndexSet{0, 2}, 0}, {IndexSet{0, 1}, 1}}, FamilyStructure::Nested),
               InputError);
  EXPECT_NO_THROW(ReferenceFamily({{IndexSet{0}, 0}, {IndexSet{1}, 1}}, FamilyStructure::Disjoint));
  EXPECT_THROW(ReferenceFamily({{IndexSet{0, 1}, 0}, {IndexSet{1}, 1}}, FamilyStructure::Disjoint),
               InputError);
  const ReferenceFamily clamped({{IndexSet{0, 1}, 7}});
  EXPECT_EQ(clamped[0].zeta, 2u);
}

TEST(OptimalBound, Examples) {
  const IndexSet s = IndexSet::range(0, 5);
  EXPECT_EQ(optimal_bound(s, ReferenceFamily()), 5u);
  EXPECT_EQ(optimal_bound(s, two_sets()), 2u);
  EXPECT_EQ(optimal_bound(s, ReferenceFamily({{IndexSet::range(0, 6), 0}})), 0u);
  EXPECT_THROW(optimal_bound(IndexSet::range(0, 25), ReferenceFamily()), InputError);
  EXPECT_EQ(optimal_bound(IndexSet::range(0, 24), ReferenceFamily()), 24u);
}

TEST(AugmentationBound, Examples) {
  const IndexSet s = IndexSet::range(0, 5);
  EXPECT_EQ(augmentation_bound(s, two_sets()), 3u);
  const ReferenceFamily nested({{IndexSet{0, 1}, 1}, {IndexSet{0, 1, 2, 3}, 2}},
                               FamilyStructure::Nested);
  EXPECT_EQ(augmentation_bound(IndexSet{0, 1}, nested), 1u);
  EXPECT_EQ(augmentation_bound(IndexSet{0}, nested), 1u);
  EXPECT_EQ(augmentation_bound(s, ReferenceFamily()), 5u);
}

TEST(DisjointSumBound, Examples) {
  const IndexSet s = IndexSet::range(0, 5);
  EXPECT_EQ(disjoint_sum_bound(s, two_sets()), 2u);
  const ReferenceFamily singletons(
      {{IndexSet{0}, 0}, {IndexSet{1}, 0}, {IndexSet{2}, 0}}, FamilyStructure::Disjoint);
  EXPECT_EQ(disjoint_sum_bound(IndexSet{0, 1, 2}, singletons), 0u);
  EXPECT_EQ(disjoint_sum_bound(IndexSet{5, 6}, singletons), 2u);
}

TEST(Relaxations, OracleAgreementOnRandomFamilies) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<std::size_t> msize(1, 12);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = msize(gen);
    for (auto kind : {FamilyStructure::General, FamilyStructure::Nested, FamilyStructure::Disjoint}) {
      const auto fam = random_family(gen, m, kind);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        const auto s = oracle::mask_subset(mask, m);
        const std::size_t star = optimal_bound(s, fam);
        ASSERT_EQ(star, oracle::optimal(s, std::vector<ReferenceSet>(fam.items().begin(),
                                                                     fam.items().end())));
        const std::size_t bar = augmentation_bound(s, fam);
        const std::size_t tilde = disjoint_sum_bound(s, fam);
        ASSERT_LE(star, bar);
        ASSERT_LE(star, tilde);
        if (kind == FamilyStructure::Nested) ASSERT_EQ(bar, star);
        if (kind == FamilyStructure::Disjoint) ASSERT_EQ(tilde, star);
      }
    }
  }
}

TEST(Relaxations, SuperadditivityOfTruePositiveBounds) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = 10;
    const auto fam = random_family(gen, m, FamilyStructure::General);
    const auto s1 = oracle::random_subset(gen, m, 0.4);
    const auto s2 = set_difference(oracle::random_subset(gen, m, 0.4), s1);
    const auto both = set_union(s1, s2);
    const auto tp = [&](const IndexSet& s) { return s.size() - optimal_bound(s, fam); };
    EXPECT_GE(tp(both), tp(s1) + tp(s2));
  }
}

TEST(ThresholdFamily, SimesAsFamily) {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = 1 + rep % 40;
    const PValueVector p(oracle::random_pvalues(gen, m, rep % 2 == 0));
    const double alpha = 0.05 + 0.9 * static_cast<double>(rep % 10) / 10.0;
    const auto fam = threshold_family(p, Template::linear(m).curve(alpha));
    EXPECT_EQ(fam.structure(), FamilyStructure::Nested);
    const auto s = oracle::random_subset(gen, m);
    EXPECT_EQ(augmentation_bound(s, fam), simes_bound(p, s, alpha).v);
  }
}

TEST(MarkovZeta, Examples) {
  const PValueVector p{0.05, 0.6, 0.7, 0.02, 0.9, 0.03};
  const auto r1 = IndexSet::all(6);
  EXPECT_EQ(markov_zeta(p, r1, 0.2, 0.05), 4u);
  EXPECT_EQ(markov_zeta(PValueVector{0.01, 0.02, 0.05}, IndexSet::all(3), 0.2, 0.05), 0u);
  EXPECT_EQ(markov_zeta(PValueVector{0.5, 0.6, 0.7}, IndexSet::all(3), 0.2, 0.05), 3u);
  EXPECT_THROW(markov_zeta(p, r1, 0.2, 0.2), InputError);
  EXPECT_THROW(markov_zeta(p, r1, 0.2, 0.0), InputError);
}

TEST(DkwZeta, Examples) {
  const PValueVector zeros{0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(dkw_zeta(zeros, IndexSet::all(5), 0.05), 1u);
  const PValueVector big{0.9, 0.95, 0.99};
  EXPECT_EQ(dkw_zeta(big, IndexSet::all(3), 1e-6), 3u);
}

TEST(DkwZeta, MatchesDenseGrid) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> grid(0, 9999);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> values(100);
    for (auto& v : values) v = grid(gen) / 10000.0;
    const PValueVector p(values);
    const auto r1 = IndexSet::all(100);
    EXPECT_EQ(dkw_zeta(p, r1, 0.1), oracle::dkw_grid(p, r1, 0.1));
    EXPECT_EQ(dkw_zeta(p, r1, 0.1, DkwRounding::FloorThenSquare), oracle::dkw_grid(p, r1, 0.1, true));
  }
}

TEST(DkwZeta, FloorSquareRoundingCanUndercover) {
  const PValueVector p(std::vector<double>(10, 0.5));
  const auto r1 = IndexSet::all(10);
  EXPECT_EQ(dkw_zeta_at(p, r1, 0.0125, 0.0, DkwRounding::FloorThenSquare), 9u);
  EXPECT_EQ(dkw_zeta_at(p, r1, 0.0125, 0.0), 15u);
}

TEST(DkwZeta, FloorThenSquareIsNoLarger) {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 100; ++rep) {
    const PValueVector p(oracle::random_pvalues(gen, 50));
    const auto r1 = oracle::random_subset(gen, 50);
    if (r1.empty()) continue;
    EXPECT_LE(dkw_zeta(p, r1, 0.1), dkw_zeta(p, r1, 0.1, DkwRounding::SquareThenFloor));
  }
}

TEST(DkwZeta, InequalityAtHalf) {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = 1 + rep % 80;
    const PValueVector p(oracle::random_pvalues(gen, m));
    const auto r1 = IndexSet::all(m);
    for (double alpha : {0.01, 0.05, 0.2}) {
      std::size_t above = 0;
      for (std::size_t i = 0; i < m; ++i) above += p[i] > 0.5 ? 1 : 0;
      const double rhs = 2.0 * (std::log(1.0 / alpha) + 2.0 * static_cast<double>(above));
      EXPECT_LE(static_cast<double>(dkw_zeta_at(p, r1, alpha, 0.5)), rhs);
    }
  }
}

TEST(JerHolds, Examples) {
  const GroundTruth truth{IndexSet{0, 1, 2}};
  EXPECT_TRUE(jer_holds(ReferenceFamily({{IndexSet{0, 1}, 2}, {IndexSet{3}, 1}}), truth));
  EXPECT_FALSE(jer_holds(ReferenceFamily({{IndexSet{0, 1}, 1}}), truth));
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 300; ++rep) {
    const auto fam = random_family(gen, 15, FamilyStructure::General);
    const GroundTruth h0{oracle::random_subset(gen, 15)};
    bool ok = true;
    for (const auto& item : fam.items()) {
      std::size_t nulls = 0;
      for (std::size_t i : item.region) {
        for (std::size_t j : h0.h0) nulls += i == j ? 1 : 0;
      }
      ok = ok && nulls <= item.zeta;
    }
    EXPECT_EQ(jer_holds(fam, h0), ok);
  }
}
