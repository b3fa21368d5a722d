#include <gtest/gtest.h>

#include "hsieve.hpp"
#include "oracles.hpp"

using namespace hsieve;

TEST(IrrepMatrices, HomomorphicUnitaryAndMatchTheTable) {
  for (const std::string s : {"Z:5", "Z2^3", "D:4", "D:5", "D:6", "S:3", "S:4", "prod(S:3,Z:2)", "prod(D:4,Z:3)"}) {
    const GroupTable g = build_group(s);
    const CharacterTable ct = character_table(g);
    ASSERT_TRUE(supports_explicit_irreps(g)) << s;
    const auto irreps = all_irrep_matrices(g, ct);
    ASSERT_EQ(irreps.size(), ct.num_irreps());
    for (std::size_t t = 0; t < irreps.size(); ++t) {
      EXPECT_EQ(irreps[t].irrep_index, t);
      EXPECT_EQ(static_cast<int>(irreps[t].degree), ct.degree(t));
      EXPECT_LT(irreps[t].homomorphism_residual(g), 1e-10) << s << " chi" << t;
      EXPECT_LT(irreps[t].unitarity_residual(), 1e-10) << s << " chi" << t;
      EXPECT_LT(irreps[t].trace_residual(ct), 1e-10) << s << " chi" << t;
    }
  }
}

TEST(IrrepMatrices, SymmetricGroupFromPermutationGenerators) {
  // S4 given by generators gets Young matrices through the order check.
  const GroupTable g = build_group("perm[(1 2),(1 2 3 4)]");
  const CharacterTable ct = character_table(g);
  EXPECT_TRUE(supports_explicit_irreps(g));
  for (const auto& rep : all_irrep_matrices(g, ct)) EXPECT_LT(rep.trace_residual(ct), 1e-10);
}

TEST(IrrepMatrices, UnsupportedFamilyOnlyGivesLinearIrreps) {
  const GroupTable g = build_group("perm[(1 2 3),(1 2)(3 4)]");
  const CharacterTable ct = character_table(g);
  EXPECT_FALSE(supports_explicit_irreps(g));
  const IrrepMatrices lin = irrep_matrices(g, ct, 1);
  EXPECT_LT(lin.homomorphism_residual(g), 1e-12);
  EXPECT_THROW(irrep_matrices(g, ct, 3), UnsupportedError);
}

TEST(RegularRep, BothSidesAreHomomorphisms) {
  const GroupTable g = build_group("S:3");
  for (auto side : {RegularRep::Side::Left, RegularRep::Side::Right}) {
    const RegularRep r(g, side);
    for (Element a = 0; a < g.order(); ++a)
      for (Element b = 0; b < g.order(); ++b)
        EXPECT_LT((r.matrix(g.mul(a, b)) - r.matrix(a) * r.matrix(b)).norm(), 1e-14);
  }
  const RegularRep right(g, RegularRep::Side::Right);
  for (Element a = 0; a < g.order(); ++a) EXPECT_LT((right.matrix(a) - oracle::right_regular(g, a)).norm(), 1e-15);
}

TEST(RegularRep, CharacterIsOrderAtIdentityElseZero) {
  const GroupTable g = build_group("D:5");
  const RegularRep r(g, RegularRep::Side::Left);
  EXPECT_EQ(r.character(0), g.order());
  for (Element a = 1; a < g.order(); ++a) EXPECT_EQ(r.character(a), 0u);
}

TEST(SubgroupAverage, IsAProjectionWithRankSumIdentity) {
  const GroupTable g = build_group("S:4");
  const CharacterTable ct = character_table(g);
  const auto irreps = all_irrep_matrices(g, ct);
  for (const auto& h : all_subgroups(g)) {
    long weighted = 0;
    for (std::size_t t = 0; t < irreps.size(); ++t) {
      const Eigen::MatrixXcd p = subgroup_average(irreps[t], h);
      EXPECT_LT(idempotence_residual(p), 1e-10);
      weighted += ct.degree(t) * static_cast<long>(rank_of_projector(p));
    }
    EXPECT_EQ(weighted, static_cast<long>(g.order() / h.order()));
  }
}

TEST(IsotypicProjector, RegularRepComponentsHaveDimensionDegreeSquared) {
  const GroupTable g = build_group("S:4");
  const CharacterTable ct = character_table(g);
  const RegularRep left(g, RegularRep::Side::Left);
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(24, 24);
  for (std::size_t t = 0; t < ct.num_irreps(); ++t) {
    const Eigen::MatrixXcd p = isotypic_projector(ct, t, left);
    EXPECT_EQ(rank_of_projector(p), static_cast<std::size_t>(ct.degree(t) * ct.degree(t)));
    total += p;
  }
  EXPECT_LT((total - Eigen::MatrixXcd::Identity(24, 24)).norm(), 1e-10);
}

TEST(IsotypicProjector, RejectsNonRepresentation) {
  const GroupTable g = build_group("S:3");
  const CharacterTable ct = character_table(g);
  std::vector<Eigen::MatrixXcd> bogus(g.order(), Eigen::MatrixXcd::Identity(2, 2));
  bogus[1] = Eigen::MatrixXcd::Zero(2, 2);
  EXPECT_THROW(isotypic_projector(ct, 1, std::span<const Eigen::MatrixXcd>(bogus)), InvalidActionError);
}

TEST(RankOfProjector, RejectsNonProjector) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
  m(0, 0) = 0.5;
  EXPECT_THROW(rank_of_projector(m), DomainError);
}
