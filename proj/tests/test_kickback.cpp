#include <gtest/gtest.h>

#include "hsieve.hpp"

using namespace hsieve;

namespace {

struct Fixture {
  std::string group;
  std::vector<std::size_t> irreps;
};

const std::vector<Fixture> kFixtures = {{"Z:2", {1, 1}}, {"D:4", {4, 4}}, {"S:3", {2, 2}}, {"S:3", {2, 1}}};

}  // namespace

TEST(Kickback, ProbabilityEqualsIsotypicNormOnTarget) {
  for (const auto& f : kFixtures) {
    const GroupTable g = build_group(f.group);
    const CharacterTable ct = character_table(g);
    const auto circuit = KickbackCircuit::from_irreps(g, ct, f.irreps);
    std::mt19937_64 rng(21);
    for (std::size_t eta = 0; eta < ct.num_irreps(); ++eta) {
      const Eigen::MatrixXcd p = isotypic_projector(ct, eta, std::span(circuit.target_actions()));
      for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXcd v = random_unit_vector(circuit.target_dim(), rng);
        EXPECT_NEAR(circuit.outcome_probability(eta, v), (p * v).squaredNorm(), 1e-10) << f.group;
      }
    }
  }
}

TEST(Kickback, FourierRouteAgrees) {
  const GroupTable g = build_group("S:3");
  const CharacterTable ct = character_table(g);
  const Eigen::MatrixXcd f = fourier_transform_matrix(g, ct);
  EXPECT_LT(unitarity_residual(f), 1e-12);
  const auto circuit = KickbackCircuit::from_irreps(g, ct, {2, 2});
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXcd v = random_unit_vector(circuit.target_dim(), rng);
    for (std::size_t eta = 0; eta < ct.num_irreps(); ++eta)
      EXPECT_NEAR(circuit.outcome_probability(eta, v), circuit.outcome_probability_fourier(eta, v, f), 1e-10);
  }
}

TEST(Kickback, ProbabilitiesOverAllIrrepsSumToOne) {
  const GroupTable g = build_group("D:4");
  const CharacterTable ct = character_table(g);
  const auto circuit = KickbackCircuit::from_irreps(g, ct, {4, 4});
  std::mt19937_64 rng(8);
  const Eigen::VectorXcd v = random_unit_vector(circuit.target_dim(), rng);
  double total = 0.0;
  for (std::size_t eta = 0; eta < ct.num_irreps(); ++eta) total += circuit.outcome_probability(eta, v);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Kickback, ControlledActionIntertwines) {
  for (const auto& f : kFixtures) {
    const GroupTable g = build_group(f.group);
    const CharacterTable ct = character_table(g);
    EXPECT_LT(KickbackCircuit::from_irreps(g, ct, f.irreps).verify_intertwining(), 1e-10) << f.group;
  }
}

TEST(Kickback, MeasurementPostStateIsNormalizedAndSeeded) {
  const GroupTable g = build_group("S:3");
  const CharacterTable ct = character_table(g);
  const auto circuit = KickbackCircuit::from_irreps(g, ct, {2, 2});
  std::mt19937_64 rng(2);
  const Eigen::VectorXcd v = random_unit_vector(circuit.target_dim(), rng);
  const auto a = kickback_measure(circuit, 2, v, 17);
  const auto b = kickback_measure(circuit, 2, v, 17);
  EXPECT_EQ(a.observed, b.observed);
  EXPECT_NEAR(a.post_state.norm(), 1.0, 1e-12);
  EXPECT_THROW(kickback_measure(circuit, 2, 2.0 * v, 1), DomainError);
}

TEST(Kickback, TargetMultiplicityMatchesTensorDecomposition) {
  const GroupTable g = build_group("S:3");
  const CharacterTable ct = character_table(g);
  const auto circuit = KickbackCircuit::from_irreps(g, ct, {2, 2});
  const auto mult = tensor_decompose(ct, {2, 2});
  for (std::size_t eta = 0; eta < ct.num_irreps(); ++eta) {
    const Eigen::MatrixXcd p = isotypic_projector(ct, eta, std::span(circuit.target_actions()));
    EXPECT_EQ(rank_of_projector(p), static_cast<std::size_t>(mult[eta] * ct.degree(eta)));
  }
}
