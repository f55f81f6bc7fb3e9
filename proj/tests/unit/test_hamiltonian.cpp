#include <gtest/gtest.h>

#include "dlgibbs/hamiltonian.hpp"
#include "../support/test_util.hpp"

using namespace dlgibbs;
using namespace dlgibbs::test;

TEST(Embed, SingleSiteOrdering) {
  EXPECT_LE(dist(embed_term(make_term(pauli_z(), {0}), 2), kron(pauli_z(), identity(2))), 1e-15);
  EXPECT_LE(dist(embed_term(make_term(pauli_z(), {1}), 2), kron(identity(2), pauli_z())), 1e-15);
}

TEST(Embed, NonAdjacentSupport) {
  const DenseMatrix zz = kron(pauli_z(), pauli_z());
  const DenseMatrix expected = kron(kron(pauli_z(), identity(2)), pauli_z());
  EXPECT_LE(dist(embed_term(make_term(zz, {0, 2}), 3), expected), 1e-15);
}

TEST(Embed, ReversedSupportSwapsFactors) {
  std::mt19937_64 rng(1);
  const DenseMatrix a = random_gaussian_matrix(2, 2, rng), b = random_gaussian_matrix(2, 2, rng);
  const DenseMatrix expected = kron(kron(b, identity(2)), a);
  EXPECT_LE(dist(embed_term(make_term(kron(a, b), {2, 0}), 3), expected), 1e-14);
}

TEST(Embed, SupportOutOfRange) {
  try {
    embed_term(make_term(pauli_z(), {2}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SupportOutOfRange);
  }
}

TEST(Assemble, Examples) {
  EXPECT_LE(dist(assemble(LocalHamiltonian(1, {make_term(pauli_z(), {0})})), pauli_z()), 1e-15);
  const auto zz = make_instance("zz_chain", {{"n", 2}}, 0);
  EXPECT_LE(dist(assemble(zz), diag({0, 1, 1, 0})), 1e-15);
  EXPECT_LE(assemble(LocalHamiltonian(2, {})).norm(), 0.0);
}

TEST(Assemble, Linearity) {
  const auto a = make_instance("random_ff_projectors", {{"n", 3}}, 1);
  const auto b = make_instance("commuting_projectors", {{"n", 3}}, 2);
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  EXPECT_LE(dist(assemble(LocalHamiltonian(3, terms)), assemble(a) + assemble(b)), 1e-13);
}

TEST(Degree, Examples) {
  EXPECT_EQ(interaction_degree(LocalHamiltonian(1, {make_term(pauli_z(), {0})})), 0);
  EXPECT_EQ(interaction_degree(make_instance("zz_chain", {{"n", 4}}, 0)), 2);
  EXPECT_EQ(interaction_degree(make_instance("field_chain", {{"n", 4}}, 0)), 0);
  EXPECT_EQ(interaction_degree(make_instance("zz_chain", {{"n", 3}}, 0)), 1);  // two bonds only
  for (int n = 4; n <= 8; ++n) EXPECT_EQ(interaction_degree(make_instance("zz_chain", {{"n", double(n)}}, 0)), 2);
}

TEST(Degree, CommutationDegreeOfCommutingModelIsZero) {
  EXPECT_EQ(commutation_degree(make_instance("zz_chain", {{"n", 4}}, 0)), 0);
  const auto ff = make_instance("random_ff_projectors", {{"n", 4}}, 7);
  EXPECT_EQ(commutation_degree(ff), 2);
}

TEST(GroundSpace, DiagonalQubit) {
  const auto gs = ground_space(LocalHamiltonian(1, {make_term(diag({0, 1}), {0})}));
  EXPECT_EQ(gs.dimension, 1);
  EXPECT_NEAR(gs.gap, 1.0, 1e-12);
  EXPECT_LE(dist(gs.projector, diag({1, 0})), 1e-12);
}

TEST(GroundSpace, ZzChainTwoFoldDegenerate) {
  const auto gs = ground_space(make_instance("zz_chain", {{"n", 3}}, 0));
  EXPECT_EQ(gs.dimension, 2);
  EXPECT_NEAR(gs.gap, 1.0, 1e-12);
  EXPECT_LE(gs.frustration_residual, 1e-12);
  DenseMatrix expected = DenseMatrix::Zero(8, 8);
  expected(0, 0) = expected(7, 7) = 1;
  EXPECT_LE(dist(gs.projector, expected), 1e-12);
}

TEST(GroundSpace, PauliXSingleTerm) {
  const auto gs = ground_space(LocalHamiltonian(1, {make_term(pauli_x(), {0})}));
  EXPECT_EQ(gs.dimension, 1);
  EXPECT_NEAR(gs.gap, 2.0, 1e-12);
  EXPECT_NEAR(gs.ground_energy, -1.0, 1e-12);
  DenseMatrix minus = 0.5 * mat2(1, -1, -1, 1);
  EXPECT_LE(dist(gs.projector, minus), 1e-12);
  // P_H X = -P_H, norm 1
  EXPECT_NEAR(gs.frustration_residual, 1.0, 1e-12);
}

TEST(GroundSpace, ProjectorInvariants) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto gs = ground_space(make_instance("random_ff_projectors", {{"n", 4}}, seed));
    EXPECT_LE(dist(gs.projector * gs.projector, gs.projector), 1e-10);
    EXPECT_LE(hermiticity_defect(gs.projector), 1e-10);
    EXPECT_NEAR(gs.projector.trace().real(), gs.dimension, 1e-10);
  }
}

TEST(Instances, ZzChainFour) {
  const auto h = make_instance(InstanceKind::ZzChain, {{"n", 4}}, 0);
  EXPECT_EQ(h.size(), 3u);
  EXPECT_EQ(h.degree(), 2);
  EXPECT_LE(ground_space(h).frustration_residual, 1e-12);
}

TEST(Instances, FieldChainGroundState) {
  const auto gs = ground_space(make_instance("field_chain", {{"n", 2}}, 0));
  EXPECT_EQ(gs.dimension, 1);
  EXPECT_NEAR(gs.gap, 1.0, 1e-12);
  EXPECT_NEAR(gs.projector(0, 0).real(), 1.0, 1e-12);
}

TEST(Instances, RandomFfHasZeroStringInKernel) {
  const auto h = make_instance("random_ff_projectors", {{"n", 4}}, 7);
  const auto gs = ground_space(h);
  EXPECT_LE(gs.frustration_residual, 1e-12);
  EXPECT_NEAR(gs.ground_energy, 0.0, 1e-12);
  EXPECT_NEAR(gs.projector(0, 0).real(), 1.0, 1e-10);  // |0000> lies in the kernel
  EXPECT_GT(commutation_degree(h), 0);
}

TEST(Instances, AllKindsFrustrationFree) {
  for (auto kind : {"zz_chain", "field_chain", "random_ff_projectors", "commuting_projectors"}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto h = make_instance(kind, {{"n", 4}}, seed);
      EXPECT_LE(ground_space(h).frustration_residual, 1e-10) << kind;
      for (const auto& t : h.terms()) {
        const auto eig = hermitian_eigendecompose(t.op);
        EXPECT_GE(eig.eigenvalues.minCoeff(), -1e-12);
        EXPECT_LE(eig.eigenvalues.maxCoeff(), 1 + 1e-12);
      }
    }
  }
}

TEST(Instances, CommutingProjectorsCommute) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = make_instance("commuting_projectors", {{"n", 5}}, seed);
    const auto ops = h.embedded_terms();
    for (const auto& a : ops)
      for (const auto& b : ops) EXPECT_LE(dist(a * b, b * a), 1e-12);
  }
}

TEST(Instances, DeterministicBySeed) {
  const auto a = make_instance("random_ff_projectors", {{"n", 4}}, 9);
  const auto b = make_instance("random_ff_projectors", {{"n", 4}}, 9);
  EXPECT_EQ(assemble(a), assemble(b));
}

TEST(Instances, Errors) {
  try {
    make_instance("heisenberg", {{"n", 3}}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownKind);
  }
  for (const InstanceParams& p : {InstanceParams{{"n", 2.5}}, InstanceParams{{"n", 3}, {"J", 1}}, InstanceParams{}}) {
    try {
      make_instance("zz_chain", p, 0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::BadParams);
    }
  }
}

TEST(Restriction, RecoversLocalFactor) {
  std::mt19937_64 rng(3);
  const DenseMatrix a = random_gaussian_matrix(4, 4, rng);
  const auto r = restrict_to(embed(a, {1, 2}, 4), {1, 2}, 4);
  EXPECT_LE(dist(r.op, a), 1e-12);
  EXPECT_LE(r.residual, 1e-12);
  const auto bad = restrict_to(embed(a, {1, 2}, 4), {1}, 4);
  EXPECT_GT(bad.residual, 1e-3);
}
