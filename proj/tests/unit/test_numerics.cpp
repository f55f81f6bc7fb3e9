#include <gtest/gtest.h>

#include <numbers>

#include "dlgibbs/numerics.hpp"
#include "dlgibbs/vectorization.hpp"
#include "../support/test_util.hpp"

using namespace dlgibbs;
using namespace dlgibbs::test;

TEST(Eigendecompose, IdentityHasUnitSpectrum) {
  const auto eig = hermitian_eigendecompose(identity(2));
  EXPECT_NEAR(eig.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-14);
}

TEST(Eigendecompose, PauliZAscending) {
  const auto eig = hermitian_eigendecompose(pauli_z());
  EXPECT_NEAR(eig.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-14);
}

TEST(Eigendecompose, PauliXEigenvectors) {
  const auto eig = hermitian_eigendecompose(pauli_x());
  EXPECT_NEAR(eig.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-14);
  Vector minus(2), plus(2);
  minus << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(eig.eigenvectors.col(0).dot(minus)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(eig.eigenvectors.col(1).dot(plus)), 1.0, 1e-12);
}

TEST(Eigendecompose, RejectsNonHermitian) {
  const DenseMatrix a = mat2(0, 1, 0, 0);
  try {
    hermitian_eigendecompose(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotHermitian);
  }
}

TEST(Eigendecompose, RandomReconstruction) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix a = random_hermitian(16, rng);
    const auto eig = hermitian_eigendecompose(a);
    const DenseMatrix rec = eig.eigenvectors * eig.eigenvalues.cast<cplx>().asDiagonal() * eig.eigenvectors.adjoint();
    EXPECT_LE(dist(rec, a), 1e-10 * op_norm(a));
    EXPECT_LE(dist(eig.eigenvectors.adjoint() * eig.eigenvectors, identity(16)), 1e-10);
    for (Index i = 1; i < 16; ++i) EXPECT_LE(eig.eigenvalues(i - 1), eig.eigenvalues(i));
  }
}

TEST(Svd, ZeroMatrix) {
  const auto svd = singular_value_decompose(DenseMatrix::Zero(3, 3));
  EXPECT_NEAR(svd.s.norm(), 0.0, 1e-15);
}

TEST(Svd, DiagonalSignFolded) {
  const auto svd = singular_value_decompose(diag({3, -2}));
  EXPECT_NEAR(svd.s(0), 3.0, 1e-14);
  EXPECT_NEAR(svd.s(1), 2.0, 1e-14);
  const DenseMatrix rec = svd.u * svd.s.cast<cplx>().asDiagonal() * svd.v.adjoint();
  EXPECT_LE(dist(rec, diag({3, -2})), 1e-13);
}

TEST(Svd, RankOneClosedForm) {
  const double h = 1 / std::sqrt(2.0);
  const DenseMatrix a = mat2(h, h, 0, 0);  // |0><+|
  const auto svd = singular_value_decompose(a);
  EXPECT_NEAR(svd.s(0), 1.0, 1e-14);
  EXPECT_NEAR(svd.s(1), 0.0, 1e-14);
}

TEST(Svd, PhaseConventionFirstEntryRealNonnegative) {
  std::mt19937_64 rng(3);
  const auto svd = singular_value_decompose(random_gaussian_matrix(6, 6, rng));
  for (Index c = 0; c < 6; ++c) {
    EXPECT_NEAR(svd.u(0, c).imag(), 0.0, 1e-13);
    EXPECT_GE(svd.u(0, c).real(), 0.0);
  }
}

TEST(Svd, UnitaryInvariance) {
  std::mt19937_64 rng(5);
  const DenseMatrix a = random_gaussian_matrix(8, 8, rng);
  const DenseMatrix u = random_unitary(8, rng);
  const DenseMatrix v = random_unitary(8, rng);
  const auto s1 = singular_value_decompose(a).s;
  const auto s2 = singular_value_decompose(u * a * v).s;
  EXPECT_LE((s1 - s2).norm(), 1e-9);
  const auto svd = singular_value_decompose(a);
  const DenseMatrix rec = svd.u * svd.s.cast<cplx>().asDiagonal() * svd.v.adjoint();
  EXPECT_LE(dist(rec, a), 1e-10 * op_norm(a));
}

TEST(MatrixExponential, ZeroGivesIdentity) {
  EXPECT_LE(dist(matrix_exponential(DenseMatrix::Zero(2, 2)), identity(2)), 1e-15);
}

TEST(MatrixExponential, Diagonal) {
  EXPECT_LE(dist(matrix_exponential(diag({std::log(2.0), 0})), diag({2, 1})), 1e-14);
}

TEST(MatrixExponential, PauliRotation) {
  const DenseMatrix a = cplx(0, std::numbers::pi / 2) * pauli_x();
  EXPECT_LE(dist(matrix_exponential(a), cplx(0, 1) * pauli_x()), 1e-13);
}

TEST(MatrixExponential, InverseProperty) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    DenseMatrix a = random_gaussian_matrix(8, 8, rng);
    a *= 5.0 / op_norm(a);
    EXPECT_LE(dist(matrix_exponential(a) * matrix_exponential(-a), identity(8)), 1e-9);
  }
}

TEST(Schatten1, Cases) {
  EXPECT_NEAR(schatten1_distance(diag({1, 0}), diag({1, 0})), 0.0, 1e-15);
  EXPECT_NEAR(schatten1_distance(diag({1, 0}), diag({0, 1})), 2.0, 1e-14);
  EXPECT_NEAR(schatten1_distance(diag({0.7, 0.3}), diag({0.5, 0.5})), 0.4, 1e-14);
  try {
    schatten1_distance(identity(2), identity(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Schatten1, TriangleInequality) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix a = random_density_matrix(4, rng), b = random_density_matrix(4, rng),
                      c = random_density_matrix(4, rng);
    EXPECT_LE(schatten1_distance(a, c), schatten1_distance(a, b) + schatten1_distance(b, c) + 1e-12);
  }
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(2);
  const DenseMatrix a = random_gaussian_matrix(2, 2, rng);
  const DenseMatrix b = random_density_matrix(4, rng);
  const DenseMatrix out = partial_trace(kron(a, b), {0}, {2, 4});
  EXPECT_LE(dist(out, a), 1e-13);
  const DenseMatrix out2 = partial_trace(kron(b, a), {1}, {4, 2});
  EXPECT_LE(dist(out2, a), 1e-13);
}

TEST(PartialTrace, MaximallyEntangled) {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  const DenseMatrix rho = phi * phi.adjoint();
  EXPECT_LE(dist(partial_trace(rho, {0}, {2, 2}), 0.5 * identity(2)), 1e-14);
}

TEST(PartialTrace, PurificationOfDiagonalState) {
  const DenseMatrix sqrt_sigma = diag({std::sqrt(0.8), std::sqrt(0.2)});
  const Vector v = vectorize(sqrt_sigma);
  const DenseMatrix rho = v * v.adjoint();
  EXPECT_LE(dist(partial_trace(rho, {0}, {2, 2}), diag({0.8, 0.2})), 1e-14);
}

TEST(PartialTrace, TracePreservedAndBadFactorization) {
  std::mt19937_64 rng(4);
  const DenseMatrix rho = random_density_matrix(8, rng);
  EXPECT_NEAR(partial_trace(rho, {0, 2}, {2, 2, 2}).trace().real(), 1.0, 1e-13);
  try {
    partial_trace(rho, {0}, {2, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadDimensionFactorization);
  }
}

TEST(Numerics, DeterministicOutputs) {
  std::mt19937_64 r1(9), r2(9);
  const DenseMatrix a = random_hermitian(12, r1), b = random_hermitian(12, r2);
  const auto e1 = hermitian_eigendecompose(a), e2 = hermitian_eigendecompose(b);
  EXPECT_EQ(e1.eigenvalues, e2.eigenvalues);
  EXPECT_EQ(e1.eigenvectors, e2.eigenvectors);
}
