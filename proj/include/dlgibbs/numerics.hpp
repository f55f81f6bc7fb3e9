#pragma once

// Dense complex linear-algebra kernels shared by every module.
//
// All matrices are Eigen::MatrixXcd. Qubit tensor products use big-endian
// order: qubit 0 is the most significant factor of a basis index.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "dlgibbs/error.hpp"

namespace dlgibbs {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-10;

struct HermitianEig {
  RealVector eigenvalues;    // ascending
  DenseMatrix eigenvectors;  // columns
};

struct Svd {
  DenseMatrix u;
  RealVector s;  // descending
  DenseMatrix v;
};

inline bool is_finite(const DenseMatrix& a) { return a.allFinite(); }

inline DenseMatrix identity(Index dim) { return DenseMatrix::Identity(dim, dim); }

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline DenseMatrix pauli_x() { DenseMatrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline DenseMatrix pauli_y() { DenseMatrix m(2, 2); m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline DenseMatrix pauli_z() { DenseMatrix m(2, 2); m << 1, 0, 0, -1; return m; }

/// Largest singular value, as sqrt of the top eigenvalue of the smaller Gram matrix.
/// The top eigenvalue carries relative error ~ machine epsilon, so no accuracy is lost.
inline double op_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  const DenseMatrix gram = a.rows() < a.cols() ? DenseMatrix(a * a.adjoint()) : DenseMatrix(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double hermiticity_defect(const DenseMatrix& a) { return op_norm(a - a.adjoint()); }

inline void require_square(const DenseMatrix& a, const char* module) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::DimensionMismatch, module,
                "expected a square matrix, got " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  }
}

inline HermitianEig hermitian_eigendecompose(const DenseMatrix& a, double tol = kDefaultTol) {
  require_square(a, "numerics");
  if (!is_finite(a)) throw Error(Errc::BadInputs, "numerics", "non-finite matrix entries");
  const double scale = std::max(1.0, op_norm(a));
  const double defect = hermiticity_defect(a);
  if (defect > tol * scale) {
    throw Error(Errc::NotHermitian, "numerics",
                "||A - A^dag|| = " + std::to_string(defect) + " exceeds tolerance");
  }
  const DenseMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::NoConvergence, "numerics", "self-adjoint eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Applies f to the spectrum of a Hermitian matrix.
inline DenseMatrix hermitian_function(const DenseMatrix& a, const std::function<double(double)>& f,
                                      double tol = kDefaultTol) {
  const auto eig = hermitian_eigendecompose(a, tol);
  RealVector fx(eig.eigenvalues.size());
  for (Index i = 0; i < fx.size(); ++i) fx(i) = f(eig.eigenvalues(i));
  return eig.eigenvectors * fx.cast<cplx>().asDiagonal() * eig.eigenvectors.adjoint();
}

/// Phase convention: the first nonzero entry of every U column is real and
/// nonnegative; the matching V column absorbs the same phase.
inline Svd singular_value_decompose(const DenseMatrix& a) {
  if (!is_finite(a)) throw Error(Errc::BadInputs, "numerics", "non-finite matrix entries");
  Eigen::JacobiSVD<DenseMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (!out.u.allFinite() || !out.v.allFinite()) {
    throw Error(Errc::NoConvergence, "numerics", "SVD produced non-finite factors");
  }
  // JacobiSVD returns min(rows, cols) values; pad for square use.
  const Index k = std::min(a.rows(), a.cols());
  for (Index c = 0; c < out.u.cols(); ++c) {
    for (Index r = 0; r < out.u.rows(); ++r) {
      const cplx entry = out.u(r, c);
      if (std::abs(entry) > 1e-13) {
        const cplx phase = std::conj(entry) / std::abs(entry);
        out.u.col(c) *= phase;
        if (c < out.v.cols() && c < k) out.v.col(c) *= phase;
        break;
      }
    }
  }
  return out;
}

inline DenseMatrix matrix_exponential(const DenseMatrix& a) {
  require_square(a, "numerics");
  DenseMatrix result = a.exp();
  if (!result.allFinite()) {
    throw Error(Errc::OverflowDetected, "numerics", "matrix exponential overflowed");
  }
  return result;
}

/// Schatten-1 norm of rho - sigma (sum of singular values).
inline double schatten1_distance(const DenseMatrix& rho, const DenseMatrix& sigma) {
  require_square(rho, "numerics");
  require_square(sigma, "numerics");
  if (rho.rows() != sigma.rows()) {
    throw Error(Errc::DimensionMismatch, "numerics", "states have different dimensions");
  }
  Eigen::JacobiSVD<DenseMatrix> svd(rho - sigma);
  return svd.singularValues().sum();
}

/// Reduced matrix on `keep` (returned in ascending site order) for a
/// multipartite system with per-site dimensions `dims`.
inline DenseMatrix partial_trace(const DenseMatrix& rho, std::span<const int> keep,
                                 std::span<const int> dims) {
  require_square(rho, "numerics");
  Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(Errc::BadDimensionFactorization, "numerics", "nonpositive site dimension");
    total *= d;
  }
  if (total != rho.rows()) {
    throw Error(Errc::BadDimensionFactorization, "numerics",
                "matrix dimension " + std::to_string(rho.rows()) +
                    " is not the product of the site dimensions");
  }
  const int sites = static_cast<int>(dims.size());
  std::vector<bool> kept(sites, false);
  for (int s : keep) {
    if (s < 0 || s >= sites || kept[s]) {
      throw Error(Errc::BadDimensionFactorization, "numerics", "invalid kept site " + std::to_string(s));
    }
    kept[s] = true;
  }
  // strides for the full index (site 0 most significant)
  std::vector<Index> stride(sites, 1);
  for (int s = sites - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> kept_sites, traced_sites;
  for (int s = 0; s < sites; ++s) (kept[s] ? kept_sites : traced_sites).push_back(s);

  Index kdim = 1, tdim = 1;
  for (int s : kept_sites) kdim *= dims[s];
  for (int s : traced_sites) tdim *= dims[s];

  auto offset = [&](const std::vector<int>& group, Index packed) {
    Index off = 0;
    for (int g = static_cast<int>(group.size()) - 1; g >= 0; --g) {
      const int s = group[g];
      off += (packed % dims[s]) * stride[s];
      packed /= dims[s];
    }
    return off;
  };

  std::vector<Index> koff(kdim), toff(tdim);
  for (Index i = 0; i < kdim; ++i) koff[i] = offset(kept_sites, i);
  for (Index t = 0; t < tdim; ++t) toff[t] = offset(traced_sites, t);

  DenseMatrix out = DenseMatrix::Zero(kdim, kdim);
  for (Index i = 0; i < kdim; ++i)
    for (Index j = 0; j < kdim; ++j) {
      cplx acc = 0;
      for (Index t = 0; t < tdim; ++t) acc += rho(koff[i] + toff[t], koff[j] + toff[t]);
      out(i, j) = acc;
    }
  return out;
}

inline DenseMatrix partial_trace(const DenseMatrix& rho, std::initializer_list<int> keep,
                                 std::initializer_list<int> dims) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()),
                       std::span<const int>(dims.begin(), dims.size()));
}

/// Complex Gaussian matrix with unit-variance real and imaginary parts.
inline DenseMatrix random_gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = cplx(re, im);
    }
  return m;
}

/// Haar-random unitary via QR of a Gaussian matrix with phase-fixed R.
inline DenseMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  const DenseMatrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

/// Random density matrix G G^dag / Tr(G G^dag).
inline DenseMatrix random_density_matrix(Index dim, std::mt19937_64& rng) {
  const DenseMatrix g = random_gaussian_matrix(dim, dim, rng);
  DenseMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline DenseMatrix projector_onto_columns(const DenseMatrix& cols) { return cols * cols.adjoint(); }

}  // namespace dlgibbs
