#pragma once

// Row-major vectorization v(|i><j|) = |i> (x) |j>, so v(X)[i*d + j] = X(i, j)
// and v(A X B^dag) = (A (x) conj(B)) v(X). Superoperator matrices throughout the
// library act on vectors in this basis.

#include <cmath>
#include <functional>

#include "dlgibbs/numerics.hpp"

namespace dlgibbs {

inline Vector vectorize(const DenseMatrix& x) {
  require_square(x, "parent-hamiltonian");
  const Index d = x.rows();
  Vector out(d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i * d + j) = x(i, j);
  return out;
}

inline DenseMatrix devectorize(const Vector& psi) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(psi.size()))));
  if (d * d != psi.size()) {
    throw Error(Errc::DimensionMismatch, "parent-hamiltonian", "vector length is not a perfect square");
  }
  DenseMatrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = psi(i * d + j);
  return out;
}

/// Matrix of X -> A X.
inline DenseMatrix left_multiplication(const DenseMatrix& a) { return kron(a, identity(a.rows())); }

/// Matrix of X -> X B.
inline DenseMatrix right_multiplication(const DenseMatrix& b) {
  return kron(identity(b.rows()), b.transpose());
}

/// Matrix of X -> A X B.
inline DenseMatrix sandwich(const DenseMatrix& a, const DenseMatrix& b) { return kron(a, b.transpose()); }

/// Builds the matrix of a linear map column by column, by applying it to every
/// basis operator |i><j|. Independent of the Kronecker formulas above.
inline DenseMatrix superoperator_from_map(const std::function<DenseMatrix(const DenseMatrix&)>& map, Index d) {
  DenseMatrix out(d * d, d * d);
  DenseMatrix basis = DenseMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      basis(i, j) = 1.0;
      out.col(i * d + j) = vectorize(map(basis));
      basis(i, j) = 0.0;
    }
  return out;
}

}  // namespace dlgibbs
