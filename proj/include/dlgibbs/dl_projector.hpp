#pragma once

// Ground-space projection for frustration-free Hamiltonians through the product
// DL(H) = P_1 ... P_M of local ground projectors and a Chebyshev singular-value
// transform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dlgibbs/hamiltonian.hpp"

namespace dlgibbs {

struct DlOperator {
  int n = 0;
  std::vector<DenseMatrix> factors;  // embedded kernel projectors of each H_m, product order
  DenseMatrix composite;             // DL(H)
  Svd svd;
  GroundSpaceInfo ground;
  int noncommuting_degree = 0;
  int overlap_degree = 0;

  std::size_t size() const { return factors.size(); }
  int rank() const { return ground.dimension; }
  int bound_degree() const { return std::max(1, noncommuting_degree); }
};

struct DlOperatorOptions {
  double kernel_tol = 1e-9;
  double frustration_tol = 1e-9;
};

inline DlOperator dl_operator(const LocalHamiltonian& h, const DlOperatorOptions& opts = {}) {
  DlOperator dl;
  dl.n = h.qubits();
  const Index dim = h.dimension();
  std::vector<Sites> supports;
  for (const auto& t : h.terms()) {
    const auto eig = hermitian_eigendecompose(t.op, 1e-10);
    if (eig.eigenvalues.minCoeff() < -opts.kernel_tol || eig.eigenvalues.maxCoeff() > 1 + opts.kernel_tol) {
      throw Error(Errc::PositivityFailure, "dl-projector", "term spectrum outside [0, 1]");
    }
    Index k = 0;
    while (k < eig.eigenvalues.size() && eig.eigenvalues(k) <= opts.kernel_tol) ++k;
    const DenseMatrix local = projector_onto_columns(eig.eigenvectors.leftCols(k));
    dl.factors.push_back(embed(local, t.support, dl.n));
    supports.push_back(t.support);
  }
  dl.ground = ground_space(h);
  if (std::abs(dl.ground.ground_energy) > opts.frustration_tol ||
      dl.ground.frustration_residual > opts.frustration_tol) {
    throw Error(Errc::FrustrationDetected, "dl-projector",
                "ground energy " + std::to_string(dl.ground.ground_energy) + ", residual " +
                    std::to_string(dl.ground.frustration_residual));
  }
  dl.composite = identity(dim);
  for (const auto& p : dl.factors) dl.composite = dl.composite * p;
  dl.svd = singular_value_decompose(dl.composite);
  dl.noncommuting_degree = commutator_degree(dl.factors, 1e-10);
  dl.overlap_degree = overlap_degree(supports);
  return dl;
}

struct SingularGap {
  double gamma = 0.0;             // spectral gap of H
  int g = 1;                      // degree used in the certificate
  int r = 0;
  double certified = 0.0;         // 1 - 1/sqrt(gamma/g^2 + 1)
  double empirical = 0.0;         // 1 - s_{r+1}
  double s_next = 0.0;            // s_{r+1}
  double s_bound = 0.0;           // 1/sqrt(gamma/g^2 + 1)
  double top_defect = 0.0;        // max_{j <= r} |s_j - 1|
  bool bound_holds = false;
};

inline double certified_gamma_star(double gamma, int g) {
  const double gg = static_cast<double>(std::max(1, g));
  return 1.0 - 1.0 / std::sqrt(gamma / (gg * gg) + 1.0);
}

inline SingularGap singular_gap(const DlOperator& dl, double tol = 1e-8) {
  SingularGap out;
  out.gamma = dl.ground.gap;
  out.r = dl.rank();
  if (dl.ground.degenerate_gap || out.gamma < tol) {
    throw Error(Errc::DegenerateGap, "dl-projector", "spectral gap " + std::to_string(out.gamma) + " below tolerance");
  }
  out.g = dl.bound_degree();
  out.certified = certified_gamma_star(out.gamma, out.g);
  out.s_bound = 1.0 - out.certified;
  const auto& s = dl.svd.s;
  for (int j = 0; j < out.r; ++j) out.top_defect = std::max(out.top_defect, std::abs(s(j) - 1.0));
  out.s_next = out.r < s.size() ? s(out.r) : 0.0;
  out.empirical = 1.0 - out.s_next;
  out.bound_holds = out.s_next <= out.s_bound + 1e-9;
  return out;
}

/// p(x) = T_l(x / (1 - gamma*)) / T_l(1 / (1 - gamma*)), evaluated without overflow.
struct ProjectorPoly {
  int degree = 1;
  double gamma_star = 0.5;

  bool odd() const { return degree % 2 == 1; }

  double operator()(double x) const {
    const double c = 1.0 - gamma_star;
    const double b = std::acosh(1.0 / c);
    const double l = degree;
    const double y = x / c;
    const double denom_tail = 1.0 + std::exp(-2.0 * l * b);  // cosh(l b) = e^{l b} denom_tail / 2
    if (std::abs(y) <= 1.0) {
      return std::cos(l * std::acos(y)) * 2.0 * std::exp(-l * b) / denom_tail;
    }
    const double a = std::acosh(std::abs(y));
    const double sign = (y < 0 && odd()) ? -1.0 : 1.0;
    return sign * std::exp(l * (a - b)) * (1.0 + std::exp(-2.0 * l * a)) / denom_tail;
  }

  /// 2 e^{-l sqrt(gamma*)}
  double bound() const { return 2.0 * std::exp(-degree * std::sqrt(gamma_star)); }
};

inline ProjectorPoly chebyshev_poly(double gamma_star, int degree) {
  if (!(gamma_star > 0.0 && gamma_star < 1.0)) {
    throw Error(Errc::BadGamma, "dl-projector", "gamma* must lie in (0, 1), got " + std::to_string(gamma_star));
  }
  if (degree < 1) throw Error(Errc::BadInputs, "dl-projector", "polynomial degree must be >= 1");
  return {degree, gamma_star};
}

/// Smallest l with 2 e^{-l sqrt(gamma*)} <= eps, at least 1.
inline int degree_for_error(double gamma_star, double eps) {
  if (!(gamma_star > 0.0 && gamma_star <= 1.0)) {
    throw Error(Errc::BadGamma, "dl-projector", "gamma* must lie in (0, 1]");
  }
  if (!(eps > 0.0)) throw Error(Errc::BadEps, "dl-projector", "eps must be positive");
  const double l = std::ceil(std::log(2.0 / eps) / std::sqrt(gamma_star) - 1e-12);
  return std::max(1, static_cast<int>(l));
}

struct ProjectorResult {
  DenseMatrix approx;             // U p(S) V^dag
  DenseMatrix exact;              // U_1 V_1^dag
  double error = 0.0;             // ||approx - exact||
  double bound = 0.0;             // 2 e^{-l sqrt(gamma*)}
  double ground_residual = 0.0;    // ||U_1 V_1^dag - P_H|| (when P_H is known)
  long long queries = 0;          // factor applications counted by the recurrence path
  long long expected_queries = 0; // l * M
  int ancilla_estimate = 0;       // ceil(log2 M) + 1
  bool odd_parity = true;
  double recurrence_deviation = 0.0;  // counted recurrence vs parity-matched SVD transform
};

inline int ancilla_estimate(std::size_t m) {
  int bits = 0;
  while ((std::size_t{1} << bits) < m) ++bits;
  return bits + 1;
}

namespace detail {

inline DenseMatrix singular_value_transform(const Svd& svd, const ProjectorPoly& poly, bool left_is_u) {
  const Index k = svd.s.size();
  RealVector ps(k);
  for (Index j = 0; j < k; ++j) ps(j) = poly(svd.s(j));
  const DenseMatrix& left = left_is_u ? svd.u : svd.v;
  return left.leftCols(k) * ps.cast<cplx>().asDiagonal() * svd.v.leftCols(k).adjoint();
}

/// Normalized Chebyshev recurrence W_k = T_k^{SV}(A/c) / T_k(1/c), one application of
/// A or A^dag per step. `apply(X, adjoint)` must multiply by A or A^dag on the left.
template <class Apply>
DenseMatrix chebyshev_recurrence(Index dim, const ProjectorPoly& poly, Apply&& apply) {
  const double c = 1.0 - poly.gamma_star;
  const double b = std::acosh(1.0 / c);
  // ratio(k) = T_k(1/c) / T_{k+1}(1/c)
  auto ratio = [b](int k) {
    return std::exp(-b) * (1.0 + std::exp(-2.0 * k * b)) / (1.0 + std::exp(-2.0 * (k + 1) * b));
  };
  DenseMatrix prev = identity(dim);              // W_0
  DenseMatrix cur = apply(prev, false);          // W_1 = (A/c) / (1/c)
  for (int k = 1; k < poly.degree; ++k) {
    // W_{k+1} = 2 (t_k/t_{k+1}) (A or A^dag)/c W_k - (t_{k-1}/t_{k+1}) W_{k-1}
    const bool adjoint = (k % 2 == 1);
    const DenseMatrix next = (2.0 * ratio(k) / c) * apply(cur, adjoint) - (ratio(k - 1) * ratio(k)) * prev;
    prev = std::move(cur);
    cur = next;
  }
  return cur;
}

}  // namespace detail

/// Singular-value transform of a generic operator with known top-r block.
inline ProjectorResult svt_projector(const Svd& svd, int r, const ProjectorPoly& poly) {
  ProjectorResult out;
  out.approx = detail::singular_value_transform(svd, poly, true);
  out.exact = svd.u.leftCols(r) * svd.v.leftCols(r).adjoint();
  out.error = op_norm(out.approx - out.exact);
  out.bound = poly.bound();
  out.odd_parity = poly.odd();
  return out;
}

inline ProjectorResult approximate_projector(const DlOperator& dl, const ProjectorPoly& poly) {
  ProjectorResult out = svt_projector(dl.svd, dl.rank(), poly);
  out.ground_residual = op_norm(out.exact - dl.ground.projector);
  out.ancilla_estimate = ancilla_estimate(dl.size());
  out.expected_queries = static_cast<long long>(poly.degree) * static_cast<long long>(dl.size());

  long long counter = 0;
  auto apply = [&](const DenseMatrix& x, bool adjoint) {
    DenseMatrix y = x;
    // DL = P_1 ... P_M acts with P_M first; DL^dag = P_M ... P_1 acts with P_1 first.
    if (adjoint) {
      for (const auto& p : dl.factors) y = p * y, ++counter;
    } else {
      for (auto it = dl.factors.rbegin(); it != dl.factors.rend(); ++it) y = (*it) * y, ++counter;
    }
    return y;
  };
  const DenseMatrix counted = detail::chebyshev_recurrence(dl.composite.rows(), poly, apply);
  out.queries = counter;
  const DenseMatrix parity_matched = detail::singular_value_transform(dl.svd, poly, poly.odd());
  out.recurrence_deviation = op_norm(counted - parity_matched);
  return out;
}

/// Synthetic operator U diag(s) V^dag with s_1..s_r = 1, s_{r+1} = 1 - gamma*, and the
/// remaining singular values spread over [0, 1 - gamma*).
struct PlantedInstance {
  Svd svd;
  int r = 1;
  double gamma_star = 0.0;
};

inline PlantedInstance planted_instance(Index dim, int r, double gamma_star, std::uint64_t seed) {
  if (r < 1 || r >= dim) throw Error(Errc::BadInputs, "dl-projector", "need 1 <= r < dim");
  if (!(gamma_star > 0 && gamma_star < 1)) throw Error(Errc::BadGamma, "dl-projector", "gamma* must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  PlantedInstance inst;
  inst.r = r;
  inst.gamma_star = gamma_star;
  inst.svd.u = random_unitary(dim, rng);
  inst.svd.v = random_unitary(dim, rng);
  inst.svd.s = RealVector::Zero(dim);
  const double top = 1.0 - gamma_star;
  for (Index j = 0; j < dim; ++j) {
    if (j < r) inst.svd.s(j) = 1.0;
    else inst.svd.s(j) = top * static_cast<double>(dim - j) / static_cast<double>(dim - r);
  }
  return inst;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> gamma_stars;
  std::vector<int> degrees;  // minimal l reaching the target error
};

inline int minimal_degree(const PlantedInstance& inst, double eps, int max_degree = 5000) {
  for (int l = 1; l <= max_degree; ++l) {
    const auto res = svt_projector(inst.svd, inst.r, chebyshev_poly(inst.gamma_star, l));
    if (res.error <= eps) return l;
  }
  throw Error(Errc::NoConvergence, "dl-projector", "no degree reached the target error");
}

/// Least-squares slope of log l_min against log(1/gamma*).
inline SlopeFit speedup_slope(const std::vector<PlantedInstance>& instances, double eps) {
  if (instances.size() < 4) throw Error(Errc::InsufficientSpread, "dl-projector", "need at least 4 instances");
  double lo = 1.0, hi = 0.0;
  for (const auto& inst : instances) lo = std::min(lo, inst.gamma_star), hi = std::max(hi, inst.gamma_star);
  if (hi / lo < 10.0 - 1e-9) throw Error(Errc::InsufficientSpread, "dl-projector", "gamma* spans less than a decade");
  if (!(eps > 0 && eps < 1)) throw Error(Errc::BadEps, "dl-projector", "eps must lie in (0, 1)");
  SlopeFit fit;
  std::vector<double> xs, ys;
  for (const auto& inst : instances) {
    const int l = minimal_degree(inst, eps);
    fit.gamma_stars.push_back(inst.gamma_star);
    fit.degrees.push_back(l);
    xs.push_back(std::log(1.0 / inst.gamma_star));
    ys.push_back(std::log(static_cast<double>(l)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace dlgibbs
