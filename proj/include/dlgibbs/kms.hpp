#pragma once

// Superoperator algebra under the sigma-KMS inner product <X,Y> = Tr[X^dag sqrt(s) Y sqrt(s)].
//
// A Heisenberg-picture generator L is KMS detailed balanced iff its coherent
// form h = Gamma^{1/2} L Gamma^{-1/2} is Hermitian, where Gamma(X) = s^{1/2} X s^{1/2}.
// All checks below go through h.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dlgibbs/hamiltonian.hpp"
#include "dlgibbs/vectorization.hpp"

namespace dlgibbs {

enum class Picture { Heisenberg, Schrodinger };

struct Superoperator {
  DenseMatrix mat;  // acts on row-major vectorized operators, dimension 4^n
  Picture picture = Picture::Heisenberg;
  int n = 0;

  Index operator_dimension() const { return Index{1} << n; }

  /// Hilbert-Schmidt adjoint; flips the picture tag.
  Superoperator adjoint() const {
    return {mat.adjoint(), picture == Picture::Heisenberg ? Picture::Schrodinger : Picture::Heisenberg, n};
  }

  DenseMatrix apply(const DenseMatrix& x) const { return devectorize(mat * vectorize(x)); }
};

inline Superoperator identity_superoperator(int n) {
  const Index d = Index{1} << n;
  return {identity(d * d), Picture::Heisenberg, n};
}

inline Superoperator zero_superoperator(int n) {
  const Index d = Index{1} << n;
  return {DenseMatrix::Zero(d * d, d * d), Picture::Heisenberg, n};
}

/// One local Lindbladian L_m: jumps, an optional coherent part G (empty op for none),
/// and the qubit support that contains all of them.
struct LindbladTerm {
  std::vector<LocalOperator> jumps;
  LocalOperator coherent;
  Sites support;
  double scale = 1.0;  // factor the generator was divided by during normalization
};

class KmsForm {
 public:
  explicit KmsForm(const DenseMatrix& sigma) {
    require_square(sigma, "kms");
    const Index d = sigma.rows();
    n_ = static_cast<int>(std::llround(std::log2(static_cast<double>(d))));
    if ((Index{1} << n_) != d) throw Error(Errc::DimensionMismatch, "kms", "state dimension is not 2^n");
    auto eig = hermitian_eigendecompose(sigma, 1e-10);
    const double trace = eig.eigenvalues.sum();
    if (!(trace > 0)) throw Error(Errc::SingularSigma, "kms", "state has nonpositive trace");
    eig.eigenvalues /= trace;
    sigma_min_ = eig.eigenvalues.minCoeff();
    if (sigma_min_ <= 1e-14) {
      throw Error(Errc::SingularSigma, "kms", "minimum eigenvalue " + std::to_string(sigma_min_) + " below 1e-14");
    }
    auto power = [&](double p) {
      RealVector f = eig.eigenvalues.array().pow(p);
      return DenseMatrix(eig.eigenvectors * f.cast<cplx>().asDiagonal() * eig.eigenvectors.adjoint());
    };
    sigma_ = power(1.0);
    sqrt_ = power(0.5);
    inv_sqrt_ = power(-0.5);
    quarter_ = power(0.25);
    inv_quarter_ = power(-0.25);
    gamma_half_ = kron(quarter_, quarter_.transpose());
    gamma_inv_half_ = kron(inv_quarter_, inv_quarter_.transpose());
  }

  int qubits() const { return n_; }
  Index dimension() const { return sigma_.rows(); }
  const DenseMatrix& sigma() const { return sigma_; }
  const DenseMatrix& sqrt_sigma() const { return sqrt_; }
  const DenseMatrix& inv_sqrt_sigma() const { return inv_sqrt_; }
  const DenseMatrix& quarter_power() const { return quarter_; }
  const DenseMatrix& inv_quarter_power() const { return inv_quarter_; }
  double sigma_min() const { return sigma_min_; }
  /// Vectorized Gamma^{1/2} = s^{1/4} (x) (s^T)^{1/4} and its inverse.
  const DenseMatrix& gamma_half() const { return gamma_half_; }
  const DenseMatrix& gamma_inv_half() const { return gamma_inv_half_; }

 private:
  int n_ = 0;
  double sigma_min_ = 0.0;
  DenseMatrix sigma_, sqrt_, inv_sqrt_, quarter_, inv_quarter_, gamma_half_, gamma_inv_half_;
};

/// Gibbs state exp(-beta H) / Z of a dense Hermitian H.
inline DenseMatrix gibbs_state(const DenseMatrix& h, double beta) {
  const auto eig = hermitian_eigendecompose(h, 1e-9);
  const double e0 = eig.eigenvalues.minCoeff();
  RealVector w = (-beta * (eig.eigenvalues.array() - e0)).exp();
  w /= w.sum();
  return eig.eigenvectors * w.cast<cplx>().asDiagonal() * eig.eigenvectors.adjoint();
}

inline cplx kms_inner_product(const DenseMatrix& x, const DenseMatrix& y, const KmsForm& kms) {
  if (x.rows() != kms.dimension() || y.rows() != kms.dimension() || x.cols() != x.rows() ||
      y.cols() != y.rows()) {
    throw Error(Errc::DimensionMismatch, "kms", "operator dimensions do not match sigma");
  }
  return (x.adjoint() * kms.sqrt_sigma() * y * kms.sqrt_sigma()).trace();
}

inline double kms_norm_sq(const DenseMatrix& x, const KmsForm& kms) { return kms_inner_product(x, x, kms).real(); }

/// Heisenberg generator sum_m [ i[G,X] + sum_j L_j^dag X L_j - 1/2 {L_j^dag L_j, X} ].
inline Superoperator lindblad_superoperator(const std::vector<LindbladTerm>& terms, int n) {
  const Index d = Index{1} << n;
  DenseMatrix out = DenseMatrix::Zero(d * d, d * d);
  const DenseMatrix id = identity(d);
  for (const auto& term : terms) {
    for (const auto& jump : term.jumps) {
      const DenseMatrix l = embed_term(jump, n);
      const DenseMatrix ldl = l.adjoint() * l;
      out += kron(l.adjoint(), l.transpose());
      out -= 0.5 * kron(ldl, id);
      out -= 0.5 * kron(id, ldl.transpose());
    }
    if (term.coherent.op.size() > 0) {
      const DenseMatrix g = embed_term(term.coherent, n);
      out += cplx(0, 1) * (kron(g, id) - kron(id, g.transpose()));
    }
  }
  return {out, Picture::Heisenberg, n};
}

inline Superoperator lindblad_superoperator(const LindbladTerm& term, int n) {
  return lindblad_superoperator(std::vector<LindbladTerm>{term}, n);
}

namespace detail {
inline void require_heisenberg(const Superoperator& l, const KmsForm& kms) {
  if (l.picture != Picture::Heisenberg) {
    throw Error(Errc::BadInputs, "kms", "generator must be in the Heisenberg picture");
  }
  if (l.n != kms.qubits()) throw Error(Errc::DimensionMismatch, "kms", "generator and sigma sizes differ");
}
}  // namespace detail

struct CoherentForm {
  Superoperator h;
  double hermiticity_residual = 0.0;  // ||h - h^dag||
};

inline CoherentForm coherent_form(const Superoperator& l, const KmsForm& kms) {
  detail::require_heisenberg(l, kms);
  CoherentForm out;
  out.h = {kms.gamma_half() * l.mat * kms.gamma_inv_half(), Picture::Heisenberg, l.n};
  out.hermiticity_residual = hermiticity_defect(out.h.mat);
  return out;
}

/// ||h - h^dag|| / max(1, ||h||); zero iff sigma-KMS detailed balance holds.
inline double db_residual(const Superoperator& l, const KmsForm& kms) {
  const auto cf = coherent_form(l, kms);
  return cf.hermiticity_residual / std::max(1.0, op_norm(cf.h.mat));
}

struct StationaryChannel {
  Superoperator channel;           // P_m, Heisenberg picture
  DenseMatrix kernel_projector;    // Pi_0 onto ker(h_m), coherent coordinates
  int kernel_dim = 0;
  double max_eigenvalue = 0.0;
};

struct ChannelOptions {
  double db_tol = 1e-8;
  double kernel_rel_tol = 1e-9;  // relative to ||h_m||
};

/// P_m = lim_{t->inf} exp(t L_m) = Gamma^{-1/2} Pi_0 Gamma^{1/2}.
inline StationaryChannel stationary_channel(const Superoperator& lm, const KmsForm& kms,
                                            const ChannelOptions& opts = {}) {
  const auto cf = coherent_form(lm, kms);
  const double hnorm = op_norm(cf.h.mat);
  const double residual = cf.hermiticity_residual / std::max(1.0, hnorm);
  if (residual > opts.db_tol) {
    throw Error(Errc::NotDetailedBalanced, "kms", "db residual " + std::to_string(residual));
  }
  const auto eig = hermitian_eigendecompose(cf.h.mat, 2 * opts.db_tol);
  const double ktol = opts.kernel_rel_tol * hnorm + 1e-13;
  StationaryChannel out;
  out.max_eigenvalue = eig.eigenvalues.maxCoeff();
  if (out.max_eigenvalue > ktol) {
    throw Error(Errc::PositiveEigenvalue, "kms", "coherent form has eigenvalue " + std::to_string(out.max_eigenvalue));
  }
  std::vector<Index> kernel;
  for (Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (std::abs(eig.eigenvalues(i)) <= ktol) kernel.push_back(i);
  DenseMatrix basis(eig.eigenvectors.rows(), static_cast<Index>(kernel.size()));
  for (std::size_t c = 0; c < kernel.size(); ++c) basis.col(static_cast<Index>(c)) = eig.eigenvectors.col(kernel[c]);
  out.kernel_dim = static_cast<int>(kernel.size());
  out.kernel_projector = projector_onto_columns(basis);
  out.channel = {kms.gamma_inv_half() * out.kernel_projector * kms.gamma_half(), Picture::Heisenberg, lm.n};
  return out;
}

struct CptpReport {
  double min_choi_eigenvalue = 0.0;
  double tp_residual = 0.0;
  bool completely_positive = false;
  bool trace_preserving = false;
  DenseMatrix choi;
};

/// Choi matrix J = sum_ij |i><j| (x) E(|i><j|) of the Schrodinger-picture map E.
inline CptpReport cptp_check(const Superoperator& p, double tol = 1e-9) {
  const Superoperator e = p.picture == Picture::Schrodinger ? p : p.adjoint();
  const Index d = e.operator_dimension();
  CptpReport rep;
  rep.choi = DenseMatrix(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) rep.choi(i * d + k, j * d + l) = e.mat(k * d + l, i * d + j);
  const DenseMatrix herm = 0.5 * (rep.choi + rep.choi.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(herm, Eigen::EigenvaluesOnly);
  rep.min_choi_eigenvalue = solver.eigenvalues().minCoeff() - hermiticity_defect(rep.choi);
  std::vector<int> dims(2, static_cast<int>(d));
  const DenseMatrix input_marginal = partial_trace(rep.choi, std::vector<int>{0}, dims);
  rep.tp_residual = op_norm(input_marginal - identity(d));
  rep.completely_positive = rep.min_choi_eigenvalue >= -tol;
  rep.trace_preserving = rep.tp_residual <= tol;
  return rep;
}

struct SpectralReport {
  std::vector<double> eigenvalues;  // of h, descending
  double gap = 0.0;                 // lambda_1 - lambda_2
  int kernel_dim = 0;
  double db_residual = 0.0;
  double hermiticity_residual = 0.0;
  double dl_residual_energy = 0.0;  // epsilon_phi diagnostic, filled by the DL sampler
};

struct SpectralOptions {
  double db_tol = 1e-8;
  double kernel_rel_tol = 1e-9;
};

inline SpectralReport spectrum_of_hermitian(const DenseMatrix& h, double kernel_rel_tol) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(Errc::NoConvergence, "kms", "eigensolver failed");
  SpectralReport rep;
  const RealVector& ev = solver.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
  rep.gap = rep.eigenvalues.size() > 1 ? rep.eigenvalues[0] - rep.eigenvalues[1] : 0.0;
  const double ktol = kernel_rel_tol * std::max(1.0, op_norm(h));
  rep.kernel_dim = static_cast<int>(
      std::count_if(rep.eigenvalues.begin(), rep.eigenvalues.end(), [&](double x) { return std::abs(x) <= ktol; }));
  return rep;
}

inline SpectralReport spectral_report(const Superoperator& l, const KmsForm& kms, const SpectralOptions& opts = {}) {
  const auto cf = coherent_form(l, kms);
  const double residual = cf.hermiticity_residual / std::max(1.0, op_norm(cf.h.mat));
  if (residual > opts.db_tol) {
    throw Error(Errc::NotDetailedBalanced, "kms", "db residual " + std::to_string(residual));
  }
  SpectralReport rep = spectrum_of_hermitian(cf.h.mat, opts.kernel_rel_tol);
  rep.db_residual = residual;
  rep.hermiticity_residual = cf.hermiticity_residual;
  return rep;
}

/// ||L^dag(sigma)||_1: the Schrodinger-picture stationarity defect.
inline double stationarity_defect(const Superoperator& l, const KmsForm& kms) {
  const Superoperator s = l.picture == Picture::Schrodinger ? l : l.adjoint();
  const DenseMatrix out = s.apply(kms.sigma());
  return schatten1_distance(out, DenseMatrix::Zero(out.rows(), out.cols()));
}

}  // namespace dlgibbs
