#pragma once

// Parent Hamiltonian of a KMS-detailed-balanced Lindbladian on the doubled register.
// Qubits 0..n-1 carry the ket index of v(X), qubits n..2n-1 the bra index.
// The parent is negative semidefinite with v(sqrt(sigma)) at eigenvalue 0.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dlgibbs/hamiltonian.hpp"
#include "dlgibbs/kms.hpp"
#include "dlgibbs/vectorization.hpp"

namespace dlgibbs {

struct ParentTerm {
  DenseMatrix op;   // H^a on the full doubled register
  Sites support;    // doubled support {s} u {n + s}
};

struct ParentHamiltonian {
  int n = 0;
  double beta = 0.0;
  DenseMatrix full;                 // sum_a H^a, dimension 4^n
  std::vector<ParentTerm> terms;
  Vector ground;                    // v(sqrt(sigma))
  double cross_check_residual = 0.0;  // per-term formula vs Gamma^{1/2} L Gamma^{-1/2} built from the map
};

inline Sites doubled_support(const Sites& support, int n) {
  Sites out = support;
  for (int s : support) out.push_back(n + s);
  std::sort(out.begin(), out.end());
  return out;
}

/// Normalized v(sqrt(sigma)); tracing out the second register returns sigma.
inline Vector purified_state(const DenseMatrix& sigma) {
  const DenseMatrix root = hermitian_function(sigma, [](double x) { return std::sqrt(std::max(x, 0.0)); }, 1e-9);
  Vector v = vectorize(root);
  return v / v.norm();
}

inline Vector purified_gibbs(const LocalHamiltonian& h, double beta) {
  if (!(beta >= 0)) throw Error(Errc::BadInputs, "parent-hamiltonian", "beta must be >= 0");
  return purified_state(gibbs_state(assemble(h), beta));
}

/// Vectorized Heisenberg generator of one term:
/// iG (x) I - i I (x) G^T + L^dag (x) L^T - 1/2 L^dag L (x) I - 1/2 I (x) L^T L^*.
inline DenseMatrix vectorized_generator(const LindbladTerm& term, int n) {
  const Index d = Index{1} << n;
  const DenseMatrix id = identity(d);
  DenseMatrix out = DenseMatrix::Zero(d * d, d * d);
  for (const auto& jump : term.jumps) {
    const DenseMatrix l = embed_term(jump, n);
    out += kron(l.adjoint(), l.transpose());
    out -= 0.5 * kron(l.adjoint() * l, id);
    out -= 0.5 * kron(id, l.transpose() * l.conjugate());
  }
  if (term.coherent.op.size() > 0) {
    const DenseMatrix g = embed_term(term.coherent, n);
    out += cplx(0, 1) * kron(g, id) - cplx(0, 1) * kron(id, g.transpose());
  }
  return out;
}

struct ParentOptions {
  double db_tol = 1e-8;
};

inline ParentHamiltonian build_parent(const std::vector<LindbladTerm>& terms, const KmsForm& kms, double beta,
                                      const ParentOptions& opts = {}) {
  const int n = kms.qubits();
  const Index d = kms.dimension();
  ParentHamiltonian ph;
  ph.n = n;
  ph.beta = beta;
  ph.full = DenseMatrix::Zero(d * d, d * d);
  for (const auto& term : terms) {
    ParentTerm pt;
    pt.op = kms.gamma_half() * vectorized_generator(term, n) * kms.gamma_inv_half();
    const double residual = hermiticity_defect(pt.op) / std::max(1.0, op_norm(pt.op));
    if (residual > opts.db_tol) {
      throw Error(Errc::NotDetailedBalanced, "parent-hamiltonian", "term residual " + std::to_string(residual));
    }
    pt.support = doubled_support(term.support, n);
    ph.full += pt.op;
    ph.terms.push_back(std::move(pt));
  }
  ph.ground = purified_state(kms.sigma());

  // Independent path: build L column by column from its action on |i><j|, then conjugate.
  std::vector<DenseMatrix> jumps, gs;
  for (const auto& term : terms) {
    for (const auto& j : term.jumps) jumps.push_back(embed_term(j, n));
    if (term.coherent.op.size() > 0) gs.push_back(embed_term(term.coherent, n));
  }
  const auto map = [&](const DenseMatrix& x) {
    DenseMatrix y = DenseMatrix::Zero(d, d);
    for (const auto& l : jumps) {
      const DenseMatrix ldl = l.adjoint() * l;
      y += l.adjoint() * x * l - 0.5 * (ldl * x + x * ldl);
    }
    for (const auto& g : gs) y += cplx(0, 1) * (g * x - x * g);
    return y;
  };
  const Superoperator l{superoperator_from_map(map, d), Picture::Heisenberg, n};
  ph.cross_check_residual = op_norm(ph.full - coherent_form(l, kms).h.mat);
  return ph;
}

struct ParentReport {
  std::vector<double> frustration;    // ||H^a v(sqrt(sigma))|| per term
  double max_frustration = 0.0;
  double full_frustration = 0.0;      // ||H v(sqrt(sigma))||
  double max_hermiticity = 0.0;
  double max_locality = 0.0;          // ||H^a - embed(restriction)|| over terms
  bool locality_checked = false;
  int parent_degree = 0;              // overlap degree of the doubled supports
  double top_eigenvalue = 0.0;
  std::vector<std::string> warnings;
};

inline ParentReport verify_parent(const ParentHamiltonian& ph, const LocalHamiltonian& h) {
  ParentReport rep;
  std::vector<Sites> supports;
  for (const auto& t : ph.terms) {
    const double f = (t.op * ph.ground).norm();
    rep.frustration.push_back(f);
    rep.max_frustration = std::max(rep.max_frustration, f);
    rep.max_hermiticity = std::max(rep.max_hermiticity, hermiticity_defect(t.op));
    supports.push_back(t.support);
  }
  rep.full_frustration = (ph.full * ph.ground).norm();
  rep.parent_degree = overlap_degree(supports);
  rep.top_eigenvalue = hermitian_eigendecompose(ph.full, 1e-8).eigenvalues.maxCoeff();
  if (is_commuting(h)) {
    rep.locality_checked = true;
    for (const auto& t : ph.terms)
      rep.max_locality = std::max(rep.max_locality, restrict_to(t.op, t.support, 2 * ph.n).residual);
  } else {
    rep.warnings.push_back("Hamiltonian is not commuting; locality assertions skipped");
  }
  return rep;
}

struct ParentLocal {
  LocalHamiltonian hamiltonian;   // terms -H^a / max(1, ||H^a||) on their doubled supports
  std::vector<double> scales;
  double max_restriction_residual = 0.0;
};

/// Negated, normalized parent terms as a frustration-free local Hamiltonian on 2n qubits.
inline ParentLocal parent_as_local_hamiltonian(const ParentHamiltonian& ph, double tol = 1e-9) {
  ParentLocal out;
  std::vector<LocalTerm> terms;
  for (std::size_t a = 0; a < ph.terms.size(); ++a) {
    const auto& t = ph.terms[a];
    const DenseMatrix neg = -0.5 * (t.op + t.op.adjoint());
    const auto r = restrict_to(neg, t.support, 2 * ph.n);
    Sites support = t.support;
    DenseMatrix local = r.op;
    if (r.residual > tol * std::max(1.0, op_norm(neg))) {
      support.clear();
      for (int s = 0; s < 2 * ph.n; ++s) support.push_back(s);
      local = neg;
    } else {
      out.max_restriction_residual = std::max(out.max_restriction_residual, r.residual);
    }
    const auto eig = hermitian_eigendecompose(local, 1e-9);
    const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
    if (eig.eigenvalues.minCoeff() < -tol * scale) {
      throw Error(Errc::PositivityFailure, "parent-hamiltonian",
                  "term " + std::to_string(a) + " has eigenvalue " + std::to_string(eig.eigenvalues.minCoeff()));
    }
    out.scales.push_back(scale);
    // Clip roundoff-level negative eigenvalues so the term is exactly PSD.
    RealVector ev = eig.eigenvalues.cwiseMax(0.0) / scale;
    const DenseMatrix psd = eig.eigenvectors * ev.cast<cplx>().asDiagonal() * eig.eigenvectors.adjoint();
    terms.push_back(make_term(psd, support, true));
  }
  out.hamiltonian = LocalHamiltonian(2 * ph.n, std::move(terms));
  return out;
}

}  // namespace dlgibbs
