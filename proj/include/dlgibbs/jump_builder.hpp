#pragma once

// Jump operators and coherent terms built from Bohr-frequency components.
//
// Convention: A_w = sum_{E - E' = w} Pi_{E'} A Pi_E, so A_w lowers the energy by w.
// The jump is L = sum_w w_hat(w) A_w with w_hat(w) = q(-w) exp(x beta w), and the
// coherent term is G = sum_w g_hat(w) (L^dag L)_w with g_hat(w) = -(i/2) tanh(s w) kappa(w).
// x = 1/4 with even q and s = beta/4 gives exact KMS detailed balance.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlgibbs/hamiltonian.hpp"
#include "dlgibbs/kms.hpp"

namespace dlgibbs {

struct BohrDecomposition {
  std::vector<double> frequencies;       // ascending, distinct after clustering
  std::vector<DenseMatrix> components;   // A_w, same order as frequencies
};

/// cluster_tol <= 0 selects 1e-9 * max(1, ||H||).
inline BohrDecomposition bohr_decompose(const DenseMatrix& a, const DenseMatrix& h, double cluster_tol = -1.0) {
  require_square(a, "jump-builder");
  if (a.rows() != h.rows() || h.rows() != h.cols()) {
    throw Error(Errc::DimensionMismatch, "jump-builder", "coupling and Hamiltonian dimensions differ");
  }
  const double hnorm = op_norm(h);
  const double tol = cluster_tol > 0 ? cluster_tol : 1e-9 * std::max(1.0, hnorm);
  const auto eig = hermitian_eigendecompose(h, 1e-9);
  const Index d = h.rows();

  // Cluster energies into levels.
  std::vector<int> level(d);
  std::vector<double> energies;
  for (Index i = 0; i < d; ++i) {
    if (energies.empty() || eig.eigenvalues(i) - energies.back() > tol) energies.push_back(eig.eigenvalues(i));
    level[i] = static_cast<int>(energies.size()) - 1;
  }

  // Distinct Bohr frequencies between levels, merged within tol.
  std::vector<double> raw;
  for (double ei : energies)
    for (double ej : energies) raw.push_back(ej - ei);
  std::sort(raw.begin(), raw.end());
  std::vector<double> freqs;
  for (double w : raw)
    if (freqs.empty() || w - freqs.back() > tol) freqs.push_back(w);
  auto freq_index = [&](double w) {
    const auto it = std::lower_bound(freqs.begin(), freqs.end(), w - tol);
    return static_cast<std::size_t>(it - freqs.begin());
  };

  const DenseMatrix a_eig = eig.eigenvectors.adjoint() * a * eig.eigenvectors;
  std::vector<DenseMatrix> parts(freqs.size(), DenseMatrix::Zero(d, d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      // row energy E' = level i, column energy E = level j, w = E - E'
      const double w = energies[level[j]] - energies[level[i]];
      parts[freq_index(w)](i, j) = a_eig(i, j);
    }

  BohrDecomposition out;
  const double drop = 1e-13 * std::max(1.0, op_norm(a));
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (parts[k].norm() <= drop) continue;
    out.frequencies.push_back(freqs[k]);
    out.components.push_back(eig.eigenvectors * parts[k] * eig.eigenvectors.adjoint());
  }
  return out;
}

enum class WeightKind { PaperF, DaviesKms, Custom };
enum class QProfile { One, Gaussian };

inline WeightKind parse_weight_kind(std::string_view s) {
  if (s == "paper_f") return WeightKind::PaperF;
  if (s == "davies_kms") return WeightKind::DaviesKms;
  if (s == "custom") return WeightKind::Custom;
  throw Error(Errc::UnknownKind, "jump-builder", "unknown weight kind '" + std::string(s) + "'");
}

inline std::string_view weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::PaperF: return "paper_f";
    case WeightKind::DaviesKms: return "davies_kms";
    case WeightKind::Custom: return "custom";
  }
  return "?";
}

inline QProfile parse_q_profile(std::string_view s) {
  if (s == "one") return QProfile::One;
  if (s == "gaussian") return QProfile::Gaussian;
  throw Error(Errc::UnknownKind, "jump-builder", "unknown q profile '" + std::string(s) + "'");
}

inline std::string_view q_profile_name(QProfile q) { return q == QProfile::One ? "one" : "gaussian"; }

struct WeightProfile {
  WeightKind kind = WeightKind::DaviesKms;
  double beta = 1.0;
  QProfile q_profile = QProfile::One;
  double q_width = 1.0;                 // Gaussian q(w) = exp(-w^2 / (2 width^2))
  std::vector<std::pair<double, double>> q_table;  // custom: (w, q) knots, linear interpolation
  double weight_exponent = 1.0;         // x in exp(x beta w); davies_kms forces 1/4
  double tanh_scale = 0.25;             // s in tanh(s w)
  bool tanh_times_beta = false;         // s -> s * beta; davies_kms forces true
  double kappa_cutoff = 0.0;            // <= 0 selects 2 ||H||

  static WeightProfile davies(double beta) {
    WeightProfile w;
    w.kind = WeightKind::DaviesKms;
    w.beta = beta;
    return w;
  }

  static WeightProfile paper(double beta) {
    WeightProfile w;
    w.kind = WeightKind::PaperF;
    w.beta = beta;
    return w;
  }

  double exponent() const { return kind == WeightKind::DaviesKms ? 0.25 : weight_exponent; }

  double effective_tanh_scale() const {
    if (kind == WeightKind::DaviesKms) return 0.25 * beta;
    return tanh_times_beta ? tanh_scale * beta : tanh_scale;
  }

  cplx q(double w) const {
    if (kind == WeightKind::Custom) {
      if (q_table.empty()) throw Error(Errc::BadParams, "jump-builder", "custom weight needs a q table");
      if (w <= q_table.front().first) return q_table.front().second;
      if (w >= q_table.back().first) return q_table.back().second;
      const auto it = std::lower_bound(q_table.begin(), q_table.end(), w,
                                       [](const auto& knot, double x) { return knot.first < x; });
      const auto& [w1, q1] = *it;
      const auto& [w0, q0] = *(it - 1);
      return q0 + (q1 - q0) * (w - w0) / (w1 - w0);
    }
    if (q_profile == QProfile::Gaussian) return std::exp(-w * w / (2 * q_width * q_width));
    return 1.0;
  }

  void validate() const {
    if (!(beta >= 0) || !std::isfinite(beta)) throw Error(Errc::BadParams, "jump-builder", "beta must be >= 0");
    if (q_profile == QProfile::Gaussian && !(q_width > 0)) {
      throw Error(Errc::BadParams, "jump-builder", "q width must be positive");
    }
    if (kind == WeightKind::Custom) {
      if (q_table.size() < 2) throw Error(Errc::BadParams, "jump-builder", "custom q table needs >= 2 knots");
      for (std::size_t i = 1; i < q_table.size(); ++i)
        if (!(q_table[i].first > q_table[i - 1].first)) {
          throw Error(Errc::BadParams, "jump-builder", "q table frequencies must increase");
        }
    }
  }

  /// Frequency weight of the jump on A_w.
  cplx jump_weight(double w) const { return q(-w) * std::exp(exponent() * beta * w); }
};

/// L = sum_w w_hat(w) A_w for A and H on the same space.
inline DenseMatrix build_jump(const DenseMatrix& a, const DenseMatrix& h, const WeightProfile& w) {
  w.validate();
  const auto bohr = bohr_decompose(a, h);
  DenseMatrix l = DenseMatrix::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < bohr.frequencies.size(); ++k) {
    const cplx weight = w.jump_weight(bohr.frequencies[k]);
    if (!std::isfinite(weight.real()) || !std::isfinite(weight.imag())) {
      throw Error(Errc::OverflowDetected, "jump-builder", "jump weight overflowed");
    }
    l += weight * bohr.components[k];
  }
  return l;
}

inline DenseMatrix build_jump(const LocalOperator& a, const DenseMatrix& h, int n, const WeightProfile& w) {
  return build_jump(embed_term(a, n), h, w);
}

struct CoherentTerm {
  DenseMatrix g;
  bool all_frequencies_cut = false;  // kappa excluded every Bohr frequency
  double hermiticity_residual = 0.0;
};

inline CoherentTerm build_coherent(const DenseMatrix& l, const DenseMatrix& h, const WeightProfile& w) {
  w.validate();
  const DenseMatrix ldl = l.adjoint() * l;
  const auto bohr = bohr_decompose(ldl, h);
  const double cutoff = w.kappa_cutoff > 0 ? w.kappa_cutoff : 2 * op_norm(h);
  const double s = w.effective_tanh_scale();
  CoherentTerm out;
  out.g = DenseMatrix::Zero(l.rows(), l.cols());
  bool any_kept = false;
  for (std::size_t k = 0; k < bohr.frequencies.size(); ++k) {
    const double freq = bohr.frequencies[k];
    if (std::abs(freq) > cutoff * (1 + 1e-12)) continue;
    any_kept = true;
    out.g += cplx(0, -0.5) * std::tanh(s * freq) * bohr.components[k];
  }
  out.all_frequencies_cut = !bohr.frequencies.empty() && !any_kept;
  out.hermiticity_residual = hermiticity_defect(out.g);
  return out;
}

struct CouplingSet {
  std::vector<LocalOperator> couplings;
  std::size_t size() const { return couplings.size(); }
};

/// Single-site Pauli couplings: "x", "z", or "xz" (X then Z on every site).
inline CouplingSet pauli_couplings(int n, std::string_view which) {
  if (which != "x" && which != "z" && which != "xz") {
    throw Error(Errc::BadParams, "jump-builder", "coupling set must be x, z or xz");
  }
  CouplingSet set;
  for (int i = 0; i < n; ++i) {
    if (which.find('x') != std::string_view::npos) set.couplings.push_back({pauli_x(), {i}});
    if (which.find('z') != std::string_view::npos) set.couplings.push_back({pauli_z(), {i}});
  }
  return set;
}

struct DressedSupport {
  Sites sites;  // ascending
  bool commuting = true;
};

/// supp(A) together with the supports of every term of H that touches it.
inline DressedSupport dressed_support(const LocalOperator& a, const LocalHamiltonian& h) {
  DressedSupport out;
  out.commuting = is_commuting(h);
  out.sites = a.support;
  for (const auto& t : h.terms())
    if (supports_overlap(t.support, a.support)) out.sites.insert(out.sites.end(), t.support.begin(), t.support.end());
  std::sort(out.sites.begin(), out.sites.end());
  out.sites.erase(std::unique(out.sites.begin(), out.sites.end()), out.sites.end());
  return out;
}

struct ModelOptions {
  bool normalize = true;
  double locality_tol = 1e-9;
};

/// Norm of the generator of one term, computed on its own support.
inline double term_superoperator_norm(const LindbladTerm& term) {
  const int k = static_cast<int>(term.support.size());
  std::map<int, int> relabel;
  for (int i = 0; i < k; ++i) relabel[term.support[i]] = i;
  auto local = [&](const LocalOperator& op) {
    LocalOperator out{op.op, {}};
    for (int s : op.support) out.support.push_back(relabel.at(s));
    return out;
  };
  LindbladTerm compact{{}, {}, {}, 1.0};
  for (const auto& j : term.jumps) compact.jumps.push_back(local(j));
  if (term.coherent.op.size() > 0) compact.coherent = local(term.coherent);
  for (int i = 0; i < k; ++i) compact.support.push_back(i);
  return op_norm(lindblad_superoperator(compact, k).mat);
}

/// One LindbladTerm per coupling. For commuting H each term lives on the dressed
/// support of its coupling; otherwise on all qubits.
inline std::vector<LindbladTerm> build_model(const LocalHamiltonian& h, const CouplingSet& couplings,
                                             const WeightProfile& w, const ModelOptions& opts = {}) {
  const int n = h.qubits();
  const DenseMatrix hfull = assemble(h);
  const bool commuting = is_commuting(h);
  Sites all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  std::vector<LindbladTerm> terms;
  for (const auto& a : couplings.couplings) {
    validate_support(a.support, n, a.op, "jump-builder");
    if (hermiticity_defect(a.op) > 1e-10 * std::max(1.0, op_norm(a.op))) {
      throw Error(Errc::NotHermitian, "jump-builder", "coupling operator must be Hermitian");
    }
    const DenseMatrix l = build_jump(a, hfull, n, w);
    const auto coherent = build_coherent(l, hfull, w);

    Sites support = all;
    DenseMatrix l_local = l, g_local = coherent.g;
    if (commuting) {
      const Sites dressed = dressed_support(a, h).sites;
      const auto rl = restrict_to(l, dressed, n);
      const auto rg = restrict_to(coherent.g, dressed, n);
      const double scale = std::max(1.0, op_norm(l));
      if (rl.residual <= opts.locality_tol * scale && rg.residual <= opts.locality_tol * scale) {
        support = dressed;
        l_local = rl.op;
        g_local = rg.op;
      }
    }
    LindbladTerm term;
    term.support = support;
    term.jumps.push_back({l_local, support});
    if (g_local.norm() > 0) term.coherent = {g_local, support};
    if (opts.normalize) {
      const double s = std::max(1.0, term_superoperator_norm(term));
      term.scale = s;
      for (auto& j : term.jumps) j.op /= std::sqrt(s);
      if (term.coherent.op.size() > 0) term.coherent.op /= s;
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

}  // namespace dlgibbs
