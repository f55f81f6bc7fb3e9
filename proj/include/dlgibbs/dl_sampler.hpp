#pragma once

// Detectability-lemma Gibbs sampler: Phi = P_1 P_2 ... P_M of local stationary
// channels, iterated in the Schrodinger picture.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dlgibbs/kms.hpp"

namespace dlgibbs {

struct OrderSpec {
  bool by_index = true;
  std::uint64_t seed = 0;

  static OrderSpec index() { return {}; }
  static OrderSpec seeded(std::uint64_t seed) { return {false, seed}; }
};

inline std::vector<std::size_t> make_order(std::size_t m, const OrderSpec& spec) {
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!spec.by_index) {
    std::mt19937_64 rng(spec.seed);
    // Fisher-Yates with an explicit draw so the permutation is library independent.
    for (std::size_t i = m; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  return order;
}

struct DlChannel {
  int n = 0;
  std::vector<Superoperator> factors;           // P_m in product order (Heisenberg)
  std::vector<DenseMatrix> kernel_projectors;   // Pi_0 of each factor, coherent coordinates
  std::vector<int> kernel_dims;
  std::vector<std::size_t> order;               // order[i] = term index of the i-th factor
  Superoperator composite;                      // Phi = factors[0] * ... * factors[M-1]
  double gap_L = 0.0;                           // gap of the full generator
  int kernel_dim_L = 0;
  int noncommuting_degree = 0;                  // over the factors P_m
  int overlap_degree = 0;                       // over the term supports

  std::size_t size() const { return factors.size(); }
  /// Degree entering the bounds; the formula divides by g^2 so it is at least 1.
  int bound_degree() const { return std::max(1, noncommuting_degree); }
  double contraction_factor() const {
    const double g = bound_degree();
    return 1.0 / (gap_L / (g * g) + 1.0);
  }
  Superoperator schrodinger() const { return composite.adjoint(); }
};

inline DlChannel compose_dl_channel(const std::vector<LindbladTerm>& terms, const KmsForm& kms,
                                    const OrderSpec& order = {}, const ChannelOptions& opts = {}) {
  const int n = kms.qubits();
  DlChannel ch;
  ch.n = n;
  ch.order = make_order(terms.size(), order);
  std::vector<Sites> supports;
  Superoperator total = zero_superoperator(n);
  for (std::size_t idx : ch.order) {
    const auto lm = lindblad_superoperator(terms[idx], n);
    total.mat += lm.mat;
    auto sc = stationary_channel(lm, kms, opts);
    ch.factors.push_back(std::move(sc.channel));
    ch.kernel_projectors.push_back(std::move(sc.kernel_projector));
    ch.kernel_dims.push_back(sc.kernel_dim);
    supports.push_back(terms[idx].support);
  }
  ch.composite = identity_superoperator(n);
  for (const auto& p : ch.factors) ch.composite.mat = ch.composite.mat * p.mat;
  std::vector<DenseMatrix> mats;
  for (const auto& p : ch.factors) mats.push_back(p.mat);
  ch.noncommuting_degree = commutator_degree(mats, 1e-10);
  ch.overlap_degree = overlap_degree(supports);
  const auto rep = spectral_report(total, kms, {opts.db_tol, opts.kernel_rel_tol});
  ch.gap_L = rep.gap;
  ch.kernel_dim_L = rep.kernel_dim;
  return ch;
}

struct MixingRecord {
  int k = 0;
  double trace_distance = 0.0;
  double bound = 0.0;
  long long channel_applications = 0;
};

struct MixingTrace {
  std::vector<MixingRecord> records;
  double sigma_min = 0.0;
  double gap = 0.0;
  int degree = 1;
  long long total_applications = 0;

  /// Largest d_k - bound_k over the trace.
  double worst_margin() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) worst = std::max(worst, r.trace_distance - r.bound);
    return worst;
  }
};

/// rho_k = (Phi^dag)^k (rho_0): P_1^dag acts first, P_M^dag last.
inline MixingTrace iterate(const DlChannel& ch, const DenseMatrix& rho0, const KmsForm& kms, int k_max) {
  if (rho0.rows() != kms.dimension() || rho0.cols() != kms.dimension()) {
    throw Error(Errc::DimensionMismatch, "dl-sampler", "initial state dimension does not match sigma");
  }
  if (k_max < 0) throw Error(Errc::BadInputs, "dl-sampler", "k_max must be nonnegative");
  std::vector<DenseMatrix> adjoints;
  for (const auto& p : ch.factors) adjoints.push_back(p.mat.adjoint());

  MixingTrace trace;
  trace.sigma_min = kms.sigma_min();
  trace.gap = ch.gap_L;
  trace.degree = ch.bound_degree();
  const double rate = ch.contraction_factor();
  const double prefactor = 1.0 / std::sqrt(kms.sigma_min());

  Vector state = vectorize(rho0);
  long long applications = 0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      for (const auto& p : adjoints) {
        state = p * state;
        ++applications;
      }
    }
    MixingRecord rec;
    rec.k = k;
    rec.trace_distance = schatten1_distance(devectorize(state), kms.sigma());
    rec.bound = std::pow(rate, 0.5 * k) * prefactor;
    rec.channel_applications = applications;
    trace.records.push_back(rec);
  }
  trace.total_applications = applications;
  return trace;
}

struct ContractionReport {
  double max_ratio = 0.0;            // max ||Phi(X)||^2 (gap/g^2+1) / ||X||^2
  double max_trace_residual = 0.0;   // max |Tr[sigma Phi(X)]|
  int trials = 0;
  int vacuous = 0;                   // X proportional to I, nothing to contract
  std::vector<double> ratios;
};

/// Ratio for one observable after centering; returns a negative value when X is
/// proportional to the identity.
inline double contraction_ratio(const DlChannel& ch, const KmsForm& kms, const DenseMatrix& x,
                                double* trace_residual = nullptr) {
  const DenseMatrix centered = x - (kms.sigma() * x).trace() * identity(x.rows());
  const double norm_in = kms_norm_sq(centered, kms);
  const DenseMatrix out = ch.composite.apply(centered);
  if (trace_residual) *trace_residual = std::abs((kms.sigma() * out).trace());
  if (norm_in <= 1e-24 * std::max(1.0, kms_norm_sq(x, kms))) return -1.0;
  const double g = ch.bound_degree();
  return kms_norm_sq(out, kms) * (ch.gap_L / (g * g) + 1.0) / norm_in;
}

inline ContractionReport contraction_check(const DlChannel& ch, const KmsForm& kms, int trials, std::uint64_t seed) {
  ContractionReport rep;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix x = random_gaussian_matrix(kms.dimension(), kms.dimension(), rng);
    double residual = 0.0;
    const double ratio = contraction_ratio(ch, kms, x, &residual);
    ++rep.trials;
    rep.max_trace_residual = std::max(rep.max_trace_residual, residual);
    if (ratio < 0) {
      ++rep.vacuous;
      continue;
    }
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

struct SuperopHamiltonianReport {
  SpectralReport spectrum;   // of -H_L, so eigenvalues are descending and gap = gamma
  double gamma = 0.0;        // gap(H_L)
  double gap_L = 0.0;
  int kernel_dim = 0;
  bool irreducible = false;
  double eps_phi = 0.0;      // <phi|H_L|phi>/<phi|phi> for phi = Pi_1...Pi_M psi_1
  double phi_norm_sq = 0.0;  // <phi|phi>, bounded by 1/(eps_phi/g^2 + 1)
  double phi_bound = 0.0;
  std::vector<std::string> warnings;
};

/// H_L = sum_m (I - P_m) in coherent coordinates, where P_m becomes the kernel projector.
inline SuperopHamiltonianReport superop_hamiltonian(const DlChannel& ch, double kernel_rel_tol = 1e-9) {
  const Index dim = ch.composite.mat.rows();
  DenseMatrix hl = DenseMatrix::Zero(dim, dim);
  for (const auto& pi : ch.kernel_projectors) hl += identity(dim) - pi;

  SuperopHamiltonianReport rep;
  rep.spectrum = spectrum_of_hermitian(-hl, kernel_rel_tol);
  rep.gamma = rep.spectrum.gap;
  rep.gap_L = ch.gap_L;
  rep.kernel_dim = rep.spectrum.kernel_dim;
  rep.irreducible = rep.kernel_dim == 1 && ch.kernel_dim_L == 1;
  if (!rep.irreducible) {
    rep.warnings.push_back("IrreducibilityWarning: kernel dimension " + std::to_string(rep.kernel_dim) +
                           " (generator " + std::to_string(ch.kernel_dim_L) + ")");
  }
  if (rep.gamma < rep.gap_L - 1e-8) {
    rep.warnings.push_back("gamma " + std::to_string(rep.gamma) + " below gap(L) " + std::to_string(rep.gap_L));
  }

  // Detectability-lemma diagnostic on the first excited state of H_L.
  const auto eig = hermitian_eigendecompose(hl, 1e-9);
  if (rep.kernel_dim < dim) {
    Vector phi = eig.eigenvectors.col(rep.kernel_dim);
    for (auto it = ch.kernel_projectors.rbegin(); it != ch.kernel_projectors.rend(); ++it) phi = (*it) * phi;
    rep.phi_norm_sq = phi.squaredNorm();
    if (rep.phi_norm_sq > 1e-28) {
      rep.eps_phi = (phi.adjoint() * hl * phi)(0, 0).real() / rep.phi_norm_sq;
      const double g = ch.bound_degree();
      rep.phi_bound = 1.0 / (rep.eps_phi / (g * g) + 1.0);
    }
  }
  rep.spectrum.dl_residual_energy = rep.eps_phi;
  return rep;
}

inline SuperopHamiltonianReport superop_hamiltonian(const std::vector<LindbladTerm>& terms, const KmsForm& kms) {
  return superop_hamiltonian(compose_dl_channel(terms, kms));
}

}  // namespace dlgibbs
