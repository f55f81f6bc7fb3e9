#pragma once

// Bounded-degree local Hamiltonians on qubit chains and the instance zoo.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dlgibbs/numerics.hpp"

namespace dlgibbs {

using Sites = std::vector<int>;

/// Dense matrix acting on an ordered list of qubits.
struct LocalOperator {
  DenseMatrix op;
  Sites support;
};

/// A Hamiltonian term. `projector_like` marks terms promised to satisfy 0 <= op <= I.
struct LocalTerm : LocalOperator {
  bool projector_like = false;
};

inline LocalTerm make_term(DenseMatrix op, Sites support, bool projector_like = false) {
  LocalTerm t;
  t.op = std::move(op);
  t.support = std::move(support);
  t.projector_like = projector_like;
  return t;
}

inline void validate_support(const Sites& support, int n, const DenseMatrix& op, const char* module) {
  std::set<int> seen;
  for (int s : support) {
    if (s < 0 || s >= n || !seen.insert(s).second) {
      throw Error(Errc::SupportOutOfRange, module,
                  "site " + std::to_string(s) + " invalid for " + std::to_string(n) + " qubits");
    }
  }
  const Index local_dim = Index{1} << support.size();
  if (op.rows() != local_dim || op.cols() != local_dim) {
    throw Error(Errc::DimensionMismatch, module,
                "operator dimension does not match support of size " + std::to_string(support.size()));
  }
}

/// Embeds `op` on `support` into n qubits, acting as identity elsewhere.
inline DenseMatrix embed(const DenseMatrix& op, const Sites& support, int n) {
  validate_support(support, n, op, "hamiltonian");
  const int k = static_cast<int>(support.size());
  const Index dim = Index{1} << n;
  const Index local_dim = Index{1} << k;

  std::vector<Index> deposit(local_dim, 0);  // local index -> full-index bit pattern
  for (Index l = 0; l < local_dim; ++l)
    for (int t = 0; t < k; ++t)
      if ((l >> (k - 1 - t)) & 1) deposit[l] |= Index{1} << (n - 1 - support[t]);
  Index mask = 0;
  for (int s : support) mask |= Index{1} << (n - 1 - s);

  DenseMatrix out = DenseMatrix::Zero(dim, dim);
  for (Index row = 0; row < dim; ++row) {
    Index lr = 0;
    for (int t = 0; t < k; ++t) lr = (lr << 1) | ((row >> (n - 1 - support[t])) & 1);
    const Index base = row & ~mask;
    for (Index lc = 0; lc < local_dim; ++lc) out(row, base | deposit[lc]) = op(lr, lc);
  }
  return out;
}

inline DenseMatrix embed_term(const LocalOperator& t, int n) { return embed(t.op, t.support, n); }

/// Restriction of a full operator to `support`: Tr_rest(A) / 2^|rest|, and the
/// residual ||A - embed(restricted)|| measuring how far A is from (restricted x I).
struct Restriction {
  DenseMatrix op;
  double residual;
};

inline Restriction restrict_to(const DenseMatrix& full, const Sites& support, int n) {
  std::vector<int> dims(n, 2);
  Sites sorted = support;
  std::sort(sorted.begin(), sorted.end());
  DenseMatrix reduced = partial_trace(full, sorted, dims);
  reduced /= static_cast<double>(Index{1} << (n - static_cast<int>(sorted.size())));
  const double residual = op_norm(full - embed(reduced, sorted, n));
  return {reduced, residual};
}

inline bool supports_overlap(const Sites& a, const Sites& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

/// Maximum over items of the number of other items with overlapping support.
inline int overlap_degree(const std::vector<Sites>& supports) {
  int degree = 0;
  for (std::size_t m = 0; m < supports.size(); ++m) {
    int count = 0;
    for (std::size_t j = 0; j < supports.size(); ++j)
      if (j != m && supports_overlap(supports[m], supports[j])) ++count;
    degree = std::max(degree, count);
  }
  return degree;
}

/// Maximum over items of the number of others they fail to commute with.
inline int commutator_degree(const std::vector<DenseMatrix>& ops, double tol = 1e-10) {
  int degree = 0;
  for (std::size_t m = 0; m < ops.size(); ++m) {
    int count = 0;
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (j == m) continue;
      const double scale = std::max(1.0, op_norm(ops[m]) * op_norm(ops[j]));
      if (op_norm(ops[m] * ops[j] - ops[j] * ops[m]) > tol * scale) ++count;
    }
    degree = std::max(degree, count);
  }
  return degree;
}

class LocalHamiltonian {
 public:
  LocalHamiltonian() = default;

  LocalHamiltonian(int n, std::vector<LocalTerm> terms) : n_(n), terms_(std::move(terms)) {
    if (n <= 0 || n > 14) throw Error(Errc::BadParams, "hamiltonian", "qubit count must be in [1, 14]");
    std::vector<Sites> supports;
    for (const auto& t : terms_) {
      validate_support(t.support, n_, t.op, "hamiltonian");
      locality_ = std::max(locality_, static_cast<int>(t.support.size()));
      supports.push_back(t.support);
    }
    degree_ = overlap_degree(supports);
  }

  int qubits() const { return n_; }
  Index dimension() const { return Index{1} << n_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  /// Support-overlap degree g.
  int degree() const { return degree_; }
  /// Largest support size k.
  int locality() const { return locality_; }

  std::vector<DenseMatrix> embedded_terms() const {
    std::vector<DenseMatrix> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(embed_term(t, n_));
    return out;
  }

 private:
  int n_ = 0;
  std::vector<LocalTerm> terms_;
  int degree_ = 0;
  int locality_ = 0;
};

inline DenseMatrix assemble(const LocalHamiltonian& h) {
  DenseMatrix out = DenseMatrix::Zero(h.dimension(), h.dimension());
  for (const auto& t : h.terms()) out += embed_term(t, h.qubits());
  return out;
}

inline int interaction_degree(const LocalHamiltonian& h) { return h.degree(); }

/// Exact non-commutation degree of the embedded terms.
inline int commutation_degree(const LocalHamiltonian& h, double tol = 1e-10) {
  return commutator_degree(h.embedded_terms(), tol);
}

inline bool is_commuting(const LocalHamiltonian& h, double tol = 1e-12) {
  return commutation_degree(h, tol) == 0;
}

struct GroundSpaceInfo {
  DenseMatrix projector;
  int dimension = 0;               // r
  double ground_energy = 0.0;
  double gap = 0.0;                // gamma; 0 when the spectrum is a single cluster
  double frustration_residual = 0.0;
  bool degenerate_gap = false;     // gap below tolerance
  RealVector spectrum;
};

/// Projector onto the lowest eigenvalue cluster of the assembled Hamiltonian.
inline GroundSpaceInfo ground_space(const LocalHamiltonian& h, double tol = 1e-8) {
  const DenseMatrix full = assemble(h);
  const auto eig = hermitian_eigendecompose(full, 1e-9);
  GroundSpaceInfo info;
  info.spectrum = eig.eigenvalues;
  const double e0 = eig.eigenvalues(0);
  int r = 0;
  while (r < eig.eigenvalues.size() && eig.eigenvalues(r) - e0 <= tol) ++r;
  info.dimension = r;
  info.ground_energy = eig.eigenvalues.head(r).mean();
  info.projector = projector_onto_columns(eig.eigenvectors.leftCols(r));
  info.gap = r < eig.eigenvalues.size() ? eig.eigenvalues(r) - info.ground_energy : 0.0;
  info.degenerate_gap = info.gap < tol;
  for (const auto& t : h.terms())
    info.frustration_residual =
        std::max(info.frustration_residual, op_norm(info.projector * embed_term(t, h.qubits())));
  return info;
}

enum class InstanceKind { ZzChain, FieldChain, RandomFfProjectors, CommutingProjectors };

inline InstanceKind parse_instance_kind(std::string_view name) {
  if (name == "zz_chain") return InstanceKind::ZzChain;
  if (name == "field_chain") return InstanceKind::FieldChain;
  if (name == "random_ff_projectors") return InstanceKind::RandomFfProjectors;
  if (name == "commuting_projectors") return InstanceKind::CommutingProjectors;
  throw Error(Errc::UnknownKind, "hamiltonian", "unknown instance kind '" + std::string(name) + "'");
}

inline std::string_view instance_kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::ZzChain: return "zz_chain";
    case InstanceKind::FieldChain: return "field_chain";
    case InstanceKind::RandomFfProjectors: return "random_ff_projectors";
    case InstanceKind::CommutingProjectors: return "commuting_projectors";
  }
  return "?";
}

using InstanceParams = std::map<std::string, double>;

namespace detail {

inline int qubit_count_param(const InstanceParams& params, int minimum) {
  for (const auto& [key, value] : params)
    if (key != "n") throw Error(Errc::BadParams, "hamiltonian", "unknown instance parameter '" + key + "'");
  const auto it = params.find("n");
  if (it == params.end()) throw Error(Errc::BadParams, "hamiltonian", "missing parameter 'n'");
  const double n = it->second;
  if (n != std::floor(n) || n < minimum || n > 12) {
    throw Error(Errc::BadParams, "hamiltonian",
                "n must be an integer in [" + std::to_string(minimum) + ", 12]");
  }
  return static_cast<int>(n);
}

}  // namespace detail

/// Instance zoo. All kinds are frustration-free with |0...0> in the kernel.
///  zz_chain:             (I - Z_i Z_{i+1}) / 2 on every bond
///  field_chain:          (I - Z_i) / 2 on every site
///  random_ff_projectors: rank-1 |phi><phi| per bond, <phi|00> = 0, phi Haar on the complement
///  commuting_projectors: diagonal projector per bond onto a random nonempty subset of {01,10,11}
inline LocalHamiltonian make_instance(InstanceKind kind, const InstanceParams& params, std::uint64_t seed) {
  const DenseMatrix z = pauli_z();
  const DenseMatrix i2 = identity(2);
  std::vector<LocalTerm> terms;
  std::mt19937_64 rng(seed);
  int n = 0;
  switch (kind) {
    case InstanceKind::ZzChain: {
      n = detail::qubit_count_param(params, 2);
      const DenseMatrix bond = 0.5 * (identity(4) - kron(z, z));
      for (int i = 0; i + 1 < n; ++i) terms.push_back(make_term(bond, {i, i + 1}, true));
      break;
    }
    case InstanceKind::FieldChain: {
      n = detail::qubit_count_param(params, 1);
      const DenseMatrix site = 0.5 * (i2 - z);
      for (int i = 0; i < n; ++i) terms.push_back(make_term(site, {i}, true));
      break;
    }
    case InstanceKind::RandomFfProjectors: {
      n = detail::qubit_count_param(params, 2);
      for (int i = 0; i + 1 < n; ++i) {
        Vector phi = Vector::Zero(4);
        phi.tail(3) = random_gaussian_matrix(3, 1, rng);
        phi.normalize();
        terms.push_back(make_term(phi * phi.adjoint(), {i, i + 1}, true));
      }
      break;
    }
    case InstanceKind::CommutingProjectors: {
      n = detail::qubit_count_param(params, 2);
      std::uniform_int_distribution<int> subset(1, 7);  // bitmask over {01, 10, 11}
      for (int i = 0; i + 1 < n; ++i) {
        const int mask = subset(rng);
        DenseMatrix proj = DenseMatrix::Zero(4, 4);
        for (int b = 0; b < 3; ++b)
          if ((mask >> b) & 1) proj(b + 1, b + 1) = 1.0;
        terms.push_back(make_term(proj, {i, i + 1}, true));
      }
      break;
    }
  }
  return LocalHamiltonian(n, std::move(terms));
}

inline LocalHamiltonian make_instance(std::string_view kind, const InstanceParams& params, std::uint64_t seed) {
  return make_instance(parse_instance_kind(kind), params, seed);
}

}  // namespace dlgibbs
