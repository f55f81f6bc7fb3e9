#pragma once

// Purified-Gibbs state preparation along a uniform inverse-temperature path.
// Each step projects onto the parent ground state at beta_j and boosts the
// overlap with the previous state through an odd singular-value polynomial.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dlgibbs/dl_projector.hpp"
#include "dlgibbs/jump_builder.hpp"
#include "dlgibbs/parent_hamiltonian.hpp"

namespace dlgibbs {

inline constexpr double kMaxBetaNorm = 40.0;

struct Schedule {
  double beta_final = 0.0;
  double norm_h = 0.0;
  double alpha = 2.0;
  int K = 1;
  std::vector<double> betas;  // beta_0 = 0, ..., beta_K = beta
  bool degenerate = false;    // beta = 0: nothing to anneal
};

inline Schedule make_schedule(double beta, double norm_h, double alpha) {
  if (!(alpha > 1.0)) throw Error(Errc::BadAlpha, "annealing", "alpha must exceed 1");
  if (!(beta >= 0.0) || !(norm_h >= 0.0)) throw Error(Errc::BadInputs, "annealing", "beta and ||H|| must be >= 0");
  if (beta * norm_h > kMaxBetaNorm) {
    throw Error(Errc::BadInputs, "annealing",
                "beta ||H|| = " + std::to_string(beta * norm_h) + " exceeds the double-precision cap 40");
  }
  Schedule s;
  s.beta_final = beta;
  s.norm_h = norm_h;
  s.alpha = alpha;
  s.K = std::max(1, static_cast<int>(std::ceil(alpha * beta * norm_h - 1e-12)));
  s.degenerate = beta * norm_h == 0.0;
  for (int j = 0; j <= s.K; ++j) s.betas.push_back(beta * j / s.K);
  return s;
}

inline constexpr double kBoostConstant = 3.0;  // c_b in l = c_b ln(1/eps) / b

struct ErrorBudget {
  double eps = 0.0;  // per-transition polynomial error, delta / (4K)
  double mu = 0.0;   // projector error, (delta / (16 sqrt(3) l K))^2
  int l = 1;         // transition degree, odd
  double per_step = 0.0;  // 4 l sqrt(3 mu) + eps, equals delta / (2K)
};

inline int odd_ceil(double x) {
  int v = std::max(1, static_cast<int>(std::ceil(x - 1e-12)));
  return v % 2 == 0 ? v + 1 : v;
}

inline ErrorBudget error_budget(int K, double b, double delta) {
  if (K < 1 || !(delta > 0 && delta < 1) || !(b > 0 && b <= 1)) {
    throw Error(Errc::BadInputs, "annealing", "need K >= 1, 0 < delta < 1, 0 < b <= 1");
  }
  ErrorBudget out;
  out.eps = delta / (4.0 * K);
  out.l = odd_ceil(kBoostConstant * std::log(1.0 / out.eps) / b);
  const double root_mu = delta / (16.0 * std::sqrt(3.0) * out.l * K);
  out.mu = root_mu * root_mu;
  out.per_step = 4.0 * out.l * std::sqrt(3.0 * out.mu) + out.eps;
  return out;
}

/// Odd polynomial close to 1 on [b, 1] and bounded by 1 on [-1, 1]: the degree-l
/// Chebyshev truncation of erf(k x), k = sqrt(ln(4/eps)) / b, rescaled by its grid maximum.
struct BoostingPolynomial {
  int degree = 1;
  double b = 1.0;
  double eps = 0.1;
  double k = 1.0;
  double scale = 1.0;
  std::vector<double> coeffs;  // Chebyshev coefficients; even entries are zero

  double operator()(double x) const {
    // Clenshaw
    double b1 = 0, b2 = 0;
    for (int j = degree; j >= 1; --j) {
      const double t = 2 * x * b1 - b2 + coeffs[j];
      b2 = b1;
      b1 = t;
    }
    return (x * b1 - b2 + coeffs[0]);
  }

  /// max over a dense grid on [b, 1] of |1 - p(x)|
  double achieved_error(int points = 4001) const {
    double worst = 0;
    for (int i = 0; i < points; ++i) {
      const double x = b + (1 - b) * i / (points - 1);
      worst = std::max(worst, std::abs(1 - (*this)(x)));
    }
    return worst;
  }

  double max_abs(int points = 8001) const {
    double worst = 0;
    for (int i = 0; i < points; ++i) worst = std::max(worst, std::abs((*this)(-1.0 + 2.0 * i / (points - 1))));
    return worst;
  }
};

inline BoostingPolynomial boosting_polynomial(double b, double eps, int degree) {
  if (!(b > 0 && b <= 1) || !(eps > 0 && eps < 1) || degree < 1 || degree % 2 == 0) {
    throw Error(Errc::BadInputs, "annealing", "boosting polynomial needs 0 < b <= 1, 0 < eps < 1, odd degree");
  }
  BoostingPolynomial p;
  p.degree = degree;
  p.b = b;
  p.eps = eps;
  p.k = std::sqrt(std::log(4.0 / eps)) / b;
  const int nodes = std::max(4 * degree + 1, 129);
  p.coeffs.assign(degree + 1, 0.0);
  for (int j = 1; j <= degree; j += 2) {
    double acc = 0;
    for (int i = 0; i < nodes; ++i) {
      const double theta = M_PI * (i + 0.5) / nodes;
      acc += std::erf(p.k * std::cos(theta)) * std::cos(j * theta);
    }
    p.coeffs[j] = 2.0 * acc / nodes;
  }
  // Chebyshev extrema plus a uniform grid catch the maximum of |p| on [-1, 1].
  double peak = 0;
  const int grid = 40 * degree + 2001;
  for (int i = 0; i < grid; ++i) {
    peak = std::max(peak, std::abs(p(std::cos(M_PI * i / (grid - 1)))));
    peak = std::max(peak, std::abs(p(-1.0 + 2.0 * i / (grid - 1))));
  }
  // The margin covers overshoot between grid points.
  p.scale = std::max(1.0, peak * (1.0 + 1e-9));
  for (double& c : p.coeffs) c /= p.scale;
  return p;
}

enum class BackendKind { Oracle, Polynomial };

struct TransitionBackend {
  BackendKind kind = BackendKind::Polynomial;
  int degree = 1;         // l
  double epsilon = 0.1;   // polynomial error budget
  double mu = 0.0;        // projector error budget (reporting only)
  double b = 1.0;         // overlap floor the polynomial is tuned for

  static TransitionBackend oracle() { return {BackendKind::Oracle, 0, 0.0, 0.0, 1.0}; }
  static TransitionBackend polynomial(const ErrorBudget& budget, double b) {
    return {BackendKind::Polynomial, budget.l, budget.eps, budget.mu, b};
  }
};

struct TransitionResult {
  DenseMatrix op;               // O~ with ||O~|| <= 1
  double s1 = 0.0, s2 = 0.0;    // top singular values of Pb Pa
  long long queries = 0;        // applications of Pb Pa or its adjoint
  double svd_deviation = 0.0;   // counted recurrence vs explicit U p(S) V^dag
};

inline TransitionResult transition(const DenseMatrix& pa, const DenseMatrix& pb, const TransitionBackend& backend) {
  if (pa.rows() != pb.rows() || pa.cols() != pb.cols()) {
    throw Error(Errc::DimensionMismatch, "annealing", "projector dimensions differ");
  }
  const DenseMatrix a = pb * pa;
  const auto svd = singular_value_decompose(a);
  TransitionResult out;
  out.s1 = svd.s(0);
  out.s2 = svd.s.size() > 1 ? svd.s(1) : 0.0;
  if (out.s1 < backend.b / 2) {
    throw Error(Errc::OverlapTooSmall, "annealing", "dominant singular value " + std::to_string(out.s1));
  }
  if (out.s2 > out.s1 / 10) {
    throw Error(Errc::RankAmbiguous, "annealing", "second singular value " + std::to_string(out.s2));
  }
  if (backend.kind == BackendKind::Oracle) {
    out.op = a / out.s1;
    return out;
  }
  const auto poly = boosting_polynomial(backend.b, backend.epsilon, backend.degree);

  // Explicit transform.
  RealVector ps(svd.s.size());
  for (Index j = 0; j < ps.size(); ++j) ps(j) = poly(svd.s(j));
  const DenseMatrix explicit_op = svd.u * ps.cast<cplx>().asDiagonal() * svd.v.adjoint();

  // Counted path: sum over odd j of c_j T_j^{SV}(A), one application of A or A^dag per degree.
  const Index d = a.rows();
  DenseMatrix prev = identity(d);
  DenseMatrix cur = a;
  long long queries = 1;
  DenseMatrix acc = poly.coeffs[1] * cur;
  for (int j = 1; j < poly.degree; ++j) {
    const DenseMatrix side = (j % 2 == 1) ? DenseMatrix(a.adjoint()) : a;
    DenseMatrix next = 2.0 * side * cur - prev;
    ++queries;
    prev = std::move(cur);
    cur = std::move(next);
    if ((j + 1) % 2 == 1) acc += poly.coeffs[j + 1] * cur;
  }
  out.queries = queries;
  out.svd_deviation = op_norm(acc - explicit_op);
  out.op = acc;
  const double norm = op_norm(out.op);
  if (norm > 1.0) out.op /= norm;
  return out;
}

/// |<psi_beta | psi_{beta + dbeta}>| for the purified Gibbs states.
inline double overlap(const LocalHamiltonian& h, double beta, double dbeta) {
  if (!(dbeta >= 0) || !(beta >= 0)) throw Error(Errc::BadInputs, "annealing", "beta and dbeta must be >= 0");
  return std::abs(purified_gibbs(h, beta).dot(purified_gibbs(h, beta + dbeta)));
}

struct OverlapFit {
  double slope = 0.0;
  std::vector<double> dbetas;
  std::vector<double> infidelities;  // 1 - overlap^2
};

/// Least-squares slope of log(1 - overlap^2) against log(dbeta).
inline OverlapFit overlap_scaling(const LocalHamiltonian& h, double beta, const std::vector<double>& dbetas) {
  if (dbetas.size() < 2) throw Error(Errc::InsufficientSpread, "annealing", "need at least two step sizes");
  OverlapFit fit;
  fit.dbetas = dbetas;
  const Vector base = purified_gibbs(h, beta);
  std::vector<double> xs, ys;
  for (double db : dbetas) {
    if (!(db > 0)) throw Error(Errc::BadInputs, "annealing", "step sizes must be positive");
    const double o = std::abs(base.dot(purified_gibbs(h, beta + db)));
    const double inf = 1.0 - o * o;
    fit.infidelities.push_back(inf);
    xs.push_back(std::log(db));
    ys.push_back(std::log(inf));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

enum class ProjectorMode { Exact, DlQsvt };

inline ProjectorMode parse_projector_mode(std::string_view s) {
  if (s == "exact") return ProjectorMode::Exact;
  if (s == "dl_qsvt") return ProjectorMode::DlQsvt;
  throw Error(Errc::UnknownKind, "annealing", "unknown projector mode '" + std::string(s) + "'");
}

inline std::string_view projector_mode_name(ProjectorMode m) { return m == ProjectorMode::Exact ? "exact" : "dl_qsvt"; }

struct AnnealOptions {
  BackendKind backend = BackendKind::Polynomial;
  ModelOptions model;
  double db_tol = 1e-8;
};

struct AnnealStep {
  int j = 0;
  double beta = 0.0;
  double overlap = 1.0;               // |<psi_{j-1}|psi_j>|
  double projector_error = 0.0;       // ||P~_j - |psi_j><psi_j|||
  double transition_error = 0.0;      // ||O~_j - |psi_j><psi_{j-1}|||
  double transition_error_bound = 0.0;
  double gap_L = 0.0;                 // gap of the Lindbladian at beta_j
  double parent_gamma = 0.0;          // gap of the normalized parent
  double gamma_star = 0.0;            // certified, dl_qsvt only
  long long projector_queries = 0;
  long long transition_queries = 0;
  long long cumulative_queries = 0;
};

struct AnnealingRun {
  Schedule schedule;
  ProjectorMode mode = ProjectorMode::Exact;
  double delta = 0.0;
  ErrorBudget budget;
  double b = 1.0;                 // min overlap along the path
  int ell = 0;                    // projector degree (dl_qsvt)
  int parent_terms = 0;           // M of the parent
  std::vector<AnnealStep> steps;
  Vector final_state;             // normalized
  double final_fidelity = 1.0;
  double success_probability = 1.0;
  double l2_error = 0.0;          // ||prod O~ psi_0 - psi_beta||
  double max_transition_error = 0.0;
  double min_gap_L = 0.0;
  double min_parent_gamma = 0.0;
  long long projector_queries = 0;
  long long transition_queries = 0;
  long long additive_tally = 0;        // K (l M + l_transition)
  long long multiplicative_tally = 0;  // K l_transition l M
};

inline AnnealingRun run_annealing(const LocalHamiltonian& h, const CouplingSet& couplings, const WeightProfile& w,
                                  const Schedule& sched, double delta, ProjectorMode mode,
                                  const AnnealOptions& opts = {}) {
  if (!(delta > 0 && delta < 1)) throw Error(Errc::BadInputs, "annealing", "delta must lie in (0, 1)");
  AnnealingRun run;
  run.schedule = sched;
  run.mode = mode;
  run.delta = delta;
  const int K = sched.K;
  const Vector psi0 = purified_gibbs(h, 0.0);
  if (sched.degenerate) {
    run.final_state = psi0;
    return run;
  }
  if (mode == ProjectorMode::DlQsvt && !is_commuting(h)) {
    throw Error(Errc::BadInputs, "annealing", "dl_qsvt mode needs a commuting Hamiltonian");
  }

  std::vector<Vector> psi;
  for (double beta : sched.betas) psi.push_back(purified_gibbs(h, beta));
  run.b = 1.0;
  for (int j = 1; j <= K; ++j) run.b = std::min(run.b, std::abs(psi[j - 1].dot(psi[j])));
  run.budget = error_budget(K, run.b, delta);

  run.steps.resize(K + 1);
  std::vector<DenseMatrix> projectors(K + 1);
  std::vector<DlOperator> dls(K + 1);
  projectors[0] = psi0 * psi0.adjoint();  // the infinite-temperature state is prepared directly
  run.min_gap_L = std::numeric_limits<double>::infinity();
  run.min_parent_gamma = std::numeric_limits<double>::infinity();
  double min_gamma_star = 1.0;
  for (int j = 1; j <= K; ++j) {
    auto& step = run.steps[j];
    step.j = j;
    step.beta = sched.betas[j];
    WeightProfile wj = w;
    wj.beta = step.beta;
    const auto terms = build_model(h, couplings, wj, opts.model);
    const KmsForm kms(gibbs_state(assemble(h), step.beta));
    const auto spec = spectral_report(lindblad_superoperator(terms, h.qubits()), kms, {opts.db_tol, 1e-9});
    if (spec.kernel_dim > 1) {
      throw Error(Errc::IrreducibilityWarning, "annealing",
                  "kernel dimension " + std::to_string(spec.kernel_dim) + " at beta " + std::to_string(step.beta));
    }
    step.gap_L = spec.gap;
    run.min_gap_L = std::min(run.min_gap_L, spec.gap);
    const auto parent = build_parent(terms, kms, step.beta, {opts.db_tol});
    const auto local = parent_as_local_hamiltonian(parent);
    run.parent_terms = static_cast<int>(local.hamiltonian.terms().size());
    if (mode == ProjectorMode::Exact) {
      const auto gs = ground_space(local.hamiltonian);
      if (gs.dimension != 1) {
        throw Error(Errc::IrreducibilityWarning, "annealing", "parent ground space is not one-dimensional");
      }
      step.parent_gamma = gs.gap;
      projectors[j] = gs.projector;
    } else {
      dls[j] = dl_operator(local.hamiltonian);
      if (dls[j].rank() != 1) {
        throw Error(Errc::IrreducibilityWarning, "annealing", "parent ground space is not one-dimensional");
      }
      const auto sg = singular_gap(dls[j]);
      step.parent_gamma = sg.gamma;
      step.gamma_star = sg.certified;
      min_gamma_star = std::min(min_gamma_star, sg.certified);
    }
    run.min_parent_gamma = std::min(run.min_parent_gamma, step.parent_gamma);
  }

  if (mode == ProjectorMode::DlQsvt) {
    run.ell = degree_for_error(min_gamma_star, run.budget.mu);
    const auto poly = chebyshev_poly(min_gamma_star, run.ell);
    for (int j = 1; j <= K; ++j) {
      const auto res = approximate_projector(dls[j], poly);
      projectors[j] = res.approx;
      run.steps[j].projector_queries = res.queries;
      run.projector_queries += res.queries;
    }
  }

  const TransitionBackend backend = opts.backend == BackendKind::Oracle
                                        ? TransitionBackend::oracle()
                                        : TransitionBackend::polynomial(run.budget, run.b);
  Vector state = psi0;
  long long cumulative = 0;
  for (int j = 1; j <= K; ++j) {
    auto& step = run.steps[j];
    step.overlap = std::abs(psi[j - 1].dot(psi[j]));
    step.projector_error = op_norm(projectors[j] - psi[j] * psi[j].adjoint());
    const auto tr = transition(projectors[j - 1], projectors[j], backend);
    step.transition_queries = tr.queries;
    run.transition_queries += tr.queries;
    step.transition_error = op_norm(tr.op - psi[j] * psi[j - 1].adjoint());
    step.transition_error_bound = run.budget.per_step;
    run.max_transition_error = std::max(run.max_transition_error, step.transition_error);
    cumulative += step.projector_queries + step.transition_queries;
    step.cumulative_queries = cumulative;
    state = tr.op * state;
  }
  run.steps[0].beta = 0.0;

  run.success_probability = state.squaredNorm();
  run.l2_error = (state - psi[K]).norm();
  run.final_state = state / state.norm();
  run.final_fidelity = std::abs(psi[K].dot(run.final_state));
  const long long M = run.parent_terms;
  const long long ell = mode == ProjectorMode::DlQsvt ? run.ell : 0;
  const long long l = backend.kind == BackendKind::Polynomial ? backend.degree : 0;
  run.additive_tally = K * (ell * M + l);
  run.multiplicative_tally = K * l * ell * M;
  return run;
}

}  // namespace dlgibbs
