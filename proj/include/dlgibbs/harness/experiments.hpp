#pragma once

// Experiment runners behind the CLI. Each grid point (seed x beta) is pure and
// writes its own CSV; one JSON summary collects the points and any bound violations.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dlgibbs/annealing.hpp"
#include "dlgibbs/dl_projector.hpp"
#include "dlgibbs/dl_sampler.hpp"
#include "dlgibbs/harness/config.hpp"
#include "dlgibbs/harness/resource.hpp"
#include "dlgibbs/jump_builder.hpp"
#include "dlgibbs/parent_hamiltonian.hpp"

#ifndef DLGIBBS_VERSION
#define DLGIBBS_VERSION "0.0.0"
#endif

namespace dlgibbs {

inline constexpr int kSummarySchemaVersion = 1;

struct Violation {
  std::string point;
  std::string check;
  double value = 0.0;
  double limit = 0.0;
};

struct GridPoint {
  std::uint64_t seed = 0;
  double beta = 0.0;
  std::string label;  // empty when the grid has a single point
};

struct PointResult {
  GridPoint point;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  void le(const std::string& check, double value, double limit) {
    if (!(value <= limit)) violations.push_back({point.label, check + " <= limit", value, limit});
  }
  void ge(const std::string& check, double value, double limit) {
    if (!(value >= limit)) violations.push_back({point.label, check + " >= limit", value, limit});
  }
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides model.seed and model.seeds
  bool strict = false;
};

struct ExperimentOutcome {
  int exit_code = 0;
  std::vector<Violation> violations;
  std::vector<std::string> csv_paths;
  std::string json_path;
  nlohmann::ordered_json summary;
};

namespace detail {

inline std::string num(double v) { return format_real(v); }
inline std::string num(long long v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }

inline LocalHamiltonian model_of(const ExperimentConfig& cfg, std::uint64_t seed) {
  return make_instance(cfg.str("model.kind"), {{"n", static_cast<double>(cfg.integer("model.n"))}}, seed);
}

inline WeightProfile weights_of(const ExperimentConfig& cfg, double beta) {
  WeightProfile w;
  w.kind = parse_weight_kind(cfg.str("weights.kind", "davies_kms"));
  w.beta = beta;
  w.q_profile = parse_q_profile(cfg.str("weights.q_profile", "one"));
  w.q_width = cfg.real("weights.q_width", w.q_width);
  const auto table = cfg.list("weights.q_table");
  if (table.size() % 2 != 0) throw Error(Errc::BadParams, "cli-harness", "weights.q_table needs (w, q) pairs");
  for (std::size_t i = 0; i + 1 < table.size(); i += 2) w.q_table.emplace_back(table[i], table[i + 1]);
  w.weight_exponent = cfg.real("weights.weight_exponent", w.weight_exponent);
  w.tanh_scale = cfg.real("weights.tanh_scale", w.tanh_scale);
  w.tanh_times_beta = cfg.boolean("weights.tanh_times_beta", w.tanh_times_beta);
  w.kappa_cutoff = cfg.real("weights.kappa_cutoff", w.kappa_cutoff);
  w.validate();
  return w;
}

inline CouplingSet couplings_of(const ExperimentConfig& cfg, int n) {
  return pauli_couplings(n, cfg.str("model.couplings", "xz"));
}

inline ModelOptions model_options_of(const ExperimentConfig& cfg) {
  ModelOptions o;
  o.normalize = cfg.boolean("model.normalize", true);
  return o;
}

inline std::vector<LindbladTerm> terms_of(const ExperimentConfig& cfg, const LocalHamiltonian& h, double beta) {
  return build_model(h, couplings_of(cfg, h.qubits()), weights_of(cfg, beta), model_options_of(cfg));
}

inline std::string sites_text(const Sites& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out;
}

inline void mix_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const double beta = res.point.beta;
  const auto terms = terms_of(cfg, h, beta);
  const KmsForm kms(gibbs_state(assemble(h), beta));
  const std::string order_kind = cfg.str("run.order", "index");
  if (order_kind != "index" && order_kind != "seeded") {
    throw Error(Errc::BadParams, "cli-harness", "run.order must be index or seeded");
  }
  const OrderSpec order = order_kind == "seeded" ? OrderSpec::seeded(res.point.seed) : OrderSpec::index();
  const auto ch = compose_dl_channel(terms, kms, order);
  const auto l = lindblad_superoperator(terms, h.qubits());
  const auto spec = spectral_report(l, kms);
  const double stationarity = stationarity_defect(l, kms);
  const auto hl = superop_hamiltonian(ch);
  const int k_max = static_cast<int>(cfg.integer("run.k_max"));
  const long long M = static_cast<long long>(ch.size());

  std::vector<DenseMatrix> initial{DenseMatrix::Zero(kms.dimension(), kms.dimension())};
  initial[0](0, 0) = 1.0;
  std::mt19937_64 rng(res.point.seed);
  for (long long i = 0; i < cfg.integer("run.random_states", 0); ++i) {
    initial.push_back(random_density_matrix(kms.dimension(), rng));
  }

  res.columns = {"state", "k", "trace_distance", "bound", "channel_applications"};
  double worst = -1e300;
  long long applications = 0;
  for (std::size_t s = 0; s < initial.size(); ++s) {
    const auto trace = iterate(ch, initial[s], kms, k_max);
    for (const auto& r : trace.records) {
      res.rows.push_back({num(s), num(r.k), num(r.trace_distance), num(r.bound), num(r.channel_applications)});
      res.le("trace_distance(state " + num(s) + ", k " + num(r.k) + ") - bound", r.trace_distance - r.bound, 1e-8);
      if (r.channel_applications != static_cast<long long>(r.k) * M) {
        res.violations.push_back({res.point.label, "channel_applications == k*M",
                                  static_cast<double>(r.channel_applications), static_cast<double>(r.k * M)});
      }
    }
    worst = std::max(worst, trace.worst_margin());
    applications += trace.total_applications;
  }

  res.le("db_residual", spec.db_residual, 1e-8);
  res.le("stationarity_defect", stationarity, 1e-9);
  res.ge("gamma(H_L) - gap(L)", hl.gamma - ch.gap_L, -1e-8);
  if (ch.kernel_dim_L != 1) res.warnings.push_back("generator kernel dimension " + num(ch.kernel_dim_L));

  auto& j = res.summary;
  j["beta"] = beta;
  j["seed"] = res.point.seed;
  j["M"] = M;
  j["g"] = ch.bound_degree();
  j["noncommuting_degree"] = ch.noncommuting_degree;
  j["overlap_degree"] = ch.overlap_degree;
  j["gap"] = ch.gap_L;
  j["gamma_HL"] = hl.gamma;
  j["kernel_dim"] = ch.kernel_dim_L;
  j["sigma_min"] = kms.sigma_min();
  j["db_residual"] = spec.db_residual;
  j["stationarity_defect"] = stationarity;
  j["contraction_factor"] = ch.contraction_factor();
  j["initial_states"] = initial.size();
  j["worst_margin"] = worst;
  j["channel_applications"] = applications;

  const long long trials = cfg.integer("run.contraction_trials", 0);
  if (trials > 0) {
    const auto rep = contraction_check(ch, kms, static_cast<int>(trials), res.point.seed);
    res.le("contraction_ratio", rep.max_ratio, 1 + 1e-8);
    res.le("contraction_trace_residual", rep.max_trace_residual, 1e-10);
    j["contraction_trials"] = rep.trials;
    j["contraction_max_ratio"] = rep.max_ratio;
    j["contraction_trace_residual"] = rep.max_trace_residual;
  }
}

inline void project_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const auto dl = dl_operator(h);
  const auto sg = singular_gap(dl);
  const int lo = static_cast<int>(cfg.integer("run.ell_min", 1));
  const int hi = static_cast<int>(cfg.integer("run.ell_max"));
  if (lo < 1 || hi < lo) throw Error(Errc::BadParams, "cli-harness", "need 1 <= run.ell_min <= run.ell_max");

  res.columns = {"ell", "error", "bound", "queries", "expected_queries"};
  double ground = 0.0;
  int ancilla = 0;
  for (int ell = lo; ell <= hi; ++ell) {
    const auto r = approximate_projector(dl, chebyshev_poly(sg.certified, ell));
    res.rows.push_back({num(ell), num(r.error), num(r.bound), num(r.queries), num(r.expected_queries)});
    res.le("error(ell " + num(ell) + ") - bound", r.error - r.bound, 1e-9);
    if (r.queries != r.expected_queries) {
      res.violations.push_back({res.point.label, "queries == ell*M", static_cast<double>(r.queries),
                                static_cast<double>(r.expected_queries)});
    }
    ground = std::max(ground, r.ground_residual);
    ancilla = r.ancilla_estimate;
  }
  res.le("top_singular_defect", sg.top_defect, 1e-10);
  res.le("s_next - s_bound", sg.s_next - sg.s_bound, 1e-9);
  res.le("ground_residual", ground, 1e-9);

  auto& j = res.summary;
  j["seed"] = res.point.seed;
  j["M"] = dl.size();
  j["rank"] = sg.r;
  j["gamma"] = sg.gamma;
  j["g"] = sg.g;
  j["gamma_star"] = sg.certified;
  j["gamma_star_empirical"] = sg.empirical;
  j["s_next"] = sg.s_next;
  j["s_bound"] = sg.s_bound;
  j["top_defect"] = sg.top_defect;
  j["ground_residual"] = ground;
  j["ancilla"] = ancilla;
}

inline void parent_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const double beta = res.point.beta;
  const int n = h.qubits();
  const auto terms = terms_of(cfg, h, beta);
  const KmsForm kms(gibbs_state(assemble(h), beta));
  const auto ph = build_parent(terms, kms, beta);
  const auto rep = verify_parent(ph, h);

  const auto cf = coherent_form(lindblad_superoperator(terms, n), kms);
  const RealVector a = hermitian_eigendecompose(ph.full, 1e-8).eigenvalues;
  const RealVector b = hermitian_eigendecompose(0.5 * (cf.h.mat + cf.h.mat.adjoint()), 1e-8).eigenvalues;
  const double spectrum_diff = (a - b).cwiseAbs().maxCoeff();
  const DenseMatrix purified = ph.ground * ph.ground.adjoint();
  const int d = static_cast<int>(kms.dimension());
  const double ptrace = op_norm(partial_trace(purified, {0}, {d, d}) - kms.sigma());

  res.columns = {"term", "support", "frustration", "hermiticity", "locality_residual"};
  for (std::size_t t = 0; t < ph.terms.size(); ++t) {
    const auto& term = ph.terms[t];
    const std::string locality =
        rep.locality_checked ? num(restrict_to(term.op, term.support, 2 * n).residual) : std::string("na");
    res.rows.push_back({num(t), sites_text(term.support), num(rep.frustration[t]),
                        num(hermiticity_defect(term.op)), locality});
  }
  res.le("max_frustration", rep.max_frustration, 1e-9);
  res.le("spectrum_difference", spectrum_diff, 1e-9);
  res.le("partial_trace_residual", ptrace, 1e-10);
  res.le("max_hermiticity", rep.max_hermiticity, 1e-9);
  if (rep.locality_checked) res.le("max_locality", rep.max_locality, 1e-9);
  for (const auto& w : rep.warnings) res.warnings.push_back(w);

  auto& j = res.summary;
  j["beta"] = beta;
  j["seed"] = res.point.seed;
  j["terms"] = ph.terms.size();
  j["max_frustration"] = rep.max_frustration;
  j["full_frustration"] = rep.full_frustration;
  j["spectrum_difference"] = spectrum_diff;
  j["cross_check_residual"] = ph.cross_check_residual;
  j["partial_trace_residual"] = ptrace;
  j["max_hermiticity"] = rep.max_hermiticity;
  j["locality_checked"] = rep.locality_checked;
  j["max_locality"] = rep.max_locality;
  j["parent_degree"] = rep.parent_degree;
  j["top_eigenvalue"] = rep.top_eigenvalue;
}

inline void anneal_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const double beta = res.point.beta;
  const double delta = cfg.real("run.delta");
  const double norm_h = op_norm(assemble(h));
  const auto sched = make_schedule(beta, norm_h, cfg.real("run.alpha", 2.0));
  const auto mode = parse_projector_mode(cfg.str("run.projector_mode", "exact"));
  const std::string backend = cfg.str("run.backend", "polynomial");
  if (backend != "polynomial" && backend != "oracle") {
    throw Error(Errc::BadParams, "cli-harness", "run.backend must be polynomial or oracle");
  }
  AnnealOptions opts;
  opts.backend = backend == "oracle" ? BackendKind::Oracle : BackendKind::Polynomial;
  opts.model = model_options_of(cfg);
  const auto run = run_annealing(h, couplings_of(cfg, h.qubits()), weights_of(cfg, beta), sched, delta, mode, opts);

  res.columns = {"j",        "beta_j", "overlap", "transition_error", "transition_error_bound", "projector_error",
                 "projector_queries", "transition_queries", "cumulative_queries"};
  if (!sched.degenerate) {
    for (int jj = 1; jj <= sched.K; ++jj) {
      const auto& s = run.steps[jj];
      res.rows.push_back({num(s.j), num(s.beta), num(s.overlap), num(s.transition_error),
                          num(s.transition_error_bound), num(s.projector_error), num(s.projector_queries),
                          num(s.transition_queries), num(s.cumulative_queries)});
      res.le("transition_error(j " + num(jj) + ") - bound", s.transition_error - s.transition_error_bound, 1e-12);
      if (mode == ProjectorMode::DlQsvt) res.le("projector_error(j " + num(jj) + ") - mu", s.projector_error - run.budget.mu, 1e-12);
    }
  }
  const double fidelity_floor = mode == ProjectorMode::Exact ? 1 - delta : 1 - delta - delta * delta;
  res.ge("final_fidelity", run.final_fidelity, fidelity_floor);
  res.ge("success_probability", run.success_probability, std::pow(1 - delta / 2, 2) - 1e-9);
  res.le("l2_error", run.l2_error, delta / 2 + 1e-9);
  if (run.projector_queries + run.transition_queries != run.additive_tally) {
    res.violations.push_back({res.point.label, "counted queries == K*(ell*M + l)",
                              static_cast<double>(run.projector_queries + run.transition_queries),
                              static_cast<double>(run.additive_tally)});
  }

  auto& j = res.summary;
  j["beta"] = beta;
  j["seed"] = res.point.seed;
  j["delta"] = delta;
  j["mode"] = std::string(projector_mode_name(mode));
  j["backend"] = backend;
  j["norm_h"] = norm_h;
  j["K"] = sched.K;
  j["alpha"] = sched.alpha;
  j["b"] = run.b;
  j["eps"] = run.budget.eps;
  j["mu"] = run.budget.mu;
  j["l"] = run.budget.l;
  j["ell"] = run.ell;
  j["parent_terms"] = run.parent_terms;
  j["final_fidelity"] = run.final_fidelity;
  j["success_probability"] = run.success_probability;
  j["l2_error"] = run.l2_error;
  j["max_transition_error"] = run.max_transition_error;
  j["min_gap_L"] = sched.degenerate ? 0.0 : run.min_gap_L;
  j["min_parent_gamma"] = sched.degenerate ? 0.0 : run.min_parent_gamma;
  j["projector_queries"] = run.projector_queries;
  j["transition_queries"] = run.transition_queries;
  j["additive_tally"] = run.additive_tally;
  j["multiplicative_tally"] = run.multiplicative_tally;
}

inline void overlap_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const double beta = res.point.beta;
  const auto dbetas = cfg.list("run.dbetas");
  res.columns = {"dbeta", "overlap", "infidelity"};
  for (double db : dbetas) {
    const double o = overlap(h, beta, db);
    res.rows.push_back({num(db), num(o), num(1 - o * o)});
  }
  auto& j = res.summary;
  j["beta"] = beta;
  j["seed"] = res.point.seed;
  j["norm_h"] = op_norm(assemble(h));
  if (dbetas.size() >= 2) {
    const auto fit = overlap_scaling(h, beta, dbetas);
    res.le("|slope - 2|", std::abs(fit.slope - 2.0), 0.2);
    j["slope"] = fit.slope;
  }
}

inline void estimate_point(const ExperimentConfig& cfg, PointResult& res) {
  const auto h = model_of(cfg, res.point.seed);
  const double beta = res.point.beta;
  const auto terms = terms_of(cfg, h, beta);
  const KmsForm kms(gibbs_state(assemble(h), beta));
  const auto ch = compose_dl_channel(terms, kms);

  ResourceInputs in;
  in.M = static_cast<long long>(ch.size());
  in.g = ch.noncommuting_degree;
  in.gap = ch.gap_L;
  in.sigma_min = kms.sigma_min();
  in.eps = cfg.real("run.eps");
  in.beta = beta;
  in.norm_h = op_norm(assemble(h));
  in.delta = cfg.real("run.delta", in.eps);
  in.alpha = cfg.real("run.alpha", 2.0);
  in.sk_exponent = cfg.real("run.sk_exponent", in.sk_exponent);
  in.gate_constant = cfg.real("run.gate_constant", in.gate_constant);
  in.runtime_constant = cfg.real("run.runtime_constant", in.runtime_constant);
  const auto sched = make_schedule(beta, in.norm_h, in.alpha);
  in.anneal_gap = 1e300;
  for (std::size_t jj = sched.degenerate ? 0 : 1; jj < sched.betas.size(); ++jj) {
    const double bj = sched.betas[jj];
    const KmsForm kj(gibbs_state(assemble(h), bj));
    in.anneal_gap = std::min(in.anneal_gap, spectral_report(lindblad_superoperator(terms_of(cfg, h, bj), h.qubits()), kj).gap);
  }
  const auto est = resource_estimate(in);

  // Actual channel applications until the trace distance first drops below eps.
  const int k_cap = static_cast<int>(cfg.integer("run.k_max", std::max<long long>(est.k_required, 1)));
  DenseMatrix rho0 = DenseMatrix::Zero(kms.dimension(), kms.dimension());
  rho0(0, 0) = 1.0;
  const auto trace = iterate(ch, rho0, kms, k_cap);
  long long k_hit = -1, applications = -1;
  for (const auto& r : trace.records) {
    if (r.trace_distance <= in.eps) {
      k_hit = r.k;
      applications = r.channel_applications;
      break;
    }
  }
  if (k_hit >= 0 && applications != k_hit * in.M) {
    res.violations.push_back({res.point.label, "channel_applications == k*M", static_cast<double>(applications),
                              static_cast<double>(k_hit * in.M)});
  }

  res.columns = {"quantity", "value"};
  auto& j = res.summary;
  const auto put = [&](const std::string& key, auto v) {
    j[key] = v;
    res.rows.push_back({key, num(v)});
  };
  put("M", in.M);
  put("g", in.g);
  put("g_eff", est.g_eff);
  put("gap", in.gap);
  put("sigma_min", in.sigma_min);
  put("eps", in.eps);
  put("beta", in.beta);
  put("norm_h", in.norm_h);
  put("delta", in.delta);
  put("anneal_gap", in.anneal_gap);
  put("sk_exponent", in.sk_exponent);
  put("gate_constant", in.gate_constant);
  put("runtime_constant", in.runtime_constant);
  put("k_required", est.k_required);
  put("cyclic_leading", est.cyclic_leading);
  put("cyclic_sk_factor", est.cyclic_sk_factor);
  put("cyclic_gates", est.cyclic_gates);
  put("K", est.K);
  put("anneal_leading", est.anneal_leading);
  put("anneal_log_sq", est.anneal_log_sq);
  put("anneal_sk_factor", est.anneal_sk_factor);
  put("anneal_gates", est.anneal_gates);
  put("ancilla", est.ancilla);
  put("k_observed", k_hit);
  put("channel_applications_observed", applications);
}

inline void run_point(const ExperimentConfig& cfg, PointResult& res) {
  const std::string& e = cfg.experiment;
  if (e == "mix") mix_point(cfg, res);
  else if (e == "project") project_point(cfg, res);
  else if (e == "parent") parent_point(cfg, res);
  else if (e == "anneal") anneal_point(cfg, res);
  else if (e == "overlap") overlap_point(cfg, res);
  else estimate_point(cfg, res);
}

inline std::vector<GridPoint> grid_of(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  if (cfg.has("model.seeds")) {
    for (double s : cfg.list("model.seeds")) seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    seeds.push_back(static_cast<std::uint64_t>(cfg.integer("model.seed", 0)));
  }
  std::vector<double> betas = cfg.has("run.betas") ? cfg.list("run.betas") : std::vector<double>{cfg.real("run.beta")};
  if (seeds.empty() || betas.empty()) throw Error(Errc::BadParams, "cli-harness", "empty grid");
  std::vector<GridPoint> out;
  for (auto s : seeds) {
    for (double b : betas) {
      GridPoint p{s, b, {}};
      if (seeds.size() * betas.size() > 1) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "seed%llu_beta%g", static_cast<unsigned long long>(s), b);
        p.label = buf;
      }
      out.push_back(p);
    }
  }
  return out;
}

inline std::string render_csv(const ExperimentConfig& cfg, const std::string& hash, const PointResult& res) {
  std::string out = "# dlgibbs " DLGIBBS_VERSION " experiment=" + cfg.experiment + " config=" + hash;
  if (!res.point.label.empty()) out += " point=" + res.point.label;
  out += "\n";
  for (std::size_t i = 0; i < res.columns.size(); ++i) out += (i ? "," : "") + res.columns[i];
  out += "\n";
  for (const auto& row : res.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

inline std::string with_label(const std::string& file, const std::string& label) {
  if (label.empty()) return file;
  const auto dot = file.rfind('.');
  if (dot == std::string::npos) return file + "_" + label;
  return file.substr(0, dot) + "_" + label + file.substr(dot);
}

}  // namespace detail

/// Writes through a temporary file so readers never observe a partial artifact.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::BadInputs, "cli-harness", "cannot write " + tmp.string());
    f << content;
    if (!f) throw Error(Errc::BadInputs, "cli-harness", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Applies the CLI seed override to a copy of the configuration.
inline ExperimentConfig resolve_config(ExperimentConfig cfg, const RunOptions& opts) {
  if (opts.seed) {
    cfg.erase("model.seeds");
    cfg.set("model.seed", static_cast<long long>(*opts.seed));
  }
  validate_config(cfg);
  return cfg;
}

inline ExperimentOutcome run_experiment(const ExperimentConfig& input, const RunOptions& opts = {}) {
  const ExperimentConfig cfg = resolve_config(input, opts);
  const std::string hash = config_hash(cfg);
  const auto grid = detail::grid_of(cfg);
  const std::filesystem::path out_dir(opts.out_dir);
  const std::string csv_name = cfg.str("output.csv", cfg.experiment + ".csv");
  const std::string json_name = cfg.str("output.json", cfg.experiment + ".json");

  std::vector<PointResult> results;
  const auto compute = [&](const GridPoint& p) {
    PointResult r;
    r.point = p;
    detail::run_point(cfg, r);
    return r;
  };
  if (opts.strict) {
    for (const auto& p : grid) {
      results.push_back(compute(p));
      if (!results.back().violations.empty()) break;
    }
  } else {
    const long long requested = cfg.integer("run.workers", 0);
    const std::size_t workers =
        requested > 0 ? static_cast<std::size_t>(requested) : std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < grid.size(); start += workers) {
      std::vector<std::future<PointResult>> batch;
      for (std::size_t i = start; i < std::min(grid.size(), start + workers); ++i) {
        batch.push_back(std::async(std::launch::async, compute, grid[i]));
      }
      for (auto& f : batch) results.push_back(f.get());
    }
  }

  ExperimentOutcome outcome;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    const std::string file = detail::with_label(csv_name, r.point.label);
    write_atomic(out_dir / file, detail::render_csv(cfg, hash, r));
    outcome.csv_paths.push_back((out_dir / file).string());
    nlohmann::ordered_json p;
    p["label"] = r.point.label;
    p["csv"] = file;
    p["summary"] = r.summary;
    p["warnings"] = r.warnings;
    points.push_back(std::move(p));
    outcome.violations.insert(outcome.violations.end(), r.violations.begin(), r.violations.end());
  }
  nlohmann::ordered_json violations = nlohmann::ordered_json::array();
  for (const auto& v : outcome.violations) {
    violations.push_back({{"point", v.point}, {"check", v.check}, {"value", v.value}, {"limit", v.limit}});
  }
  auto& s = outcome.summary;
  s["schema_version"] = kSummarySchemaVersion;
  s["version"] = DLGIBBS_VERSION;
  s["experiment"] = cfg.experiment;
  s["config_hash"] = hash;
  s["status"] = outcome.violations.empty() ? "ok" : "violations";
  s["strict_aborted"] = opts.strict && results.size() < grid.size();
  s["points"] = std::move(points);
  s["violations"] = std::move(violations);
  outcome.json_path = (out_dir / json_name).string();
  write_atomic(out_dir / json_name, s.dump(2) + "\n");
  outcome.exit_code = outcome.violations.empty() ? 0 : 2;
  return outcome;
}

}  // namespace dlgibbs
