// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dlgibbs/annealing.hpp"
#include "dlgibbs/dl_projector.hpp"
#include "dlgibbs/dl_sampler.hpp"
#include "dlgibbs/harness/experiments.hpp"
#include "dlgibbs/parent_hamiltonian.hpp"

using namespace dlgibbs;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit;  // seconds, <= 0 for none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Model {
  std::string name;
  LocalHamiltonian h;
};

LocalHamiltonian single_z() {
  DenseMatrix z = DenseMatrix::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  return LocalHamiltonian(1, {make_term(z, {0})});
}

LocalHamiltonian instance(const std::string& kind, int n, std::uint64_t seed = 0) {
  return make_instance(kind, {{"n", double(n)}}, seed);
}

std::vector<LindbladTerm> davies_terms(const LocalHamiltonian& h, double beta) {
  return build_model(h, pauli_couplings(h.qubits(), "xz"), WeightProfile::davies(beta));
}

KmsForm kms_at(const LocalHamiltonian& h, double beta) { return KmsForm(gibbs_state(assemble(h), beta)); }

std::vector<Model> projector_instances() {
  std::vector<Model> out;
  for (std::uint64_t seed : {1, 2, 3}) out.push_back({"commuting_projectors n=4 seed=" + std::to_string(seed), instance("commuting_projectors", 4, seed)});
  for (int n : {4, 5, 6})
    for (std::uint64_t seed : {1, 2, 3})
      out.push_back({"random_ff_projectors n=" + std::to_string(n) + " seed=" + std::to_string(seed),
                     instance("random_ff_projectors", n, seed)});
  return out;
}

Outcome ac01() {
  const std::vector<Model> models = {{"Z", single_z()},
                                     {"zz_chain n=2", instance("zz_chain", 2)},
                                     {"zz_chain n=3", instance("zz_chain", 3)},
                                     {"field_chain n=3", instance("field_chain", 3)}};
  double worst_db = 0, worst_stat = 0;
  for (const auto& m : models) {
    for (double beta : {0.0, 0.5, 1.0}) {
      const auto kms = kms_at(m.h, beta);
      const auto l = lindblad_superoperator(davies_terms(m.h, beta), m.h.qubits());
      worst_db = std::max(worst_db, db_residual(l, kms));
      worst_stat = std::max(worst_stat, stationarity_defect(l, kms));
    }
  }
  return {worst_db <= 1e-8 && worst_stat <= 1e-9,
          "max db_residual " + fmt("%.2e", worst_db) + ", max ||L^dag(sigma)||_1 " + fmt("%.2e", worst_stat)};
}

Outcome ac02() {
  const auto h = instance("zz_chain", 3);
  const auto kms = kms_at(h, 0.5);
  const auto ch = compose_dl_channel(davies_terms(h, 0.5), kms);
  std::vector<DenseMatrix> starts{DenseMatrix::Zero(8, 8)};
  starts[0](0, 0) = 1;
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 5; ++i) starts.push_back(random_density_matrix(8, rng));
  double worst = -1e300;
  for (const auto& rho : starts) worst = std::max(worst, iterate(ch, rho, kms, 200).worst_margin());
  return {worst <= 1e-8, "6 initial states, k <= 200, max(d_k - bound_k) " + fmt("%.3e", worst) + ", g " +
                             std::to_string(ch.bound_degree()) + ", gap " + fmt("%.4f", ch.gap_L)};
}

Outcome ac03() {
  const auto h = instance("zz_chain", 3);
  const auto kms = kms_at(h, 0.5);
  const auto ch = compose_dl_channel(davies_terms(h, 0.5), kms);
  const auto rep = contraction_check(ch, kms, 100, 7);
  return {rep.max_ratio <= 1 + 1e-8 && rep.max_trace_residual <= 1e-10 && rep.vacuous == 0,
          "max ratio " + fmt("%.4f", rep.max_ratio) + ", max |Tr[sigma Phi(X)]| " +
              fmt("%.2e", rep.max_trace_residual)};
}

Outcome ac04() {
  std::vector<Model> zoo = {{"Z", single_z()}};
  for (const char* kind : {"zz_chain", "field_chain", "random_ff_projectors", "commuting_projectors"})
    for (int n : {2, 3}) zoo.push_back({std::string(kind) + " n=" + std::to_string(n), instance(kind, n, 1)});
  double worst = 1e300;
  std::string where;
  for (const auto& m : zoo) {
    for (double beta : {0.5, 1.0}) {
      const auto ch = compose_dl_channel(davies_terms(m.h, beta), kms_at(m.h, beta));
      const auto rep = superop_hamiltonian(ch);
      if (rep.gamma - ch.gap_L < worst) {
        worst = rep.gamma - ch.gap_L;
        where = m.name + " beta=" + fmt("%g", beta);
      }
    }
  }
  return {worst >= -1e-8, std::to_string(zoo.size() * 2) + " models, min(gamma - gap(L)) " + fmt("%.3e", worst) +
                              " at " + where};
}

Outcome ac05() {
  double top = 0, margin = -1e300;
  for (const auto& m : projector_instances()) {
    const auto sg = singular_gap(dl_operator(m.h));
    top = std::max(top, sg.top_defect);
    margin = std::max(margin, sg.s_next - sg.s_bound);
  }
  return {top <= 1e-10 && margin <= 1e-9,
          "12 instances, max |s_j - 1| " + fmt("%.2e", top) + ", max(s_{r+1} - bound) " + fmt("%.3e", margin)};
}

Outcome ac06() {
  double worst = 0;
  for (const auto& m : projector_instances()) {
    const auto dl = dl_operator(m.h);
    const int r = dl.rank();
    const DenseMatrix uv = dl.svd.u.leftCols(r) * dl.svd.v.leftCols(r).adjoint();
    worst = std::max(worst, op_norm(uv - dl.ground.projector));
  }
  return {worst <= 1e-9, "max ||U_1 V_1^dag - P_H|| " + fmt("%.2e", worst)};
}

Outcome ac07() {
  double worst = -1e300;
  long long mismatched = 0;
  for (const auto& m : projector_instances()) {
    const auto dl = dl_operator(m.h);
    const auto sg = singular_gap(dl);
    for (int ell = 1; ell <= 40; ++ell) {
      const auto res = approximate_projector(dl, chebyshev_poly(sg.certified, ell));
      worst = std::max(worst, op_norm(res.approx - dl.ground.projector) - res.bound);
      if (res.queries != res.expected_queries) ++mismatched;
    }
  }
  return {worst <= 1e-9 && mismatched == 0,
          "480 (instance, l) pairs, max(error - 2e^{-l sqrt(gamma*)}) " + fmt("%.3e", worst)};
}

Outcome ac08() {
  std::vector<PlantedInstance> insts;
  std::uint64_t seed = 11;
  for (double gs : {0.5, 0.25, 0.1, 0.05}) insts.push_back(planted_instance(16, 2, gs, seed++));
  const auto fit = speedup_slope(insts, 1e-6);
  std::string degrees;
  for (int d : fit.degrees) degrees += (degrees.empty() ? "" : ",") + std::to_string(d);
  return {fit.slope >= 0.4 && fit.slope <= 0.6,
          "slope " + fmt("%.4f", fit.slope) + " for gamma* {0.5,0.25,0.1,0.05}, l_min {" + degrees + "}"};
}

Outcome ac09() {
  const std::vector<Model> models = {{"zz_chain n=2", instance("zz_chain", 2)},
                                     {"zz_chain n=3", instance("zz_chain", 3)},
                                     {"field_chain n=3", instance("field_chain", 3)},
                                     {"random_ff_projectors n=3", instance("random_ff_projectors", 3, 1)}};
  double frus = 0, spec = 0, ptr = 0, loc = 0;
  for (const auto& m : models) {
    for (double beta : {0.5, 1.0}) {
      const auto terms = davies_terms(m.h, beta);
      const auto kms = kms_at(m.h, beta);
      const auto ph = build_parent(terms, kms, beta);
      const auto rep = verify_parent(ph, m.h);
      frus = std::max(frus, rep.max_frustration);
      if (rep.locality_checked) loc = std::max(loc, rep.max_locality);
      const auto cf = coherent_form(lindblad_superoperator(terms, m.h.qubits()), kms);
      const RealVector a = hermitian_eigendecompose(ph.full, 1e-8).eigenvalues;
      const RealVector b = hermitian_eigendecompose(0.5 * (cf.h.mat + cf.h.mat.adjoint()), 1e-8).eigenvalues;
      spec = std::max(spec, (a - b).cwiseAbs().maxCoeff());
      const int d = static_cast<int>(kms.dimension());
      const DenseMatrix rho = ph.ground * ph.ground.adjoint();
      ptr = std::max(ptr, op_norm(partial_trace(rho, {0}, {d, d}) - kms.sigma()));
    }
  }
  return {frus <= 1e-9 && spec <= 1e-9 && ptr <= 1e-10 && loc <= 1e-9,
          "frustration " + fmt("%.2e", frus) + ", spectrum " + fmt("%.2e", spec) + ", partial trace " +
              fmt("%.2e", ptr) + ", locality " + fmt("%.2e", loc)};
}

Outcome ac10() {
  const auto fit = overlap_scaling(instance("zz_chain", 3), 0.5, {0.2, 0.1, 0.05, 0.025});
  return {std::abs(fit.slope - 2.0) <= 0.2, "slope " + fmt("%.4f", fit.slope)};
}

struct AnnealPair {
  AnnealingRun exact, dl;
};

const AnnealPair& anneal_runs() {
  static const AnnealPair runs = [] {
    const auto h = instance("zz_chain", 2);
    const auto sched = make_schedule(1.0, op_norm(assemble(h)), 2.0);
    const auto c = pauli_couplings(2, "xz");
    return AnnealPair{run_annealing(h, c, WeightProfile::davies(1.0), sched, 0.05, ProjectorMode::Exact),
                      run_annealing(h, c, WeightProfile::davies(1.0), sched, 0.05, ProjectorMode::DlQsvt)};
  }();
  return runs;
}

Outcome ac11() {
  const auto& r = anneal_runs();
  const bool ok = r.exact.final_fidelity >= 0.95 && r.exact.success_probability >= 0.95 &&
                  r.dl.final_fidelity >= 1 - 0.05 - 0.01;
  return {ok, "exact: fidelity " + fmt("%.6f", r.exact.final_fidelity) + ", p " +
                  fmt("%.6f", r.exact.success_probability) + "; dl_qsvt: fidelity " +
                  fmt("%.6f", r.dl.final_fidelity) + ", p " + fmt("%.6f", r.dl.success_probability) + ", K " +
                  std::to_string(r.dl.schedule.K)};
}

Outcome ac12() {
  // Mixing: k * M channel applications.
  const auto h = instance("zz_chain", 3);
  const auto kms = kms_at(h, 0.5);
  const auto ch = compose_dl_channel(davies_terms(h, 0.5), kms);
  DenseMatrix rho = DenseMatrix::Zero(8, 8);
  rho(0, 0) = 1;
  const auto trace = iterate(ch, rho, kms, 50);
  bool ok = trace.total_applications == 50LL * static_cast<long long>(ch.size());
  for (const auto& rec : trace.records) ok = ok && rec.channel_applications == rec.k * static_cast<long long>(ch.size());

  // Projector synthesis: l * M factor applications.
  const auto dl = dl_operator(instance("random_ff_projectors", 4, 7));
  const auto sg = singular_gap(dl);
  for (int ell = 1; ell <= 40; ++ell) {
    const auto res = approximate_projector(dl, chebyshev_poly(sg.certified, ell));
    ok = ok && res.queries == static_cast<long long>(ell) * static_cast<long long>(dl.size());
  }

  // Annealing: K (l M + l_transition).
  const auto& a = anneal_runs().dl;
  const long long K = a.schedule.K, M = a.parent_terms;
  ok = ok && a.projector_queries == K * a.ell * M && a.transition_queries == K * a.budget.l &&
       a.projector_queries + a.transition_queries == a.additive_tally &&
       a.additive_tally == K * (a.ell * M + a.budget.l);
  return {ok, "mix " + std::to_string(trace.total_applications) + " = 50*" + std::to_string(ch.size()) +
                  "; projector l*M for l<=40; anneal " + std::to_string(a.additive_tally) + " = " +
                  std::to_string(K) + "*(" + std::to_string(a.ell) + "*" + std::to_string(M) + " + " +
                  std::to_string(a.budget.l) + ") [multiplicative form " + std::to_string(a.multiplicative_tally) +
                  "]"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac13() {
  namespace fs = std::filesystem;
  const fs::path configs(DLGIBBS_CONFIG_DIR);
  const fs::path base = fs::temp_directory_path() / "dlgibbs_acceptance";
  fs::remove_all(base);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  int compared = 0;
  std::string mismatch;
  for (const auto& f : files) {
    const auto cfg = parse_config(slurp(f));
    std::vector<std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      RunOptions opts;
      opts.out_dir = (base / f.stem() / std::to_string(rep)).string();
      const auto out = run_experiment(cfg, opts);
      for (std::size_t i = 0; i < out.csv_paths.size(); ++i) {
        const std::string text = slurp(out.csv_paths[i]);
        if (rep == 0) {
          first.push_back(text);
        } else {
          ++compared;
          if (i >= first.size() || first[i] != text) mismatch += " " + out.csv_paths[i];
        }
      }
    }
  }
  fs::remove_all(base);
  return {mismatch.empty() && compared > 0,
          std::to_string(files.size()) + " configs, " + std::to_string(compared) + " CSV pairs byte-identical" +
              (mismatch.empty() ? "" : "; differing:" + mismatch)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC01", "detailed balance and stationarity", 10, ac01},
      {"AC02", "mixing bound", 30, ac02},
      {"AC03", "contraction", 30, ac03},
      {"AC04", "gap ordering gamma >= gap(L)", 0, ac04},
      {"AC05", "DL singular structure", 0, ac05},
      {"AC06", "U_1 V_1^dag = P_H", 0, ac06},
      {"AC07", "approximate projector error bound", 60, ac07},
      {"AC08", "quadratic gap dependence", 0, ac08},
      {"AC09", "parent Hamiltonian", 0, ac09},
      {"AC10", "overlap scaling", 0, ac10},
      {"AC11", "end-to-end annealing", 120, ac11},
      {"AC12", "query accounting", 0, ac12},
      {"AC13", "determinism", 0, ac13},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      out.pass = false;
      out.detail += "; runtime over " + fmt("%g", c.time_limit) + " s";
    }
    if (!out.pass) ++failed;
    std::printf("%s %s  %s (%.2f s): %s\n", c.id, out.pass ? "PASS" : "FAIL", c.title, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
