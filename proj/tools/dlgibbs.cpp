#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dlgibbs/harness/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dlgibbs::Error(dlgibbs::Errc::BadInputs, "cli-harness", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detectability-lemma Gibbs sampling experiments"};
  app.set_version_flag("--version", std::string(DLGIBBS_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;
  bool strict = false;
  bool print_config = false;

  const std::pair<const char*, const char*> commands[] = {
      {"mix", "Iterate the DL channel and compare trace distance with the mixing bound"},
      {"project", "Sweep the Chebyshev projector degree on a frustration-free Hamiltonian"},
      {"parent", "Build and verify the parent Hamiltonian on the doubled register"},
      {"anneal", "Prepare the purified Gibbs state along a temperature path"},
      {"overlap", "Measure overlaps of purified Gibbs states at nearby temperatures"},
      {"estimate", "Evaluate the closed-form gate and runtime estimates"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed override")->check(CLI::NonNegativeNumber);
    sub->add_flag("--strict", strict, "Stop at the first bound violation");
    sub->add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    auto cfg = dlgibbs::parse_config(read_file(config_path));
    if (!cfg.experiment.empty() && cfg.experiment != experiment) {
      std::fprintf(stderr, "error: config is for '%s', not '%s'\n", cfg.experiment.c_str(), experiment.c_str());
      return 1;
    }
    cfg.experiment = experiment;
    dlgibbs::RunOptions opts;
    opts.out_dir = out_dir;
    opts.strict = strict;
    if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
    if (print_config) {
      std::fputs(dlgibbs::serialize_config(dlgibbs::resolve_config(cfg, opts)).c_str(), stdout);
      return 0;
    }
    const auto outcome = dlgibbs::run_experiment(cfg, opts);
    for (const auto& path : outcome.csv_paths) std::printf("wrote %s\n", path.c_str());
    std::printf("wrote %s\n", outcome.json_path.c_str());
    for (const auto& v : outcome.violations) {
      std::fprintf(stderr, "violation [%s] %s: value %.6g limit %.6g\n", v.point.c_str(), v.check.c_str(), v.value,
                   v.limit);
    }
    std::printf("%s: %s\n", experiment.c_str(), outcome.exit_code == 0 ? "ok" : "bound violations");
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
