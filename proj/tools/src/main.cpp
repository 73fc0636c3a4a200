// qeilab: experiment runner. Exit codes: 0 pass, 1 check failure, 2 usage or
// config error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qeilab/cli/experiment.hpp"
#include "qeilab/cli/runners.hpp"
#include "qeilab/error.hpp"

namespace {

struct Args {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int refine = 1;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "experiment config file")->required();
  sub->add_option("--out", a.out, "output directory (overrides run.output)");
  sub->add_option("--seed", a.seed, "random seed (overrides run.seed)");
  sub->add_option("--refine", a.refine, "multiply Nt, Nx and N_max by this factor")
      ->check(CLI::Range(1, 64));
}

int execute(const std::string& kind, const Args& a) {
  using namespace qeilab::cli;
  ExperimentConfig cfg = load_experiment(a.config);
  if (cfg.kind != kind)
    throw ConfigError(0, "run.kind", "config is for '" + cfg.kind + "', not '" + kind + "'");
  if (a.seed) cfg.seed = *a.seed;
  if (a.out) cfg.output = *a.out;
  cfg = refined(cfg, a.refine);

  RunOptions opt;
  opt.out_dir = cfg.output;
  opt.threads = threads_from_env();
  std::filesystem::create_directories(opt.out_dir);
  const RunResult r = run(cfg, opt);
  write_manifest(cfg, opt, r);
  std::cout << kind << ": " << r.message << "\n";
  for (const auto& [name, ok] : r.verdicts) std::cout << "  " << (ok ? "PASS " : "FAIL ") << name << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qeilab: quantum energy inequality laboratory on the 1+1 cylinder"};
  app.require_subcommand(1);
  Args args;
  std::string chosen;
  for (const char* name : {"qei", "pointwise", "scan", "schur"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    add_common(sub, args);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return execute(chosen, args);
  } catch (const qeilab::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qeilab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
