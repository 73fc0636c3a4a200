#pragma once

// Experiment drivers. Each writes its report files into `out_dir` and
// returns exit status 0 (all checks pass) or 1 (a check failed). Config
// problems surface as ConfigError or qeilab::Error and map to exit 2.

#include <string>
#include <utility>
#include <vector>

#include "qeilab/cli/experiment.hpp"
#include "qeilab/cli/report.hpp"

namespace qeilab::cli {

struct RunOptions {
  std::string out_dir = "out";
  int threads = 1;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;                      // emitted payloads, relative to out_dir
  std::vector<std::pair<std::string, bool>> verdicts;  // named checks
  json report;                                         // the main JSON payload
  std::string message;                                 // human-readable summary
};

RunResult run_qei(const ExperimentConfig& cfg, const RunOptions& opt);
RunResult run_pointwise(const ExperimentConfig& cfg, const RunOptions& opt);
RunResult run_scan(const ExperimentConfig& cfg, const RunOptions& opt);
RunResult run_schur(const ExperimentConfig& cfg, const RunOptions& opt);

// Dispatch on cfg.kind.
RunResult run(const ExperimentConfig& cfg, const RunOptions& opt);

// manifest.json: config hash, artifact version, verdicts, files and the
// serialized config. Like every payload it depends on (config, seed) only.
void write_manifest(const ExperimentConfig& cfg, const RunOptions& opt, const RunResult& r);

// QEILAB_THREADS, clamped to [1, 256]; 1 when unset or malformed.
int threads_from_env();

}  // namespace qeilab::cli
