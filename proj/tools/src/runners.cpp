#include "qeilab/cli/runners.hpp"

#include <algorithm>
#include <cstdlib>

namespace qeilab::cli {

RunResult run(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.kind == "qei") return run_qei(cfg, opt);
  if (cfg.kind == "pointwise") return run_pointwise(cfg, opt);
  if (cfg.kind == "scan") return run_scan(cfg, opt);
  if (cfg.kind == "schur") return run_schur(cfg, opt);
  throw ConfigError(0, "run.kind", "unknown kind '" + cfg.kind + "'");
}

void write_manifest(const ExperimentConfig& cfg, const RunOptions& opt, const RunResult& r) {
  json m = report_header(cfg);
  m["artifact_version"] = kArtifactVersion;
  m["exit_code"] = r.exit_code;
  json verdicts = json::object();
  for (const auto& [name, ok] : r.verdicts) verdicts[name] = ok;
  m["verdicts"] = verdicts;
  m["files"] = r.files;
  m["config"] = serialize(canonical(cfg));
  write_text(opt.out_dir + "/manifest.json", m.dump(2) + "\n");
}

int threads_from_env() {
  const char* s = std::getenv("QEILAB_THREADS");
  if (!s) return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

}  // namespace qeilab::cli
