#include <algorithm>
#include <cmath>

#include "qeilab/cli/runners.hpp"
#include "qeilab/grid.hpp"

namespace qeilab::cli {

namespace {

struct MassRun {
  double mass = 0;
  bounds::QeiReport report;
  std::vector<bounds::LabeledState> states;
};

MassRun qei_at(const ExperimentConfig& cfg, double m, int threads) {
  const auto g = grid::make_grid(cfg.grid.L, cfg.grid.T, cfg.grid.Nt, cfg.grid.Nx);
  const auto basis = field::make_basis(m, cfg.grid.L, cfg.field.N_max);
  field::check_resolution(basis, g);
  const auto& tf = cfg.test_function;
  const auto f = grid::bump(g, {tf.t0, tf.x0, tf.r_t, tf.r_x, false, true});
  const auto F = grid::plateau(g, {-cfg.plateau.inner, cfg.plateau.inner, 0, 0, true},
                               {-cfg.plateau.outer, cfg.plateau.outer, 0, 0, true});
  MassRun r;
  r.mass = m;
  r.states = state_family(cfg.states, basis, cfg.seed);
  bounds::QeiOptions o;
  o.l = cfg.field.order;
  o.rel_tol = cfg.tolerances.margin;
  o.delta_max = cfg.overrides.delta_max;
  o.threads = threads;
  r.report = bounds::qei_verify(r.states, f, F, basis, o);
  return r;
}

json constants_json(const bounds::QeiReport& r) {
  const auto& k = r.constants;
  return {{"mass", k.mass},           {"Cprime", k.Cprime}, {"C", k.C},
          {"c0", k.c0},               {"c2", k.c2},         {"delta_max", k.delta_max},
          {"c", k.c},                 {"order", r.order},   {"rel_tol", r.rel_tol},
          {"cprime_per_chart", r.cprime.per_chart},
          {"cprime_tail_fraction", r.cprime.tail_fraction},
          {"cprime_divergent", r.cprime.divergent},
          {"delta_nonpositive", r.delta_nonpositive}};
}

// |a - b| relative to the larger magnitude, with the margin tolerance as floor.
double relative_change(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace

RunResult run_qei(const ExperimentConfig& cfg, const RunOptions& opt) {
  RunResult res;
  res.report = report_header(cfg);
  CsvWriter margins({"mass", "state", "kind", "parameter", "lhs", "rhs", "margin1", "margin2",
                     "margin3", "delta", "scale", "pass"});
  CsvWriter plot({"mass", "kind", "parameter", "margin1", "margin2", "margin3"});
  json masses = json::array();
  bool all_pass = true;
  bool all_stable = true;

  for (double m : cfg.field.masses) {
    const MassRun base = qei_at(cfg, m, opt.threads);
    const auto& rep = base.report;
    json jm;
    jm["constants"] = constants_json(rep);
    json rows = json::array();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      margins.cell(m).cell(r.id).cell(r.kind).cell(r.parameter).cell(r.lhs).cell(r.rhs)
          .cell(r.margin1).cell(r.margin2).cell(r.margin3).cell(r.delta).cell(r.scale).cell(r.pass);
      margins.end_row();
      plot.cell(m).cell(r.kind).cell(r.parameter).cell(r.margin1).cell(r.margin2).cell(r.margin3);
      plot.end_row();
      rows.push_back({{"state", r.id},         {"kind", r.kind},       {"parameter", r.parameter},
                      {"spec", state_to_json(base.states[i].state)},
                      {"lhs", r.lhs},          {"omega_u", r.omega_u}, {"omega_w", r.omega_w},
                      {"stress", r.stress},    {"wick", r.wick},       {"rhs", r.rhs},
                      {"margin1", r.margin1},  {"margin2", r.margin2}, {"margin3", r.margin3},
                      {"delta", r.delta},      {"scale", r.scale},     {"pass", r.pass}});
    }
    jm["rows"] = rows;
    jm["pass"] = rep.pass;
    all_pass = all_pass && rep.pass;
    res.verdicts.emplace_back("qei_margins_m" + format_double(m), rep.pass);

    if (cfg.checks.doubling) {
      const MassRun fine = qei_at(refined(cfg, 2), m, opt.threads);
      double worst = 0;
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = fine.report.rows[i];
        const double floor = cfg.tolerances.margin * std::max(a.scale, b.scale);
        worst = std::max({worst, relative_change(a.margin1, b.margin1, floor),
                          relative_change(a.margin2, b.margin2, floor),
                          relative_change(a.margin3, b.margin3, floor)});
      }
      const bool stable = worst <= cfg.tolerances.stability && fine.report.pass;
      jm["doubling"] = {{"constants", constants_json(fine.report)},
                        {"max_relative_change", worst},
                        {"refined_pass", fine.report.pass},
                        {"stable", stable}};
      all_stable = all_stable && stable;
      res.verdicts.emplace_back("qei_doubling_m" + format_double(m), stable);
    }
    masses.push_back(jm);
  }
  res.report["masses"] = masses;
  res.report["pass"] = all_pass && all_stable;

  write_text(opt.out_dir + "/qei_report.json", res.report.dump(2) + "\n");
  write_text(opt.out_dir + "/qei_margins.csv", margins.str());
  write_text(opt.out_dir + "/qei_plot.csv", plot.str());
  res.files = {"qei_report.json", "qei_margins.csv", "qei_plot.csv"};
  res.exit_code = all_pass && all_stable ? 0 : 1;
  res.message = std::to_string(margins.rows()) + " rows, " +
                (all_pass ? "all margins pass" : "margin failure") +
                (cfg.checks.doubling ? (all_stable ? ", stable under doubling" : ", unstable under doubling")
                                     : "");
  return res;
}

}  // namespace qeilab::cli
