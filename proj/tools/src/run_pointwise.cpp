#include "qeilab/cli/runners.hpp"
#include "qeilab/grid.hpp"

namespace qeilab::cli {

RunResult run_pointwise(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.field.masses.size() != 1)
    throw ConfigError(0, "field.masses", "the pointwise run takes exactly one mass");
  const double m = cfg.field.masses.front();
  const auto g = grid::make_grid(cfg.grid.L, cfg.grid.T, cfg.grid.Nt, cfg.grid.Nx);
  const auto basis = field::make_basis(m, cfg.grid.L, cfg.field.N_max);
  field::check_resolution(basis, g);
  const auto F = grid::plateau(g, {-cfg.plateau.inner, cfg.plateau.inner, 0, 0, true},
                               {-cfg.plateau.outer, cfg.plateau.outer, 0, 0, true});
  const auto regions = bounds::make_regions(cfg.region.t0, cfg.region.x0, cfg.region.R, g);
  const auto states = state_family(cfg.states, basis, cfg.seed);

  bounds::PointwiseOptions o;
  o.l = cfg.field.order;
  o.rel_tol = cfg.tolerances.margin;
  o.c_override = cfg.overrides.c;
  o.threads = opt.threads;
  const auto rep = bounds::pointwise_verify(states, regions, F, basis, o);

  RunResult res;
  res.report = report_header(cfg);
  const auto& k = rep.constants;
  res.report["constants"] = {{"mass", m},           {"C0", k.C0},     {"C1", k.C1},
                             {"C2", k.C2},          {"C4", k.C4},     {"C4_formula", k.C4_spec},
                             {"c_qei", k.c_qei},    {"C", k.C},       {"c", k.c},
                             {"c_overridden", cfg.overrides.c.has_value()}};
  res.report["region"] = {{"t0", regions.t0}, {"x0", regions.x0}, {"R", regions.R},
                          {"slice_clamped", regions.slice_clamped}};
  res.report["rel_tol"] = rep.rel_tol;

  CsvWriter links({"state", "kind", "parameter", "phi_abs", "rhs", "link_morrey", "link_energy",
                   "link_region", "link_qei", "link_final", "C0_emp", "morrey_ratio", "scale",
                   "pass"});
  json rows = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    links.cell(r.id).cell(r.kind).cell(r.parameter).cell(r.phi_abs).cell(r.rhs)
        .cell(r.link_morrey).cell(r.link_energy).cell(r.link_region).cell(r.link_qei)
        .cell(r.link_final).cell(r.C0_emp).cell(r.morrey_ratio).cell(r.scale).cell(r.pass);
    links.end_row();
    json row = {{"state", r.id},
                {"kind", r.kind},
                {"parameter", r.parameter},
                {"phi_abs", r.phi_abs},
                {"sup_sq", r.sup_sq},
                {"slice_energy", r.slice_energy},
                {"region_energy", r.region_energy},
                {"smeared_energy", r.smeared_energy},
                {"stress", r.stress},
                {"rhs", r.rhs},
                {"C0_emp", r.C0_emp},
                {"morrey_ratio", r.morrey_ratio},
                {"links",
                 {{"morrey", r.link_morrey},
                  {"energy", r.link_energy},
                  {"region", r.link_region},
                  {"qei", r.link_qei},
                  {"final", r.link_final}}},
                {"scale", r.scale},
                {"pass", r.pass}};
    rows.push_back(row);
    if (!r.pass) {
      row["spec"] = state_to_json(states[i].state);
      failures.push_back(row);
    }
  }
  res.report["rows"] = rows;
  res.report["failures"] = failures;
  res.report["pass"] = rep.pass;

  write_text(opt.out_dir + "/pointwise_report.json", res.report.dump(2) + "\n");
  write_text(opt.out_dir + "/pointwise_links.csv", links.str());
  res.files = {"pointwise_report.json", "pointwise_links.csv"};
  res.verdicts.emplace_back("pointwise_links", rep.pass);
  res.exit_code = rep.pass ? 0 : 1;
  res.message = std::to_string(links.rows()) + " rows, " +
                (rep.pass ? "all links hold" : std::to_string(failures.size()) + " failing states");
  for (const auto& f : failures) res.message += "\noffending state: " + f.dump();
  return res;
}

}  // namespace qeilab::cli
