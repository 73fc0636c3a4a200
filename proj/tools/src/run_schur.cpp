#include <complex>
#include <random>

#include "qeilab/cli/runners.hpp"
#include "qeilab/construct.hpp"
#include "qeilab/grid.hpp"
#include "qeilab/kernels.hpp"

namespace qeilab::cli {

namespace {

using cmat = Eigen::MatrixXcd;

// B B^H / n with B complex Gaussian of shape n x rank.
cmat random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  cmat B(n, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      B(i, j) = {re, im};
    }
  return B * B.adjoint() / static_cast<double>(n);
}

}  // namespace

RunResult run_schur(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto& sc = cfg.schur;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> size(sc.min_size, sc.max_size);

  CsvWriter csv({"pair", "size", "rank_a", "rank_b", "min_eig_a", "min_eig_b", "min_eig_product",
                 "norm_product", "tolerance", "inputs_positive", "pass"});
  json pairs = json::array();
  bool battery_pass = true;
  for (int p = 0; p < sc.pairs; ++p) {
    const int n = size(rng);
    std::uniform_int_distribution<int> rank(1, n);
    const int ra = rank(rng);
    const int rb = rank(rng);
    const cmat A = random_psd(n, ra, rng);
    cmat B = random_psd(n, rb, rng);
    // Negative control: the last pair gets a negative definite factor.
    if (sc.inject_non_psd && p == sc.pairs - 1) B = -B - cmat::Identity(n, n);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const auto ka = kernels::with_weights(ones, A);
    const auto kb = kernels::with_weights(ones, B);
    const auto wa = kernels::positivity_check(ka, 1e-10);
    const auto wb = kernels::positivity_check(kb, 1e-10);
    const auto wp = kernels::positivity_check(kernels::schur_product(ka, kb), sc.tolerance);
    const bool inputs = wa.positive && wb.positive;
    const bool ok = inputs && wp.positive;
    battery_pass = battery_pass && ok;
    csv.cell(p).cell(n).cell(ra).cell(rb).cell(wa.min_eigenvalue).cell(wb.min_eigenvalue)
        .cell(wp.min_eigenvalue).cell(wp.norm).cell(wp.tolerance).cell(inputs).cell(ok);
    csv.end_row();
    pairs.push_back({{"pair", p},
                     {"size", n},
                     {"min_eig_product", wp.min_eigenvalue},
                     {"norm_product", wp.norm},
                     {"inputs_positive", inputs},
                     {"pass", ok}});
  }

  // Mollified pairing ladder: localized vacuum against the u kernel, on a
  // short circle so that every rung exceeds both spacings.
  const auto g = grid::make_grid(2.0, 2.0, 32, 16);
  const auto basis = field::make_basis(cfg.field.masses.front(), g.L, 6);
  field::check_resolution(basis, g);
  const auto F = grid::plateau(g, {-0.5, 0.5, 0, 0, true}, {-1.2, 1.2, 0, 0, true});
  const auto atlas = construct::build_atlas_cylinder(g, F.support);
  const auto U = construct::build_u(F, F, atlas, cfg.field.order).dense();
  auto vac = field::two_point(field::Vacuum{}, basis).sampled(g);
  for (Eigen::Index a = 0; a < vac.size(); ++a)
    for (Eigen::Index b = 0; b < vac.size(); ++b) vac.values(a, b) *= F.values[a] * F.values[b];
  const auto lad = kernels::mollified_pairing_limit(vac, U, grid::Mollifier::standard(), sc.ladder,
                                                    sc.tolerance);
  json ladder = {{"lambdas", lad.lambdas},         {"values", lad.values},
                 {"imag_parts", lad.imag_parts},   {"differences", lad.differences},
                 {"ratios", lad.ratios},           {"tolerance", lad.tolerance},
                 {"positive", lad.positive},       {"convergent", lad.convergent}};

  RunResult res;
  res.report = report_header(cfg);
  res.report["pairs"] = pairs;
  res.report["battery_pass"] = battery_pass;
  res.report["ladder"] = ladder;
  res.report["pass"] = battery_pass && lad.positive;
  write_text(opt.out_dir + "/schur_report.json", res.report.dump(2) + "\n");
  write_text(opt.out_dir + "/schur.csv", csv.str());
  res.files = {"schur_report.json", "schur.csv"};
  res.verdicts.emplace_back("schur_battery", battery_pass);
  res.verdicts.emplace_back("ladder_positive", lad.positive);
  res.verdicts.emplace_back("ladder_monotone", lad.convergent);
  const bool pass = battery_pass && lad.positive;
  res.exit_code = pass ? 0 : 1;
  res.message = std::to_string(sc.pairs) + " pairs, " +
                (battery_pass ? "all products positive" : "non-positive product found") +
                "; ladder " + (lad.convergent ? "monotone" : "not monotone");
  return res;
}

}  // namespace qeilab::cli
