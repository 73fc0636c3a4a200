#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qeilab/bounds.hpp"
#include "qeilab/error.hpp"

using namespace qeilab;
using namespace qeilab::bounds;
using oracle::cd;

namespace {

struct Lab {
  grid::SpacetimeGrid g;
  field::ModeBasis b;
  grid::TestFunction f;
  grid::TestFunction F;
};

Lab small_lab(double m = 1.0) {
  const auto g = grid::make_grid(2 * oracle::pi, 2, 192, 64);
  return {g, field::make_basis(m, g.L, 16), grid::bump(g, {0.0, 1.0, 1.0, 1.0, false, true}),
          grid::plateau(g, {-1.05, 1.05, 0, 0, true}, {-1.5, 1.5, 0, 0, true})};
}

std::vector<LabeledState> family() {
  return {{"vacuum", field::Vacuum{}, 0},
          {"thermal", field::Thermal{2.0}, 2.0},
          {"hot", field::Thermal{3.5}, 3.5},
          {"coherent", field::Coherent{{{1, {3.0, -1.0}}, {-4, {0.5, 2.0}}}}, 1},
          {"zero_mode", field::Coherent{{{0, {5.0, 0.0}}}}, 5},
          {"one", field::Particles{{{2, 1}}}, 1},
          {"two", field::Particles{{{-3, 1}, {5, 1}}}, 2}};
}

field::ClassicalSolution random_solution(const field::ModeBasis& b, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mode(-b.N_max, b.N_max);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::vector<field::ModeAmplitude> a;
  for (int q = 0; q < 3; ++q) a.push_back({mode(rng), cd(amp(rng), amp(rng))});
  return field::make_solution(b, a);
}

}  // namespace

TEST_CASE("smeared QEI rows: margins, constants and scaling") {
  const auto lab = small_lab();
  const auto states = family();
  QeiOptions opt;
  opt.l = 1;
  const auto rep = qei_verify(states, lab.f, lab.F, lab.b, opt);
  CHECK(rep.pass);
  CHECK_FALSE(rep.cprime.divergent);
  CHECK(rep.delta_nonpositive);
  const auto& K = rep.constants;
  CHECK(K.C == doctest::Approx(K.Cprime));
  CHECK(K.c == doctest::Approx(K.c0 + K.c2 + K.delta_max).epsilon(1e-14));
  REQUIRE(rep.rows.size() == states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& r = rep.rows[i];
    CHECK(r.lhs == doctest::Approx(field::smeared_field_square(states[i].state, lab.b, lab.f))
                       .epsilon(1e-12));
    CHECK(r.margin3 == doctest::Approx(r.rhs - r.lhs));
    CHECK(r.margin1 >= 0);
    CHECK(r.margin2 >= 0);
    CHECK(r.delta <= 1e-9 * r.scale);
  }
  CHECK(rep.rows[0].stress == 0.0);
  CHECK(rep.rows[0].delta == doctest::Approx(0.0).epsilon(1e-12));

  // margin1 is quadratic in f
  auto f3 = lab.f;
  f3.values *= 3.0;
  const auto rep3 = qei_verify(states, f3, lab.F, lab.b, opt);
  for (std::size_t i = 0; i < states.size(); ++i)
    CHECK(rep3.rows[i].margin1 == doctest::Approx(9 * rep.rows[i].margin1).epsilon(1e-10));

  // a negative allowance pushes c below zero and breaks margin3
  QeiOptions bad = opt;
  bad.delta_max = -1e3;
  CHECK_FALSE(qei_verify(states, lab.f, lab.F, lab.b, bad).pass);

  // F must be one on the support of f
  const auto wide = grid::bump(lab.g, {0.0, 1.0, 1.4, 1.0, false, true});
  CHECK_THROWS_AS(qei_verify(states, wide, lab.F, lab.b, opt), Error);
  QeiOptions zero = opt;
  zero.rel_tol = 0;
  CHECK_THROWS_AS(qei_verify(states, lab.f, lab.F, lab.b, zero), Error);
}

TEST_CASE("classical energy inequality for coherent states") {
  const auto lab = small_lab(0.7);
  std::vector<LabeledState> coh;
  std::mt19937_64 rng(5);
  for (int r = 0; r < 6; ++r)
    coh.push_back({"c" + std::to_string(r), field::Coherent{random_solution(lab.b, rng).amplitudes}, 0});
  const auto rep = classical_qei(coh, lab.b, lab.F, 0.0);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) {
    CHECK(std::abs(row.difference) <= 1e-10 * row.scale);
    CHECK(row.classical_energy >= 0);
  }
  CHECK_THROWS_AS(classical_qei({{"v", field::Vacuum{}, 0}}, lab.b, lab.F, 0.0), Error);
}

TEST_CASE("slice energy against Richardson-Simpson quadrature") {
  const auto b = field::make_basis(1.2, 2 * oracle::pi, 8);
  std::mt19937_64 rng(9);
  for (int r = 0; r < 4; ++r) {
    const auto phi = random_solution(b, rng);
    const double t = 0.3 * r;
    const auto T00 = [&](double x) { return field::classical_stress(phi, t, x).T00; };
    CHECK(slice_energy(phi, t, 1.0, 0.7, false) ==
          doctest::Approx(oracle::integrate(T00, 0.3, 1.7)).epsilon(1e-10));
    CHECK(slice_energy(phi, t, 0.0, 0.0, true) == doctest::Approx(phi.energy()).epsilon(1e-10));
  }
}

TEST_CASE("regions: masks, clamping and validation") {
  const auto g = grid::make_grid(2 * oracle::pi, 2, 64, 64);
  const auto r = make_regions(0.1, 1.0, 0.5, g);
  CHECK_FALSE(r.slice_clamped);
  CHECK_FALSE(r.W.full_circle);
  CHECK(r.slice_half(0.25) == 1.0);
  CHECK(r.slice_length(0.25) == 2.0);
  int w = 0;
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) {
      const auto a = static_cast<std::size_t>(g.index(i, j));
      const double tau = g.t(i) - 0.1;
      const double d = std::abs(grid::periodic_offset(g.x(j), 1.0, g.L));
      CHECK(static_cast<bool>(r.mask_W[a]) == (std::abs(tau) < 0.5 && d < 1.5));
      CHECK_FALSE((r.mask_Vplus[a] && r.mask_Vminus[a]));
      if (r.mask_Vplus[a]) CHECK(tau > 0);
      if (r.mask_Vminus[a]) CHECK(tau < 0);
      w += r.mask_W[a];
    }
  CHECK(w > 0);

  const auto big = make_regions(0.0, 0.0, 1.5, g);
  CHECK(big.W.full_circle);
  CHECK_FALSE(big.slice_clamped);
  CHECK(big.slice_full(1.0));
  CHECK(big.slice_length(1.0) == doctest::Approx(g.L));
  CHECK_THROWS_AS(make_regions(0.0, 0.0, 2.5, g), Error);
  CHECK_THROWS_AS(make_regions(0.0, 0.0, 0.0, g), Error);
}

TEST_CASE("energy estimate: finite propagation keeps C0 at one") {
  const auto g = grid::make_grid(2 * oracle::pi, 2, 64, 64);
  const auto b = field::make_basis(1.0, g.L, 10);
  const auto r = make_regions(0.0, 2.0, 0.5, g);
  std::mt19937_64 rng(14);
  for (int q = 0; q < 5; ++q) {
    const auto est = energy_estimate_check(random_solution(b, rng), r);
    CHECK(est.bounded);
    CHECK(est.C0_emp <= 1 + 1e-6);
    CHECK(est.taus.size() == 24);
    CHECK_FALSE(est.degenerate);
  }
  const auto zero = energy_estimate_check(field::make_solution(b, {}), r);
  CHECK(zero.degenerate);
  CHECK(zero.bounded);
}

TEST_CASE("Morrey constant equals the extremal ratio") {
  // interval of length l: u = cosh(x - l) saturates u(0)^2 <= coth(l) int (u'^2 + u^2)
  for (double l : {0.3, 1.0, 2.5}) {
    const double num = std::pow(std::cosh(l), 2);
    const double den = oracle::integrate(
        [&](double x) { return std::pow(std::sinh(x - l), 2) + std::pow(std::cosh(x - l), 2); }, 0, l);
    CHECK(morrey_constant(1.0, l, false, 100.0) == doctest::Approx(2 * num / den).epsilon(1e-10));
  }
  // circle: the periodic Green's function cosh(x - L/2)
  const double L = 2 * oracle::pi;
  const double num = std::pow(std::cosh(L / 2), 2);
  const double den = oracle::integrate(
      [&](double x) { return std::pow(std::sinh(x - L / 2), 2) + std::pow(std::cosh(x - L / 2), 2); },
      0, L);
  CHECK(morrey_constant(1.0, L, true, L) == doctest::Approx(2 * num / den).epsilon(1e-10));
  // light fields pay 1/m^2
  CHECK(morrey_constant(0.5, 1.0, false, L) == doctest::Approx(4 * morrey_constant(1.0, 1.0, false, L)));
  CHECK(morrey_constant(2.0, 1.0, false, L) == morrey_constant(1.0, 1.0, false, L));

  const auto g = grid::make_grid(L, 2, 64, 64);
  const auto b = field::make_basis(1.0, L, 10);
  const auto r = make_regions(0.0, 1.0, 0.5, g);
  std::mt19937_64 rng(2);
  for (int q = 0; q < 5; ++q) {
    const auto mor = morrey_bound(random_solution(b, rng), r);
    CHECK(mor.pass);
    CHECK(mor.C4 == doctest::Approx(2 / std::tanh(1.0)));
    CHECK(mor.C4_spec == 2.0);
  }
  const auto zm = morrey_bound(field::zero_mode_solution(b, 2.0), r);
  // constant profile: sup = A^2, energy = m^2 A^2 R
  CHECK(zm.ratio == doctest::Approx(1.0 / 0.5).epsilon(1e-10));
}

TEST_CASE("pointwise chain passes and a zero constant is caught") {
  const auto lab = small_lab();
  const auto regions = make_regions(0.0, 0.0, 0.5, lab.g);
  const auto states = family();
  PointwiseOptions opt;
  opt.l = 1;
  const auto rep = pointwise_verify(states, regions, lab.F, lab.b, opt);
  CHECK(rep.pass);
  const auto& K = rep.constants;
  CHECK(K.C2 == 1.0);
  CHECK(K.C4 == doctest::Approx(2 / std::tanh(1.0)));
  CHECK(K.C == doctest::Approx(K.C4));
  CHECK(K.c == doctest::Approx(K.c_qei + 1 / K.C));
  for (const auto& row : rep.rows) {
    CHECK(row.link_final >= 0);
    CHECK(row.C0_emp <= 1 + 1e-6);
  }
  CHECK(rep.rows[4].phi_abs == doctest::Approx(10.0 / std::sqrt(2 * lab.b.m * lab.b.L)).epsilon(1e-12));

  PointwiseOptions forced = opt;
  forced.c_override = 0.0;
  const auto weak = pointwise_verify({{"tiny", field::Coherent{{{0, {0.01, 0.0}}}}, 0.01}}, regions,
                                     lab.F, lab.b, forced);
  CHECK_FALSE(weak.pass);
  CHECK(weak.rows[0].link_final < 0);

  const auto off = make_regions(1.3, 0.0, 0.5, lab.g);
  CHECK_THROWS_AS(pointwise_verify(states, off, lab.F, lab.b, opt), Error);
}
