#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "qeilab/bounds.hpp"
#include "qeilab/construct.hpp"
#include "qeilab/error.hpp"

using namespace qeilab;
using namespace qeilab::construct;
using oracle::cd;

namespace {

struct Setup {
  grid::SpacetimeGrid g;
  grid::TestFunction F;
  ChartAtlas atlas;
};

Setup small_setup(int Nt = 48, int Nx = 16, double T = 2.0) {
  const auto g = grid::make_grid(2 * oracle::pi, T, Nt, Nx);
  auto F = grid::plateau(g, {-0.6, 0.6, 0, 0, true}, {-1.2, 1.2, 0, 0, true});
  auto atlas = build_atlas_cylinder(g, F.support);
  return {g, std::move(F), std::move(atlas)};
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("v_hat worked values and mirror identity") {
  CHECK(v_hat(1, 0.0) == 0.5);
  CHECK(v_hat(3, 0.0) == 0.5);
  CHECK(v_hat(1, 1.0) == 0.25);
  CHECK(v_hat(2, 1.0) == 0.125);
  CHECK(v_hat(1, -1.0) == 0.75);
  CHECK(v_hat(1, 3.0) == doctest::Approx(0.05).epsilon(1e-15));
  for (int l = 1; l <= 4; ++l)
    for (double k : {0.1, 0.7, 2.0, 13.0, 250.0}) {
      CHECK(v_hat(l, k) + v_hat(l, -k) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(v_hat(l, k) > 0);
      CHECK(v_hat(l, -k) <= 1);
    }
}

TEST_CASE("build_v: real part is half a delta, v(-x) = conj v(x), direct-sum oracle") {
  const Grid1D g{512, 0.05};
  for (int l = 1; l <= 3; ++l) {
    const auto v = build_v(l, g);
    const double nyq = v_hat(l, g.k(g.N / 2));
    for (int i = 0; i < g.N; ++i) {
      const double expect = (i == 0 ? 0.5 / g.h : 0.0) + (nyq - 0.5) * (i % 2 ? -1 : 1) / (g.N * g.h);
      CHECK(std::abs(v.values[i].real() - expect) <= 1e-10 / g.h);
      const int mirror = (g.N - i) % g.N;
      CHECK(std::abs(v.values[mirror] - std::conj(v.values[i])) <= 1e-12 / g.h);
    }
    for (int i : {1, 7, 100, 300}) {
      cd s = 0;
      for (int m = 0; m < g.N; ++m) s += v_hat(l, g.k(m)) * std::polar(1.0, g.k(m) * g.x(i));
      s /= g.N * g.h;
      CHECK(std::abs(v.values[i] - s) <= 1e-10 * std::abs(s) + 1e-12);
    }
  }
  CHECK_THROWS_AS(build_v(0, g), Error);
  CHECK_THROWS_AS(build_v(1, Grid1D{512, 1.0}), Error);
}

TEST_CASE("cylinder atlas is a partition of unity on the covered window") {
  const auto s = small_setup(96, 32);
  REQUIRE(s.atlas.size() == 2);
  CHECK(s.atlas.partition_defect() <= 1e-12);
  for (const auto& c : s.atlas.charts) {
    CHECK(c.chi.minCoeff() >= 0.0);
    CHECK(c.chi.maxCoeff() <= 1.0 + 1e-15);
    for (int i = 0; i < s.g.Nt; ++i)
      for (int j = 0; j < s.g.Nx; ++j) {
        const double d = std::abs(grid::periodic_offset(s.g.x(j), c.x_center, s.g.L));
        if (d >= c.arc_half) CHECK(c.chi[s.g.index(i, j)] == 0.0);
      }
  }
  CHECK_THROWS_AS(build_atlas_cylinder(s.g, {-1.95, 1.0, 0, 0, true}), Error);
}

TEST_CASE("U: symmetrization, Hermiticity, positivity, operator equals dense") {
  const auto s = small_setup();
  std::mt19937_64 rng(17);
  const auto f = oracle::random_bump(s.g, rng, 1.4);
  const auto U = build_u(f, s.F, s.atlas, 3);
  const auto D = U.dense();
  // U + U^T = F (x) F delta
  Eigen::MatrixXcd sym = D.values + D.values.transpose();
  for (int a = 0; a < s.g.sites(); ++a) {
    const double Fa = s.F.values[a].real();
    sym(a, a) -= Fa * Fa / s.g.w_site();
  }
  CHECK(max_abs(sym) <= 1e-8 * max_abs(D.values));
  CHECK(max_abs(D.values - D.values.adjoint()) <= 1e-12 * max_abs(D.values));
  CHECK(kernels::positivity_check(D).positive);

  for (int r = 0; r < 5; ++r) {
    const auto a = oracle::random_complex_function(s.g, rng, 0.9);
    const auto b = oracle::random_complex_function(s.g, rng, 0.9);
    const cd want = kernels::pair(D, a, b);
    CHECK(std::abs(U.pair(a, b) - want) <= 1e-10 * std::abs(want));
    CHECK(U.quad_form(a) >= 0);
    CHECK(U.quad_form(a) == doctest::Approx(kernels::pair(D, a, a).real()).epsilon(1e-10));
  }
  // f outside the positivity set of F
  const auto far = grid::bump(s.g, {1.3, 0.0, 0.5, 1.0, false, true});
  CHECK_THROWS_AS(build_u(far, s.F, s.atlas, 3), Error);
}

TEST_CASE("W: positive, operator equals dense, derivative stencils") {
  const auto s = small_setup();
  const auto W = build_w(s.F, s.atlas, 2);
  const auto D = W.dense();
  CHECK(kernels::positivity_check(D).positive);
  std::mt19937_64 rng(23);
  for (int r = 0; r < 5; ++r) {
    const auto a = oracle::random_complex_function(s.g, rng, 0.9);
    const auto b = oracle::random_complex_function(s.g, rng, 0.9);
    const cd want = kernels::pair(D, a, b);
    CHECK(std::abs(W.pair(a, b) - want) <= 1e-9 * std::abs(want));
    CHECK(W.quad_form(a) >= 0);
  }

  // 8th-order time derivative and spectral space derivative on a smooth profile
  const auto g = grid::make_grid(2 * oracle::pi, 2, 256, 32);
  cvec h(g.sites()), dt(g.sites()), dx(g.sites());
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) {
      const double t = g.t(i), x = g.x(j);
      h[g.index(i, j)] = std::sin(1.3 * t) * std::cos(3 * x);
      dt[g.index(i, j)] = 1.3 * std::cos(1.3 * t) * std::cos(3 * x);
      dx[g.index(i, j)] = -3 * std::sin(1.3 * t) * std::sin(3 * x);
    }
  const cvec ht = time_derivative(g, h);
  for (int i = 4; i < g.Nt - 4; ++i)
    CHECK(std::abs(ht[g.index(i, 5)] - dt[g.index(i, 5)]) <= 1e-9);
  for (int i : {0, 3, g.Nt - 1}) CHECK(ht[g.index(i, 5)] == cd(0.0));
  CHECK((space_derivative(g, h) - dx).cwiseAbs().maxCoeff() <= 1e-11);

  // the cutoff must vanish on the edge rows
  const auto wide = grid::plateau(s.g, {-1.0, 1.0, 0, 0, true}, {-1.9, 1.9, 0, 0, true});
  CHECK_THROWS_AS(build_w(wide, s.atlas, 2), Error);
}

TEST_CASE("C' certifies C' U >= f (x) conj f on random configurations") {
  std::mt19937_64 rng(31);
  for (int r = 0; r < 5; ++r) {
    const auto s = small_setup(48, 16);
    const auto f = oracle::random_bump(s.g, rng, 1.4);
    const int l = 1 + r % 3;
    const auto cp = bound_constant_Cprime(f, s.F, s.atlas, l);
    CHECK(cp.value > 0);
    const auto U = build_u(f, s.F, s.atlas, l).dense();
    const auto diff = kernels::add(kernels::scale(U, cp.value), kernels::rank_one(f), -1.0);
    CHECK(kernels::positivity_check(diff, 1e-9).positive);
    // a smaller constant fails the same test
    const auto tight = kernels::add(kernels::scale(U, 1e-2 * cp.value),
                                    kernels::rank_one(f), -1.0);
    CHECK_FALSE(kernels::positivity_check(tight, 1e-9).positive);
  }
}

TEST_CASE("C' scaling, zero input and grid doubling") {
  const auto s = small_setup(192, 64);
  const auto f = grid::bump(s.g, {0.0, 1.0, 1.0, 1.0, false, true});
  const auto c1 = bound_constant_Cprime(f, s.F, s.atlas, 1);
  auto f2 = f;
  f2.values *= 2.0;
  CHECK(bound_constant_Cprime(f2, s.F, s.atlas, 1).value ==
        doctest::Approx(4 * c1.value).epsilon(1e-12));
  CHECK(bound_constant_Cprime(grid::zero_function(s.g), s.F, s.atlas, 1).value == 0.0);
  CHECK_FALSE(c1.divergent);

  const auto d = small_setup(384, 128);
  const auto fd = grid::bump(d.g, {0.0, 1.0, 1.0, 1.0, false, true});
  const auto cd1 = bound_constant_Cprime(fd, d.F, d.atlas, 1);
  CHECK(cd1.value == doctest::Approx(c1.value).epsilon(1e-4));

  // an unresolved weight is flagged
  const auto coarse = small_setup(96, 32);
  const auto fc = grid::bump(coarse.g, {0.0, 1.0, 1.0, 1.0, false, true});
  CHECK(bound_constant_Cprime(fc, coarse.F, coarse.atlas, 3).divergent);
}

TEST_CASE("assemble_constants") {
  const auto b = assemble_constants(8.0, 0.5, 2.0, 2.0, 0.25);
  CHECK(b.C == 2.0);
  CHECK(b.c == 4.0 * 0.5 + 2.0 + 0.25);
  CHECK(b.mass == 2.0);
  CHECK_THROWS_AS(assemble_constants(1, 1, 1, 0.0), Error);
  CHECK_THROWS_AS(assemble_constants(std::numeric_limits<double>::infinity(), 1, 1, 1), Error);
}

TEST_CASE("reference kernels: mirrored mode pairings match direct evaluation") {
  const auto s = small_setup(64, 32);
  const auto basis = field::make_basis(1.0, s.g.L, 6);
  const auto ref = bounds::reference_kernels(s.F, basis, 2);
  for (int n = -basis.N_max; n <= basis.N_max; ++n)
    for (int sign : {1, -1}) {
      const cvec psi = basis.mode(s.g, n, sign).conjugate();
      const std::size_t slot = static_cast<std::size_t>((n + basis.N_max) * 2 + (sign < 0 ? 1 : 0));
      CHECK(ref.P[slot] == doctest::Approx(ref.U.quad_form(psi)).epsilon(1e-10));
      CHECK(ref.Q[slot] == doctest::Approx(ref.W.quad_form(psi)).epsilon(1e-10));
    }
  double c0 = 0;
  for (int n = -basis.N_max; n <= basis.N_max; ++n)
    c0 += ref.U.quad_form(basis.mode(s.g, n, 1).conjugate()) / (2 * basis.omega(n) * basis.L);
  CHECK(ref.c0 == doctest::Approx(c0).epsilon(1e-10));
}
