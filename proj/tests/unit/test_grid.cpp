#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qeilab/error.hpp"
#include "qeilab/grid.hpp"

using namespace qeilab;
using namespace qeilab::grid;

TEST_CASE("make_grid spacings and validation") {
  const auto g = make_grid(2 * oracle::pi, 4, 64, 64);
  CHECK(g.dt == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.dx == doctest::Approx(2 * oracle::pi / 64).epsilon(1e-15));
  CHECK(g.t(0) == doctest::Approx(-4 + 0.0625));
  CHECK(make_grid(1, 1, 8, 8).w_site() == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(2 * oracle::pi, 4, 7, 64), Error);
  CHECK_THROWS_AS(make_grid(2 * oracle::pi, 4, 6, 64), Error);
  CHECK_THROWS_AS(make_grid(-1, 4, 8, 8), Error);
  CHECK_THROWS_AS(make_grid(1, 0, 8, 8), Error);
}

TEST_CASE("bump closed form, support and quadrature") {
  const auto g = make_grid(2 * oracle::pi, 2, 256, 64);
  const auto f = bump(g, {0.0, 0.0, 1.0, 1.0, true, true});
  // spatially constant: every column equals the time profile
  for (int i = 0; i < g.Nt; ++i) {
    const double rho = std::abs(g.t(i));
    const double expect = rho < 1 ? std::exp(1.0 - 1.0 / (1 - rho * rho)) : 0.0;
    for (int j = 0; j < g.Nx; j += 13) CHECK(f.values[g.index(i, j)].real() == expect);
  }
  // peak at the centre
  const auto p = make_grid(2 * oracle::pi, 2, 64, 64);
  const auto c = bump(p, {p.t(32), p.x(10), 0.8, 0.8, false, true});
  CHECK(c.values[p.index(32, 10)].real() == 1.0);
  CHECK(c.values[p.index(32, 10)].imag() == 0.0);

  // quadrature against a Richardson-refined Simpson oracle
  const double time_integral = oracle::integrate(
      [](double t) { return std::abs(t) < 1 ? std::exp(1.0 - 1.0 / (1 - t * t)) : 0.0; }, -1, 1);
  CHECK(f.quadrature_real() == doctest::Approx(2 * oracle::pi * time_integral).epsilon(1e-6));

  CHECK_THROWS_AS(bump(g, {1.5, 0.0, 1.0, 1.0, true, true}), Error);
}

TEST_CASE("plateau is 1 inside, 0 outside and monotone") {
  const auto g = make_grid(2 * oracle::pi, 2, 128, 32);
  const Box inner{-0.5, 0.5, 0, 0, true};
  const Box outer{-1.5, 1.5, 0, 0, true};
  const auto F = plateau(g, inner, outer);
  for (int i = 0; i < g.Nt; ++i) {
    const double v = F.values[g.index(i, 3)].real();
    if (std::abs(g.t(i)) <= 0.5) CHECK(v == 1.0);
    if (std::abs(g.t(i)) >= 1.5) CHECK(v == 0.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // single sign of differences on the falling edge
  for (int i = g.Nt / 2; i + 1 < g.Nt; ++i)
    CHECK(F.values[g.index(i + 1, 0)].real() <= F.values[g.index(i, 0)].real());
  CHECK_THROWS_AS(plateau(g, outer, inner), Error);

  // F f = f for a bump inside the plateau
  const auto f = bump(g, {0.1, 1.0, 0.35, 0.9, false, true});
  const auto Ff = multiply(F, f);
  CHECK((Ff.values - f.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fourier transform conventions") {
  const auto g = make_grid(2 * oracle::pi, 2, 64, 32);
  const auto zero = fourier(zero_function(g));
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  // spatially constant bump: only the n = 0 spatial bin survives
  const auto s = bump(g, {0.0, 0.0, 1.0, 1.0, true, true});
  const auto S = fourier(s);
  double tsum = 0;
  for (int i = 0; i < g.Nt; ++i) tsum += s.values[g.index(i, 0)].real() * g.dt;
  CHECK(std::abs(S.values(0, 0) - std::complex<double>(g.L * tsum)) < 1e-12);
  for (int m = 0; m < g.Nt; ++m)
    for (int n = 1; n < g.Nx; ++n) CHECK(std::abs(S.values(m, n)) < 1e-12);

  // direct-sum oracle at random lattice frequencies
  std::mt19937_64 rng(11);
  const auto f = oracle::random_bump(g, rng, 0.2);
  const auto F = fourier(f);
  std::uniform_int_distribution<int> mt(0, g.Nt - 1), nx(0, g.Nx - 1);
  for (int r = 0; r < 5; ++r) {
    const int m = mt(rng), n = nx(rng);
    const auto want = oracle::fourier_at(g, f.values, g.k_t(m), g.k_x(n));
    CHECK(std::abs(F.values(m, n) - want) <= 1e-8 * std::max(1e-300, std::abs(want)) + 1e-14);
  }
}

TEST_CASE("fourier inversion and Parseval on random functions") {
  const auto g = make_grid(3.0, 1.5, 48, 24);
  std::mt19937_64 rng(5);
  for (int r = 0; r < 10; ++r) {
    TestFunction f = zero_function(g);
    f.values = oracle::random_complex_function(g, rng, 0.1);
    const auto S = fourier(f);
    const auto back = inverse_fourier(S);
    CHECK((back - f.values).norm() <= 1e-10 * f.values.norm());
    const double site = f.l2_squared();
    const double freq = S.values.squaredNorm() / (2 * g.T * g.L);
    CHECK(freq == doctest::Approx(site).epsilon(1e-8));
  }
}

TEST_CASE("mollifier normalization") {
  const auto eta = Mollifier::standard();
  CHECK(eta.continuum_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eta.profile(0.3, 0.2) >= 0.0);
  CHECK(eta.profile(1.0, 0.1) == 0.0);
  const auto g = make_grid(2 * oracle::pi, 2, 128, 128);
  for (double lam : {0.2, 0.35, 0.6}) {
    const auto st = stencil(g, eta, lam);
    CHECK(st.weights.sum() * g.w_site() == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(stencil(g, eta, 0.5 * g.dt), Error);
}

TEST_CASE("mollify: spike, quadrature and direct convolution") {
  const auto g = make_grid(2 * oracle::pi, 2, 64, 64);
  const auto eta = Mollifier::standard();
  const double lam = 0.4;
  const auto st = stencil(g, eta, lam);

  TestFunction spike = zero_function(g);
  spike.values[g.index(32, 10)] = 1.0;
  const auto ms = mollify(spike, eta, lam);
  for (int a = -st.ht; a <= st.ht; ++a)
    for (int b = -st.hx; b <= st.hx; ++b) {
      const int j = ((10 + b) % g.Nx + g.Nx) % g.Nx;
      CHECK(ms.values[g.index(32 + a, j)].real() ==
            doctest::Approx(st.weights(a + st.ht, b + st.hx) * g.w_site()).epsilon(1e-12));
    }

  std::mt19937_64 rng(3);
  const auto f = oracle::random_bump(g, rng, 0.6);
  const auto mf = mollify(f, eta, lam);
  CHECK(mf.quadrature_real() == doctest::Approx(f.quadrature_real()).epsilon(1e-8));

  // direct-sum convolution from the continuum profile, renormalized
  double total = 0;
  for (int a = -st.ht; a <= st.ht; ++a)
    for (int b = -st.hx; b <= st.hx; ++b) total += eta.scaled(a * g.dt, b * g.dx, lam);
  for (int i = 10; i < g.Nt - 10; i += 3)
    for (int j = 0; j < g.Nx; j += 5) {
      double s = 0;
      for (int a = -st.ht; a <= st.ht; ++a)
        for (int b = -st.hx; b <= st.hx; ++b) {
          const int jj = ((j - b) % g.Nx + g.Nx) % g.Nx;
          s += eta.scaled(a * g.dt, b * g.dx, lam) / total * f.values[g.index(i - a, jj)].real();
        }
      CHECK(std::abs(mf.values[g.index(i, j)].real() - s) <= 1e-10);
    }

  CHECK_THROWS_AS(mollify(f, eta, 0.5 * g.dx), Error);
  // support reaching the edge is refused
  TestFunction edge = zero_function(g);
  edge.values[g.index(1, 0)] = 1.0;
  CHECK_THROWS_AS(mollify(edge, eta, lam), Error);
}
