#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "qeilab/construct.hpp"
#include "qeilab/error.hpp"
#include "qeilab/field.hpp"
#include "qeilab/kernels.hpp"

using namespace qeilab;
using namespace qeilab::kernels;
using oracle::cd;

namespace {

grid::SpacetimeGrid small_grid() { return grid::make_grid(2 * oracle::pi, 2, 16, 16); }

KernelMatrix plain(const cmat& m) { return with_weights(rvec::Ones(m.rows()), m); }

}  // namespace

TEST_CASE("pair: delta density, zero argument and conjugate linearity") {
  const auto g = small_grid();
  std::mt19937_64 rng(1);
  const auto K = identity_density(g);
  for (int r = 0; r < 5; ++r) {
    const cvec f = oracle::random_complex_function(g, rng, 0.2);
    const cvec h = oracle::random_complex_function(g, rng, 0.2);
    CHECK(pair(K, f, f).real() == doctest::Approx(f.squaredNorm() * g.w_site()).epsilon(1e-12));
    CHECK(std::abs(pair(K, cvec::Zero(g.sites()), h)) == 0.0);
    const cd alpha(0.3, -1.7);
    const cd lhs = pair(K, cvec(alpha * f), h);
    CHECK(std::abs(lhs - std::conj(alpha) * pair(K, f, h)) <= 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("pair of the sampled vacuum kernel matches the mode sum") {
  const auto g = grid::make_grid(2 * oracle::pi, 2, 32, 16);
  const auto b = field::make_basis(1.0, g.L, 6);
  const auto K = field::two_point(field::Vacuum{}, b).sampled(g);
  std::mt19937_64 rng(2);
  for (int r = 0; r < 5; ++r) {
    const cvec f = oracle::random_complex_function(g, rng, 0.2);
    const cvec h = oracle::random_complex_function(g, rng, 0.2);
    const cd want = oracle::vacuum_pair(b, g, f, h);
    CHECK(std::abs(pair(K, f, h) - want) <= 1e-6 * std::abs(want));
    // Hermitian kernel: pair(K, f, f) is real
    const cd ff = pair(K, f, f);
    CHECK(std::abs(ff.imag()) <= 1e-10 * std::abs(ff));
  }
}

TEST_CASE("positivity_check verdicts") {
  const auto g = small_grid();
  const auto delta = identity_density(g);
  const auto w = positivity_check(delta);
  CHECK(w.positive);
  CHECK(w.min_eigenvalue >= 0);
  CHECK_FALSE(positivity_check(scale(delta, -1.0)).positive);

  const auto f = grid::bump(g, {0.0, 1.0, 1.2, 1.5, false, true});
  const auto R = rank_one(f);
  const cmat A = weighted_form(R);
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (A + A.adjoint()));
  const auto& ev = es.eigenvalues();
  const double q = f.l2_squared();
  CHECK(ev[ev.size() - 1] == doctest::Approx(q).epsilon(1e-8));
  CHECK(std::abs(ev[ev.size() - 2]) <= 1e-8 * q);
  CHECK(positivity_check(R).positive);

  // non-Hermitian input is Hermitized and the defect recorded
  cmat M = cmat::Identity(4, 4);
  M(0, 1) = 0.5;
  const auto wh = positivity_check(plain(M));
  CHECK(wh.hermitized);
  CHECK(wh.hermitian_defect > 0);

  cmat bad = cmat::Identity(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(positivity_check(plain(bad)), Error);
}

TEST_CASE("schur product: worked example, unit and random battery") {
  cmat a(2, 2), b(2, 2);
  a << 2, 1, 1, 2;
  b << 2, -1, -1, 2;
  const auto p = schur_product(plain(a), plain(b));
  CHECK(p.values(0, 0).real() == 4);
  CHECK(p.values(0, 1).real() == -1);
  Eigen::SelfAdjointEigenSolver<cmat> es(p.values);
  CHECK(es.eigenvalues()[0] == doctest::Approx(3));
  CHECK(es.eigenvalues()[1] == doctest::Approx(5));
  CHECK(positivity_check(p).positive);

  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> size(2, 64);
  for (int r = 0; r < 100; ++r) {
    const int n = size(rng);
    std::uniform_int_distribution<int> rank(1, n);
    const auto A = plain(oracle::random_psd(n, rank(rng), rng));
    const auto B = plain(oracle::random_psd(n, rank(rng), rng));
    REQUIRE(positivity_check(A, 1e-10).positive);
    REQUIRE(positivity_check(B, 1e-10).positive);
    const auto P = schur_product(A, B);
    const auto w = positivity_check(P, 1e-10);
    CHECK(w.min_eigenvalue >= -1e-10 * w.norm);
    // (all ones) is the unit
    const auto U = schur_product(A, plain(cmat::Ones(n, n)));
    CHECK((U.values - A.values).norm() == 0.0);
  }
  CHECK_THROWS_AS(schur_product(plain(a), plain(cmat::Ones(3, 3))), Error);
}

TEST_CASE("hs_decompose round trip") {
  const auto g = small_grid();
  const auto f = grid::bump(g, {0.0, 2.0, 1.0, 1.2, false, true});
  const auto terms = hs_decompose(rank_one(f));
  REQUIRE(terms.size() == 1);
  const cvec& psi = terms[0].psi;
  const cd overlap = (psi.adjoint() * f.values)(0) / (psi.norm() * f.values.norm());
  CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-10));

  const auto dt = hs_decompose(identity_density(g));
  CHECK(static_cast<int>(dt.size()) == g.sites());
  for (const auto& t : dt) CHECK(t.weight == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(9);
  for (int r = 0; r < 10; ++r) {
    const int n = 10 + 5 * r;
    const auto K = plain(oracle::random_psd(n, n / 2, rng));
    const auto back = hs_reconstruct(hs_decompose(K), K);
    CHECK((back.values - K.values).norm() <= 1e-8 * K.values.norm());
  }
  CHECK_THROWS_AS(hs_decompose(scale(identity_density(g), -1.0)), Error);
}

TEST_CASE("mollified pairing ladders") {
  const auto g = grid::make_grid(2.0, 2.0, 32, 16);
  const auto eta = grid::Mollifier::standard();
  const std::vector<double> ladder{0.6, 0.3, 0.15};
  const auto F = grid::plateau(g, {-0.5, 0.5, 0, 0, true}, {-1.2, 1.2, 0, 0, true});

  // delta against delta: a square at every rung (localized to keep clear of the edges)
  KernelMatrix d = identity_density(g);
  for (int a = 0; a < g.sites(); ++a) d.values(a, a) *= F.values[a] * F.values[a];
  const auto dd = mollified_pairing_limit(d, d, eta, ladder);
  for (double v : dd.values) CHECK(v > 0);

  // positive kernel against a smooth rank-one kernel
  const auto psi = grid::bump(g, {0.2, 1.0, 0.5, 0.6, false, true});
  const auto b = field::make_basis(1.0, g.L, 6);
  auto vac = field::two_point(field::Vacuum{}, b).sampled(g);
  for (int x = 0; x < g.sites(); ++x)
    for (int y = 0; y < g.sites(); ++y) vac.values(x, y) *= F.values[x] * F.values[y];
  const auto vr = mollified_pairing_limit(vac, rank_one(psi), eta, ladder);
  CHECK(vr.positive);
  for (double v : vr.values) CHECK(v >= 0);

  // vacuum against u: Cauchy ladder with contracting differences
  const auto atlas = construct::build_atlas_cylinder(g, F.support);
  const auto U = construct::build_u(F, F, atlas, 3).dense();
  const auto vu = mollified_pairing_limit(vac, U, eta, ladder);
  CHECK(vu.positive);
  CHECK(vu.convergent);
  REQUIRE(vu.ratios.size() == 1);
  CHECK(vu.ratios[0] < 0.5);
  for (std::size_t r = 0; r < vu.values.size(); ++r)
    CHECK(std::abs(vu.imag_parts[r]) <= 1e-8 * std::abs(vu.values[r]));

  CHECK_THROWS_AS(mollified_pairing_limit(vac, U, eta, {0.15, 0.3}), Error);
}

TEST_CASE("cone integrals: smooth control, spatial delta, monotonicity") {
  const auto g = grid::make_grid(2 * oracle::pi, 4, 256, 128);
  const auto f = grid::bump(g, {0.0, oracle::pi, 1.5, 1.5, false, true});
  ConeSpec cone{{1.0, 0.0}, 1.0, 2.0, {10, 20, 40, 80}};
  const auto lad = cone_sobolev_integral(f, cone);
  CHECK(lad.bounded);
  for (std::size_t r = 1; r < lad.partial.size(); ++r) CHECK(lad.partial[r] >= lad.partial[r - 1]);

  // narrower cones hold less
  ConeSpec wide{{0.6, 0.8}, 2.0, 1.0, {5, 10, 20}};
  ConeSpec narrow = wide;
  narrow.alpha = 0.5;
  const auto lw = cone_sobolev_integral(f, wide);
  const auto ln = cone_sobolev_integral(f, narrow);
  for (std::size_t r = 0; r < lw.partial.size(); ++r) CHECK(ln.partial[r] <= lw.partial[r]);

  // a spatial delta (constant in time): flat spectrum along k_x, linear growth
  grid::TestFunction d = grid::zero_function(g);
  for (int i = 0; i < g.Nt; ++i) d.values[g.index(i, 0)] = 1.0 / g.dx;
  const auto spec = grid::fourier(d);
  ConeSpec sx{{0.0, 1.0}, 0.1, 0.0, {10, 20, 40}};
  const auto ld = cone_sobolev_integral(spec, sx);
  CHECK_FALSE(ld.bounded);
  // only k_t = 0 contributes: each bin adds (2T)^2 * cell
  const double per_bin = std::pow(2 * g.T, 2) * spec.cell_volume();
  CHECK(ld.partial[0] == doctest::Approx(10 * per_bin).epsilon(1e-9));
  CHECK(ld.partial[2] == doctest::Approx(40 * per_bin).epsilon(1e-9));

  // a cone too thin to catch any lattice point
  ConeSpec empty{{0.6, 0.8}, 1e-9, 0.0, {1, 2}};
  CHECK_THROWS_AS(cone_sobolev_integral(spec, empty), Error);
}

TEST_CASE("symbol ladders and decay exponents in one dimension") {
  const construct::Grid1D g{8192, 0.02};
  const auto window = [&](const cvec& v) {
    cvec out = v;
    for (int i = 0; i < g.N; ++i) out[i] *= std::exp(-0.5 * g.x(i) * g.x(i));
    return out;
  };
  const double kmax = 0.6 * oracle::pi / g.h;
  const std::vector<double> cutoffs{kmax / 8, kmax / 4, kmax / 2, kmax};

  const auto s2 = construct::transform(g, window(construct::build_v(2, g).values));
  CHECK(ray_sobolev_integral(s2, +1, 3.0, cutoffs).bounded);
  CHECK_FALSE(ray_sobolev_integral(s2, +1, 4.0, cutoffs).bounded);

  const auto s1 = construct::transform(g, window(construct::build_v(1, g).values));
  const auto fit = decay_exponent(s1, +1, 1e-14, kmax);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.25));
  CHECK(fit.band_lo <= fit.slope);
  // the k < 0 side carries the delta part and does not decay
  const auto flat = decay_exponent(s1, -1, 1e-14, kmax);
  CHECK(flat.slope > -1.0);

  // Gaussian: steeper than any fixed power
  cvec gauss(g.N);
  for (int i = 0; i < g.N; ++i) gauss[i] = std::exp(-0.5 * g.x(i) * g.x(i));
  const auto sg = construct::transform(g, gauss);
  const auto gf = decay_exponent(sg, +1, 1e-14, 12.0);
  CHECK(gf.slope < -10);

  kernels::Spectrum1D zero = sg;
  for (auto& v : zero.values) v = 0.0;
  zero.values[1] = 1.0;
  CHECK(decay_exponent(zero, +1).below_noise);

  kernels::Spectrum1D tiny;
  tiny.k = {1, 2, 3};
  tiny.values = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(decay_exponent(tiny, +1), Error);
}
