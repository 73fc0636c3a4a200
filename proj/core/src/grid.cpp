#include "qeilab/grid.hpp"

#include <cmath>
#include <numbers>

#include "qeilab/error.hpp"
#include "qeilab/fft.hpp"
#include "qeilab/quadrature.hpp"

namespace qeilab::grid {

namespace {
constexpr double kPi = std::numbers::pi;
}

double SpacetimeGrid::k_t(int m) const { return fft::bin_frequency(m, Nt, dt); }
double SpacetimeGrid::k_x(int j) const { return fft::bin_frequency(j, Nx, dx); }

SpacetimeGrid make_grid(double L, double T, int Nt, int Nx) {
  require(L > 0 && T > 0, ErrorCode::InvalidArgument, "extents must be positive");
  require(Nt >= 8 && Nx >= 8, ErrorCode::InvalidArgument, "sample counts must be >= 8");
  require(Nt % 2 == 0 && Nx % 2 == 0, ErrorCode::InvalidArgument, "sample counts must be even");
  SpacetimeGrid g;
  g.L = L;
  g.T = T;
  g.Nt = Nt;
  g.Nx = Nx;
  g.dt = 2 * T / Nt;
  g.dx = L / Nx;
  return g;
}

double periodic_offset(double x, double x0, double L) {
  double d = std::fmod(x - x0, L);
  if (d < -L / 2) d += L;
  if (d >= L / 2) d -= L;
  return d;
}

bool Box::contains(double t, double x, double L) const {
  if (t < t_lo || t > t_hi) return false;
  if (full_circle) return true;
  return std::abs(periodic_offset(x, x_center, L)) <= x_half;
}

bool Box::strictly_inside(const Box& outer, double L) const {
  if (!(t_lo > outer.t_lo && t_hi < outer.t_hi)) return false;
  if (outer.full_circle) return true;
  if (full_circle) return false;
  const double c = periodic_offset(x_center, outer.x_center, L);
  return std::abs(c) + x_half < outer.x_half;
}

double TestFunction::quadrature_real() const { return quadrature().real(); }

std::complex<double> TestFunction::quadrature() const { return values.sum() * grid.w_site(); }

double TestFunction::l2_squared() const { return values.squaredNorm() * grid.w_site(); }

double bump_profile(double rho, bool unit_peak) {
  if (rho >= 1.0) return 0.0;
  const double v = -1.0 / (1.0 - rho * rho);
  return unit_peak ? std::exp(1.0 + v) : std::exp(v);
}

double smooth_step(double s) {
  if (s <= 0) return 0.0;
  if (s >= 1) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

TestFunction zero_function(const SpacetimeGrid& g) {
  TestFunction f;
  f.grid = g;
  f.values = cvec::Zero(g.sites());
  f.support = Box{0, 0, 0, 0, true};
  return f;
}

TestFunction bump(const SpacetimeGrid& g, const BumpParams& p) {
  require(p.r_t > 0, ErrorCode::InvalidArgument, "bump time radius must be positive");
  require(p.t0 - p.r_t > -g.T && p.t0 + p.r_t < g.T, ErrorCode::InvalidArgument,
          "bump support leaks out of the time window");
  if (!p.spatial_constant)
    require(p.r_x > 0 && p.r_x < g.L / 2, ErrorCode::InvalidArgument,
            "bump spatial radius must lie in (0, L/2)");
  TestFunction f;
  f.grid = g;
  f.bump = p;
  f.values = cvec::Zero(g.sites());
  f.support = Box{p.t0 - p.r_t, p.t0 + p.r_t, p.x0, p.spatial_constant ? 0.0 : p.r_x,
                  p.spatial_constant};
  for (int i = 0; i < g.Nt; ++i) {
    const double st = (g.t(i) - p.t0) / p.r_t;
    for (int j = 0; j < g.Nx; ++j) {
      double rho2 = st * st;
      if (!p.spatial_constant) {
        const double sx = periodic_offset(g.x(j), p.x0, g.L) / p.r_x;
        rho2 += sx * sx;
      }
      f.values[g.index(i, j)] = bump_profile(std::sqrt(rho2), p.unit_peak);
    }
  }
  return f;
}

namespace {
// 1 on [in_lo, in_hi], 0 outside (out_lo, out_hi), smooth monotone between.
double interval_plateau(double s, double in_lo, double in_hi, double out_lo, double out_hi) {
  if (s >= in_lo && s <= in_hi) return 1.0;
  if (s <= out_lo || s >= out_hi) return 0.0;
  if (s < in_lo) return smooth_step((s - out_lo) / (in_lo - out_lo));
  return smooth_step((out_hi - s) / (out_hi - in_hi));
}
}  // namespace

TestFunction plateau(const SpacetimeGrid& g, const Box& inner, const Box& outer) {
  require(inner.strictly_inside(outer, g.L), ErrorCode::InvalidArgument,
          "plateau boxes are not nested");
  require(outer.t_lo > -g.T && outer.t_hi < g.T, ErrorCode::InvalidArgument,
          "plateau outer box leaks out of the time window");
  TestFunction F;
  F.grid = g;
  F.support = outer;
  F.values = cvec::Zero(g.sites());
  for (int i = 0; i < g.Nt; ++i) {
    const double pt = interval_plateau(g.t(i), inner.t_lo, inner.t_hi, outer.t_lo, outer.t_hi);
    for (int j = 0; j < g.Nx; ++j) {
      double px = 1.0;
      if (!outer.full_circle) {
        const double off = periodic_offset(g.x(j), outer.x_center, g.L);
        if (inner.full_circle) {
          px = 1.0;
        } else {
          const double c = periodic_offset(inner.x_center, outer.x_center, g.L);
          px = interval_plateau(off, c - inner.x_half, c + inner.x_half, -outer.x_half,
                                outer.x_half);
        }
      }
      F.values[g.index(i, j)] = pt * px;
    }
  }
  return F;
}

TestFunction multiply(const TestFunction& a, const TestFunction& b) {
  require(a.grid == b.grid, ErrorCode::GridMismatch, "multiply");
  TestFunction r;
  r.grid = a.grid;
  r.values = a.values.cwiseProduct(b.values);
  r.support = a.support;
  return r;
}

double Spectrum::cell_volume() const { return (2 * kPi / (2 * grid.T)) * (2 * kPi / grid.L); }

Spectrum fourier(const TestFunction& f) {
  const auto& g = f.grid;
  Eigen::MatrixXcd work(g.Nt, g.Nx);
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) work(i, j) = f.values[g.index(i, j)];
  for (int i = 0; i < g.Nt; ++i) work.row(i) = fft::forward(work.row(i).transpose()).transpose();
  for (int j = 0; j < g.Nx; ++j) work.col(j) = fft::forward(work.col(j));
  // node t_i = -T + (i + 1/2) dt contributes exp(-i k_m t_0) relative to index i.
  for (int m = 0; m < g.Nt; ++m) {
    const std::complex<double> phase = std::polar(g.w_site(), -g.k_t(m) * g.t(0));
    work.row(m) *= phase;
  }
  return Spectrum{g, work};
}

cvec inverse_fourier(const Spectrum& s) {
  const auto& g = s.grid;
  Eigen::MatrixXcd work = s.values;
  for (int m = 0; m < g.Nt; ++m) {
    const std::complex<double> phase = std::polar(1.0 / g.w_site(), g.k_t(m) * g.t(0));
    work.row(m) *= phase;
  }
  for (int j = 0; j < g.Nx; ++j) work.col(j) = fft::inverse(work.col(j));
  for (int i = 0; i < g.Nt; ++i) work.row(i) = fft::inverse(work.row(i).transpose()).transpose();
  cvec out(g.sites());
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) out[g.index(i, j)] = work(i, j);
  return out;
}

cvec spectral_derivative(const SpacetimeGrid& g, const cvec& values, int axis) {
  require(axis == 0 || axis == 1, ErrorCode::InvalidArgument, "axis must be 0 or 1");
  TestFunction f{g, values, Box{}, std::nullopt};
  Spectrum s = fourier(f);
  const std::complex<double> I(0, 1);
  for (int m = 0; m < g.Nt; ++m)
    for (int n = 0; n < g.Nx; ++n) {
      if (axis == 0)
        s.values(m, n) *= (m == g.Nt / 2) ? 0.0 : I * g.k_t(m);
      else
        s.values(m, n) *= (n == g.Nx / 2) ? 0.0 : I * g.k_x(n);
    }
  return inverse_fourier(s);
}

Mollifier Mollifier::standard() {
  Mollifier m;
  m.normalization = 1.0;
  m.normalization = m.continuum_mass(400);
  return m;
}

double Mollifier::profile(double t, double x) const {
  return bump_profile(std::sqrt(t * t + x * x), false) / normalization;
}

double Mollifier::scaled(double t, double x, double lambda) const {
  return profile(t / lambda, x / lambda) / (lambda * lambda);
}

double Mollifier::continuum_mass(int nodes) const {
  // 2 pi int_0^1 r eta(r) dr; the integrand is flat to all orders at r = 1,
  // so composite Gauss-Legendre converges quickly.
  const auto rule = quadrature::composite(0.0, 1.0, 8, nodes / 8 > 4 ? nodes / 8 : 4);
  double s = 0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    s += rule.weights[q] * rule.nodes[q] * profile(rule.nodes[q], 0.0);
  return 2 * kPi * s;
}

MollifierStencil stencil(const SpacetimeGrid& g, const Mollifier& eta, double lambda) {
  require(lambda > std::max(g.dt, g.dx), ErrorCode::UnresolvedScale,
          "mollifier scale must exceed the grid spacing");
  MollifierStencil st;
  st.ht = static_cast<int>(std::floor(lambda / g.dt));
  st.hx = static_cast<int>(std::floor(lambda / g.dx));
  require(2 * st.hx + 1 <= g.Nx, ErrorCode::UnresolvedScale,
          "mollifier wider than the circle");
  st.weights = Eigen::MatrixXd::Zero(2 * st.ht + 1, 2 * st.hx + 1);
  double total = 0;
  for (int a = -st.ht; a <= st.ht; ++a)
    for (int b = -st.hx; b <= st.hx; ++b) {
      const double v = eta.scaled(a * g.dt, b * g.dx, lambda);
      st.weights(a + st.ht, b + st.hx) = v;
      total += v;
    }
  st.weights /= total * g.w_site();
  return st;
}

TestFunction mollify(const TestFunction& f, const Mollifier& eta, double lambda) {
  const auto& g = f.grid;
  const MollifierStencil st = stencil(g, eta, lambda);
  // support check on actual nonzero rows
  for (int i = 0; i < g.Nt; ++i) {
    bool nonzero = false;
    for (int j = 0; j < g.Nx && !nonzero; ++j) nonzero = f.values[g.index(i, j)] != 0.0;
    if (nonzero)
      require(i - st.ht >= 0 && i + st.ht < g.Nt, ErrorCode::InvalidArgument,
              "mollification would reach the time boundary");
  }
  TestFunction out;
  out.grid = g;
  out.support = f.support;
  out.support.t_lo -= lambda;
  out.support.t_hi += lambda;
  if (!out.support.full_circle) out.support.x_half += lambda;
  out.values = cvec::Zero(g.sites());
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) {
      std::complex<double> acc = 0;
      for (int a = -st.ht; a <= st.ht; ++a) {
        const int ii = i - a;
        if (ii < 0 || ii >= g.Nt) continue;
        for (int b = -st.hx; b <= st.hx; ++b) {
          const int jj = ((j - b) % g.Nx + g.Nx) % g.Nx;
          acc += st.weights(a + st.ht, b + st.hx) * f.values[g.index(ii, jj)];
        }
      }
      out.values[g.index(i, j)] = acc * g.w_site();
    }
  return out;
}

Eigen::MatrixXd mollifier_matrix(const SpacetimeGrid& g, const Mollifier& eta, double lambda) {
  const MollifierStencil st = stencil(g, eta, lambda);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(g.sites(), g.sites());
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j)
      for (int a = -st.ht; a <= st.ht; ++a) {
        const int ii = i - a;
        if (ii < 0 || ii >= g.Nt) continue;
        for (int b = -st.hx; b <= st.hx; ++b) {
          const int jj = ((j - b) % g.Nx + g.Nx) % g.Nx;
          M(g.index(i, j), g.index(ii, jj)) += st.weights(a + st.ht, b + st.hx) * g.w_site();
        }
      }
  return M;
}

}  // namespace qeilab::grid
