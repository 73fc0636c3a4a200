#pragma once

// Uniform sampling of a time window times a circle, smooth compactly
// supported test functions, mollifiers and the discrete Fourier transform
// with continuum normalization.
//
// Conventions:
//   t_i = -T + (i + 1/2) dt,  i = 0..Nt-1        (time, open window (-T, T))
//   x_j = j dx,               j = 0..Nx-1        (periodic, x_Nx == x_0)
//   site index a = i * Nx + j
//   fhat(k_t, k_x) = sum_a f(t_a, x_a) exp(-i (k_t t_a + k_x x_a)) w_site
//   f(t_a, x_a)    = 1/(2T L) sum_{m,n} fhat(k_m, k_n) exp(+i (...))
// so Parseval reads  sum_a |f|^2 w_site = 1/(2T L) sum_{m,n} |fhat|^2.

#include <optional>

#include <Eigen/Core>

namespace qeilab::grid {

using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

struct SpacetimeGrid {
  double L = 0;  // circumference
  double T = 0;  // time half-width
  int Nt = 0;
  int Nx = 0;
  double dt = 0;
  double dx = 0;

  double w_site() const { return dt * dx; }
  int sites() const { return Nt * Nx; }
  int index(int i, int j) const { return i * Nx + j; }
  double t(int i) const { return -T + (i + 0.5) * dt; }
  double x(int j) const { return j * dx; }

  // Time frequency of bin m (FFT ordering) on the native 2T-periodic lattice.
  double k_t(int m) const;
  // Spatial frequency 2 pi n / L of bin j (FFT ordering).
  double k_x(int j) const;

  bool operator==(const SpacetimeGrid&) const = default;
};

SpacetimeGrid make_grid(double L, double T, int Nt, int Nx);

// Signed periodic offset x - x0 folded into [-L/2, L/2).
double periodic_offset(double x, double x0, double L);

// Time interval x spatial arc; `full_circle` ignores the arc fields.
struct Box {
  double t_lo = 0;
  double t_hi = 0;
  double x_center = 0;
  double x_half = 0;
  bool full_circle = true;

  bool contains(double t, double x, double L) const;
  // True if this box lies strictly inside `outer`.
  bool strictly_inside(const Box& outer, double L) const;
};

struct BumpParams {
  double t0 = 0;
  double x0 = 0;
  double r_t = 1;
  double r_x = 1;
  bool spatial_constant = false;
  bool unit_peak = true;
};

struct TestFunction {
  SpacetimeGrid grid;
  cvec values;
  Box support;
  std::optional<BumpParams> bump;

  double quadrature_real() const;
  std::complex<double> quadrature() const;
  double l2_squared() const;
};

// exp(-1/(1-rho^2)) for rho < 1, else 0; multiplied by e when unit_peak.
double bump_profile(double rho, bool unit_peak = true);

// Smooth monotone step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);

TestFunction zero_function(const SpacetimeGrid& g);

TestFunction bump(const SpacetimeGrid& g, const BumpParams& p);

// Smooth F with F == 1 on inner, F == 0 outside outer, 0 <= F <= 1.
TestFunction plateau(const SpacetimeGrid& g, const Box& inner, const Box& outer);

// Pointwise product; support is the intersection bounding box of the factors
// (conservatively the first factor's box).
TestFunction multiply(const TestFunction& a, const TestFunction& b);

struct Spectrum {
  SpacetimeGrid grid;
  Eigen::MatrixXcd values;  // (Nt, Nx), FFT ordering in both axes

  double k_t(int m) const { return grid.k_t(m); }
  double k_x(int n) const { return grid.k_x(n); }
  // Frequency-cell volume (2 pi / 2T) * (2 pi / L).
  double cell_volume() const;
};

Spectrum fourier(const TestFunction& f);
cvec inverse_fourier(const Spectrum& s);

// Spectral first derivative along time (axis 0) or space (axis 1). The
// Nyquist bin is zeroed. Accurate for functions vanishing near the time edge.
cvec spectral_derivative(const SpacetimeGrid& g, const cvec& values, int axis);

// Radially symmetric normalized bump eta(z) = exp(-1/(1-|z|^2)) / Z on the
// unit disk of R^2, Z computed once by Gauss-Legendre quadrature.
struct Mollifier {
  double normalization = 0;

  static Mollifier standard();
  double profile(double t, double x) const;
  double scaled(double t, double x, double lambda) const;
  // Continuum quadrature of eta by polar Gauss-Legendre with `nodes` points.
  double continuum_mass(int nodes = 200) const;
};

// Discrete eta_lambda samples on the grid offsets covering the disk of
// radius lambda, renormalized to unit site quadrature. Rows are time
// offsets -ht..ht, columns spatial offsets -hx..hx.
struct MollifierStencil {
  int ht = 0;
  int hx = 0;
  Eigen::MatrixXd weights;  // already multiplied by nothing; sum * w_site == 1
};

MollifierStencil stencil(const SpacetimeGrid& g, const Mollifier& eta, double lambda);

// Circular in space, zero padded in time. Throws UnresolvedScale when lambda
// is not above the grid spacing, InvalidArgument when the support plus
// lambda reaches the time edge.
TestFunction mollify(const TestFunction& f, const Mollifier& eta, double lambda);

// Dense convolution matrix M with (M f)_a = sum_b eta_lambda(a - b) f_b w_site.
Eigen::MatrixXd mollifier_matrix(const SpacetimeGrid& g, const Mollifier& eta, double lambda);

}  // namespace qeilab::grid
