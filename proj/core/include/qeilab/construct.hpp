#pragma once

// The half-delta kernel u, the derivative kernel w, the chart atlas they are
// built on, and the constants of the resulting quantum inequality.

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "qeilab/grid.hpp"
#include "qeilab/kernels.hpp"

namespace qeilab::construct {

using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

// 1/2 (1+k^2)^-l for k > 0, 1 - 1/2 (1+k^2)^-l for k <= 0.
double v_hat(int l, double k);

struct SpectralSymbol {
  int l = 3;
  double operator()(double k) const { return v_hat(l, k); }
};

// Periodic 1-d lattice with a node at 0; node i sits at i*h for i < N/2 and
// at (i-N)*h otherwise (FFT ordering).
struct Grid1D {
  int N = 0;
  double h = 0;

  double x(int i) const;
  double k(int m) const;
  double dk() const;
};

struct SampledDistribution {
  Grid1D grid;
  cvec values;
};

// Inverse transform of v_hat restricted to the lattice frequencies. The
// lattice must resolve |k| <= 8.
SampledDistribution build_v(int l, const Grid1D& g);

// sum_i values_i exp(-i k_m x_i) h on the lattice, as a 1-d spectrum.
kernels::Spectrum1D transform(const Grid1D& g, const cvec& values);

struct Chart {
  double x_center = 0;  // chart coordinate is (t, x - x_center) unwrapped
  double arc_half = 0;  // open arc |x - x_center| < arc_half
  double t_lo = 0;      // time window of the chart domain
  double t_hi = 0;
  double mu = 1;
  rvec chi;  // cutoff sampled on the grid sites
};

struct ChartAtlas {
  grid::SpacetimeGrid grid;
  grid::Box covered;
  std::vector<Chart> charts;

  int size() const { return static_cast<int>(charts.size()); }
  // max over sites in the covered region of |sum chi_j^2 - 1|.
  double partition_defect() const;
};

// Two angular charts centred at 0 and L/2, each covering an arc of 3L/4,
// with chi_1 = P cos(theta), chi_2 = P sin(theta) so that the squares sum
// to one; P is a time plateau equal to one on the covered window.
ChartAtlas build_atlas_cylinder(const grid::SpacetimeGrid& g, const grid::Box& covered);

// U_ab = sum_j G_j(a) G_j(b) v_disc(t_a - t_b) delta(x_a, x_b) / dx with
// G_j = Ft chi_j. v_disc is the inverse transform of v_hat on the time
// lattice zero-padded to 4 Nt points (v_hat := 1/2 at the Nyquist bin), so
// U + U^T is exactly Ft (x) Ft delta and the frequency spacing 2 pi / 8T does
// not depend on Nt.
class ChartKernel {
 public:
  ChartKernel(const grid::SpacetimeGrid& g, std::vector<rvec> factors, int l);

  const grid::SpacetimeGrid& grid() const { return grid_; }
  int order() const { return l_; }
  int padded_length() const { return M_; }
  const std::vector<rvec>& factors() const { return G_; }

  // pair(U, f, g) with the grid quadrature.
  std::complex<double> pair(const cvec& f, const cvec& g) const;
  // pair(U, g, g); real and non-negative up to rounding.
  double quad_form(const cvec& g) const;
  // quad_form of g = exp(i w t) times any unit-modulus phase in x. The x
  // phase drops out column by column; charts whose factor is a product
  // p(t) q(x) need a single time transform instead of one per column.
  double plane_wave_form(double w) const;
  // v_disc(n dt) for n = -(Nt-1)..(Nt-1), index n + Nt - 1.
  cvec v_disc() const;
  // Dense density; only sensible on small grids.
  kernels::KernelMatrix dense() const;

 private:
  // FFT in time (padded to M) of G_j * g, scaled by dt; (M, Nx).
  Eigen::MatrixXcd chart_transform(int j, const cvec& g) const;

  grid::SpacetimeGrid grid_;
  std::vector<rvec> G_;
  int l_;
  int M_;
  rvec vhat_;  // v_hat at the padded bins
};

ChartKernel build_u(const grid::TestFunction& f, const grid::TestFunction& Ft,
                    const ChartAtlas& atlas, int l);

// Central 8th-order time derivative; the four rows at each time edge are zero.
cvec time_derivative(const grid::SpacetimeGrid& g, const cvec& values);
// |symbol|^2 of time_derivative on exp(i w t).
double time_derivative_symbol_sq(const grid::SpacetimeGrid& g, double w);
// Spectral periodic x derivative (Nyquist bin dropped).
cvec space_derivative(const grid::SpacetimeGrid& g, const cvec& values);

// W = sum_a D_a^T U D_a over the orthonormal frame (d_t, d_x).
class DerivativeKernel {
 public:
  explicit DerivativeKernel(ChartKernel u) : u_(std::move(u)) {}

  const ChartKernel& base() const { return u_; }
  std::complex<double> pair(const cvec& f, const cvec& g) const;
  double quad_form(const cvec& g) const;
  // quad_form of exp(i w t + i k x) for a lattice momentum |k| below the
  // spatial Nyquist: both derivatives act as multipliers there, because the
  // cutoff vanishes on the time-edge rows.
  double plane_wave_form(double w, double k) const;
  kernels::KernelMatrix dense() const;

 private:
  ChartKernel u_;
};

DerivativeKernel build_w(const grid::TestFunction& Ft, const ChartAtlas& atlas, int l);

struct CprimeResult {
  double value = 0;
  std::vector<double> per_chart;  // (1+k_t^2)^l weighted norms before the 2n factor
  double tail_fraction = 0;       // share of the top tenth of |k_t|; divergent above 1e-5
  bool divergent = false;
};

// 2n max_j int (1+k_t^2)^l |(chi_j f/Ft)^(k)|^2 d^2k / (2 pi)^2 on the same
// padded lattice as U, so C' U - f (x) conj f is positive on the grid.
CprimeResult bound_constant_Cprime(const grid::TestFunction& f, const grid::TestFunction& Ft,
                                   const ChartAtlas& atlas, int l);

struct BoundConstants {
  double Cprime = 0;
  double C = 0;
  double c0 = 0;
  double c2 = 0;
  double delta_max = 0;
  double c = 0;
  double mass = 1;
};

BoundConstants assemble_constants(double Cprime, double c0, double c2, double m,
                                  double delta_max = 0.0);

}  // namespace qeilab::construct
