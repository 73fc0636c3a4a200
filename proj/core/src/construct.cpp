#include "qeilab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qeilab/error.hpp"
#include "qeilab/fft.hpp"

namespace qeilab::construct {

namespace {

constexpr double kPi = std::numbers::pi;

double time_plateau(double t, double in_lo, double in_hi, double out_lo, double out_hi) {
  if (t <= out_lo || t >= out_hi) return 0.0;
  if (t >= in_lo && t <= in_hi) return 1.0;
  if (t < in_lo) return grid::smooth_step((t - out_lo) / (in_lo - out_lo));
  return grid::smooth_step((out_hi - t) / (out_hi - in_hi));
}

double max_abs(const rvec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void check_real_cutoff(const grid::TestFunction& Ft) {
  const double scale = Ft.values.cwiseAbs().maxCoeff();
  require(scale > 0, ErrorCode::InvalidArgument, "cutoff function vanishes identically");
  require(Ft.values.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale, ErrorCode::InvalidArgument,
          "cutoff function must be real");
}

void check_coverage(const grid::TestFunction& Ft, const ChartAtlas& atlas) {
  require(Ft.grid == atlas.grid, ErrorCode::GridMismatch, "atlas and cutoff grids differ");
  const auto& g = atlas.grid;
  for (int a = 0; a < g.sites(); ++a) {
    if (Ft.values[a].real() == 0.0) continue;
    double s = 0;
    for (const auto& c : atlas.charts) s += c.chi[a] * c.chi[a];
    require(std::abs(s - 1.0) <= 1e-10, ErrorCode::Coverage,
            "atlas does not cover the support of the cutoff");
  }
}

std::vector<rvec> chart_factors(const grid::TestFunction& Ft, const ChartAtlas& atlas) {
  std::vector<rvec> G;
  for (const auto& c : atlas.charts) G.push_back(Ft.values.real().cwiseProduct(c.chi));
  return G;
}

// Coefficients of the central 8th-order first derivative, offsets -4..4.
constexpr double kFd8[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                            4.0 / 5,   -1.0 / 5,    4.0 / 105, -1.0 / 280};

}  // namespace

double v_hat(int l, double k) {
  const double tail = 0.5 * std::pow(1.0 + k * k, -l);
  return k > 0 ? tail : 1.0 - tail;
}

double Grid1D::x(int i) const { return (i < N / 2 ? i : i - N) * h; }
double Grid1D::k(int m) const { return fft::bin_frequency(m, N, h); }
double Grid1D::dk() const { return 2 * kPi / (N * h); }

SampledDistribution build_v(int l, const Grid1D& g) {
  require(l >= 1, ErrorCode::InvalidArgument, "order l must be a positive integer");
  require(g.N >= 16 && g.h > 0, ErrorCode::InvalidArgument, "bad 1-d lattice");
  require(kPi / g.h >= 8.0, ErrorCode::UnresolvedScale, "lattice must resolve |k| <= 8");
  cvec vh(g.N);
  for (int m = 0; m < g.N; ++m) vh[m] = v_hat(l, g.k(m));
  return {g, fft::inverse(vh) / g.h};
}

kernels::Spectrum1D transform(const Grid1D& g, const cvec& values) {
  require(values.size() == g.N, ErrorCode::GridMismatch, "sample count differs from lattice");
  kernels::Spectrum1D s;
  s.dk = g.dk();
  const cvec hat = fft::forward(values) * g.h;
  for (int m = 0; m < g.N; ++m) {
    s.k.push_back(g.k(m));
    s.values.push_back(hat[m]);
  }
  return s;
}

double ChartAtlas::partition_defect() const {
  double worst = 0;
  for (int i = 0; i < grid.Nt; ++i)
    for (int j = 0; j < grid.Nx; ++j) {
      if (!covered.contains(grid.t(i), grid.x(j), grid.L)) continue;
      const int a = grid.index(i, j);
      double s = 0;
      for (const auto& c : charts) s += c.chi[a] * c.chi[a];
      worst = std::max(worst, std::abs(s - 1.0));
    }
  return worst;
}

ChartAtlas build_atlas_cylinder(const grid::SpacetimeGrid& g, const grid::Box& covered) {
  const double edge = 5 * g.dt;
  require(covered.t_lo < covered.t_hi, ErrorCode::InvalidArgument, "empty covered window");
  require(covered.t_lo > -g.T + edge && covered.t_hi < g.T - edge, ErrorCode::InvalidArgument,
          "covered region touches the time boundary");
  const double out_lo = covered.t_lo - 0.5 * (covered.t_lo + g.T - edge);
  const double out_hi = covered.t_hi + 0.5 * (g.T - edge - covered.t_hi);

  ChartAtlas atlas{g, covered, {}};
  const double a = g.L / 8;
  const double b = 3 * g.L / 8;
  Chart c1{0.0, b, out_lo, out_hi, 1.0, rvec(g.sites())};
  Chart c2{g.L / 2, b, out_lo, out_hi, 1.0, rvec(g.sites())};
  for (int i = 0; i < g.Nt; ++i) {
    const double P = time_plateau(g.t(i), covered.t_lo, covered.t_hi, out_lo, out_hi);
    for (int j = 0; j < g.Nx; ++j) {
      const double d = std::abs(grid::periodic_offset(g.x(j), 0.0, g.L));
      const double theta = 0.5 * kPi * grid::smooth_step((d - a) / (b - a));
      const int s = g.index(i, j);
      c1.chi[s] = d >= b ? 0.0 : P * std::cos(theta);
      c2.chi[s] = d <= a ? 0.0 : P * std::sin(theta);
    }
  }
  atlas.charts = {std::move(c1), std::move(c2)};
  return atlas;
}

ChartKernel::ChartKernel(const grid::SpacetimeGrid& g, std::vector<rvec> factors, int l)
    : grid_(g), G_(std::move(factors)), l_(l) {
  require(l >= 1, ErrorCode::InvalidArgument, "order l must be a positive integer");
  for (const auto& G : G_)
    require(G.size() == g.sites(), ErrorCode::GridMismatch, "chart factor size");
  M_ = 4 * g.Nt;
  vhat_.resize(M_);
  for (int m = 0; m < M_; ++m) vhat_[m] = v_hat(l, fft::bin_frequency(m, M_, g.dt));
  // The Nyquist bin is its own mirror image.
  vhat_[M_ / 2] = 0.5;
}

Eigen::MatrixXcd ChartKernel::chart_transform(int j, const cvec& g) const {
  Eigen::MatrixXcd out(M_, grid_.Nx);
  cvec col(M_);
  for (int x = 0; x < grid_.Nx; ++x) {
    col.setZero();
    bool any = false;
    for (int i = 0; i < grid_.Nt; ++i) {
      const int a = grid_.index(i, x);
      col[i] = G_[j][a] * g[a];
      any = any || col[i] != 0.0;
    }
    if (any)
      out.col(x) = fft::forward(col) * grid_.dt;
    else
      out.col(x).setZero();
  }
  return out;
}

std::complex<double> ChartKernel::pair(const cvec& f, const cvec& g) const {
  require(f.size() == grid_.sites() && g.size() == grid_.sites(), ErrorCode::GridMismatch,
          "test function size");
  std::complex<double> acc = 0;
  for (int j = 0; j < static_cast<int>(G_.size()); ++j) {
    const Eigen::MatrixXcd hf = chart_transform(j, f);
    const Eigen::MatrixXcd hg = &f == &g ? hf : chart_transform(j, g);
    for (int x = 0; x < grid_.Nx; ++x)
      for (int m = 0; m < M_; ++m) acc += vhat_[m] * std::conj(hf(m, x)) * hg(m, x);
  }
  return acc * grid_.dx / (M_ * grid_.dt);
}

double ChartKernel::quad_form(const cvec& g) const {
  require(g.size() == grid_.sites(), ErrorCode::GridMismatch, "test function size");
  double acc = 0;
  for (int j = 0; j < static_cast<int>(G_.size()); ++j) {
    const Eigen::MatrixXcd h = chart_transform(j, g);
    acc += vhat_.transpose() * h.cwiseAbs2().rowwise().sum();
  }
  return acc * grid_.dx / (M_ * grid_.dt);
}

double ChartKernel::plane_wave_form(double w) const {
  const int Nt = grid_.Nt;
  const int Nx = grid_.Nx;
  double acc = 0;
  cvec col(M_);
  for (const auto& G : G_) {
    // Reference profile: the column of largest norm.
    int ref = 0;
    double best = -1;
    for (int x = 0; x < Nx; ++x) {
      double n2 = 0;
      for (int i = 0; i < Nt; ++i) n2 += G[grid_.index(i, x)] * G[grid_.index(i, x)];
      if (n2 > best) best = n2, ref = x;
    }
    if (best <= 0) continue;
    // Column weights alpha_x with G(., x) = alpha_x G(., ref), if the factor separates.
    std::vector<double> alpha(static_cast<std::size_t>(Nx));
    bool separable = true;
    for (int x = 0; x < Nx && separable; ++x) {
      double dot = 0;
      for (int i = 0; i < Nt; ++i) dot += G[grid_.index(i, x)] * G[grid_.index(i, ref)];
      const double a = dot / best;
      double res = 0;
      for (int i = 0; i < Nt; ++i) {
        const double r = G[grid_.index(i, x)] - a * G[grid_.index(i, ref)];
        res += r * r;
      }
      separable = res <= 1e-26 * best;
      alpha[static_cast<std::size_t>(x)] = a;
    }
    const auto column_form = [&](int x) {
      col.setZero();
      for (int i = 0; i < Nt; ++i)
        col[i] = G[grid_.index(i, x)] * std::polar(1.0, w * grid_.t(i));
      const cvec h = fft::forward(col) * grid_.dt;
      return vhat_.dot(h.cwiseAbs2());
    };
    if (separable) {
      double a2 = 0;
      for (double a : alpha) a2 += a * a;
      acc += a2 * column_form(ref);
    } else {
      for (int x = 0; x < Nx; ++x) acc += column_form(x);
    }
  }
  return acc * grid_.dx / (M_ * grid_.dt);
}

cvec ChartKernel::v_disc() const {
  const cvec inv = fft::inverse(vhat_.cast<std::complex<double>>());
  const int Nt = grid_.Nt;
  cvec out(2 * Nt - 1);
  for (int n = -(Nt - 1); n <= Nt - 1; ++n) out[n + Nt - 1] = inv[(n + M_) % M_] / grid_.dt;
  return out;
}

kernels::KernelMatrix ChartKernel::dense() const {
  const int N = grid_.sites();
  const cvec v = v_disc();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 0; i < grid_.Nt; ++i)
    for (int ip = 0; ip < grid_.Nt; ++ip) {
      const std::complex<double> vv = v[i - ip + grid_.Nt - 1] / grid_.dx;
      for (int x = 0; x < grid_.Nx; ++x) {
        const int a = grid_.index(i, x);
        const int b = grid_.index(ip, x);
        double s = 0;
        for (const auto& G : G_) s += G[a] * G[b];
        U(a, b) = s * vv;
      }
    }
  return kernels::on_grid(grid_, std::move(U));
}

ChartKernel build_u(const grid::TestFunction& f, const grid::TestFunction& Ft,
                    const ChartAtlas& atlas, int l) {
  require(f.grid == Ft.grid, ErrorCode::GridMismatch, "f and cutoff grids differ");
  check_real_cutoff(Ft);
  for (int a = 0; a < f.grid.sites(); ++a)
    if (f.values[a] != 0.0)
      require(Ft.values[a].real() > 0, ErrorCode::Coverage,
              "support of f escapes the positivity set of the cutoff");
  check_coverage(Ft, atlas);
  return ChartKernel(Ft.grid, chart_factors(Ft, atlas), l);
}

cvec time_derivative(const grid::SpacetimeGrid& g, const cvec& values) {
  require(values.size() == g.sites(), ErrorCode::GridMismatch, "derivative input size");
  cvec out = cvec::Zero(values.size());
  for (int i = 4; i < g.Nt - 4; ++i)
    for (int x = 0; x < g.Nx; ++x) {
      std::complex<double> s = 0;
      for (int o = -4; o <= 4; ++o) s += kFd8[o + 4] * values[g.index(i + o, x)];
      out[g.index(i, x)] = s / g.dt;
    }
  return out;
}

double time_derivative_symbol_sq(const grid::SpacetimeGrid& g, double w) {
  double s = 0;
  for (int o = 1; o <= 4; ++o) s += 2 * kFd8[o + 4] * std::sin(w * o * g.dt);
  return s * s / (g.dt * g.dt);
}

cvec space_derivative(const grid::SpacetimeGrid& g, const cvec& values) {
  return grid::spectral_derivative(g, values, 1);
}

std::complex<double> DerivativeKernel::pair(const cvec& f, const cvec& g) const {
  const auto& gr = u_.grid();
  return u_.pair(time_derivative(gr, f), time_derivative(gr, g)) +
         u_.pair(space_derivative(gr, f), space_derivative(gr, g));
}

double DerivativeKernel::quad_form(const cvec& g) const {
  const auto& gr = u_.grid();
  return u_.quad_form(time_derivative(gr, g)) + u_.quad_form(space_derivative(gr, g));
}

double DerivativeKernel::plane_wave_form(double w, double k) const {
  return (time_derivative_symbol_sq(u_.grid(), w) + k * k) * u_.plane_wave_form(w);
}

kernels::KernelMatrix DerivativeKernel::dense() const {
  const auto& gr = u_.grid();
  const int N = gr.sites();
  Eigen::MatrixXcd Dt(N, N), Dx(N, N);
  cvec e = cvec::Zero(N);
  for (int b = 0; b < N; ++b) {
    e[b] = 1.0;
    Dt.col(b) = time_derivative(gr, e);
    Dx.col(b) = space_derivative(gr, e);
    e[b] = 0.0;
  }
  const Eigen::MatrixXcd U = u_.dense().values;
  // Constant site weights cancel between the density and the derivative matrices.
  Eigen::MatrixXcd W = Dt.transpose() * U * Dt + Dx.transpose() * U * Dx;
  return kernels::on_grid(gr, std::move(W));
}

DerivativeKernel build_w(const grid::TestFunction& Ft, const ChartAtlas& atlas, int l) {
  check_real_cutoff(Ft);
  check_coverage(Ft, atlas);
  const auto& g = Ft.grid;
  std::vector<rvec> G = chart_factors(Ft, atlas);
  const double scale = std::max(max_abs(G[0]), G.size() > 1 ? max_abs(G[1]) : 0.0);
  for (const auto& Gj : G)
    for (int i = 0; i < g.Nt; ++i) {
      if (i >= 4 && i < g.Nt - 4) continue;
      for (int x = 0; x < g.Nx; ++x)
        require(std::abs(Gj[g.index(i, x)]) <= 1e-14 * scale, ErrorCode::InvalidArgument,
                "cutoff must vanish on the time-edge derivative rows");
    }
  return DerivativeKernel(ChartKernel(g, std::move(G), l));
}

CprimeResult bound_constant_Cprime(const grid::TestFunction& f, const grid::TestFunction& Ft,
                                   const ChartAtlas& atlas, int l) {
  require(f.grid == Ft.grid, ErrorCode::GridMismatch, "f and cutoff grids differ");
  check_real_cutoff(Ft);
  check_coverage(Ft, atlas);
  const auto& g = f.grid;
  cvec ftilde = cvec::Zero(g.sites());
  for (int a = 0; a < g.sites(); ++a) {
    const double F = Ft.values[a].real();
    if (f.values[a] != 0.0) {
      require(F > 0, ErrorCode::Coverage, "support of f escapes the positivity set of the cutoff");
      ftilde[a] = f.values[a] / F;
    }
  }
  std::vector<rvec> chis;
  for (const auto& c : atlas.charts) chis.push_back(c.chi);
  // Same padded time lattice as ChartKernel.
  const int M = 4 * g.Nt;
  rvec weight(M);
  double kmax = 0;
  for (int m = 0; m < M; ++m) kmax = std::max(kmax, std::abs(fft::bin_frequency(m, M, g.dt)));
  CprimeResult out;
  double tail = 0, total = 0;
  for (int m = 0; m < M; ++m) {
    const double k = fft::bin_frequency(m, M, g.dt);
    weight[m] = std::pow(1.0 + k * k, l);
  }
  for (int j = 0; j < atlas.size(); ++j) {
    Eigen::MatrixXcd h(M, g.Nx);
    cvec col(M);
    for (int x = 0; x < g.Nx; ++x) {
      col.setZero();
      for (int i = 0; i < g.Nt; ++i) col[i] = chis[j][g.index(i, x)] * ftilde[g.index(i, x)];
      h.col(x) = fft::forward(col) * g.dt;
    }
    const rvec power = h.cwiseAbs2().rowwise().sum();
    double A = 0, At = 0;
    for (int m = 0; m < M; ++m) {
      const double c = weight[m] * power[m];
      A += c;
      if (std::abs(fft::bin_frequency(m, M, g.dt)) >= 0.9 * kmax) At += c;
    }
    A *= g.dx / (M * g.dt);
    At *= g.dx / (M * g.dt);
    out.per_chart.push_back(A);
    tail += At;
    total += A;
  }
  const double n = atlas.size();
  out.value = 2 * n * *std::max_element(out.per_chart.begin(), out.per_chart.end());
  out.tail_fraction = total > 0 ? tail / total : 0.0;
  out.divergent = out.tail_fraction > 1e-5;
  return out;
}

BoundConstants assemble_constants(double Cprime, double c0, double c2, double m,
                                  double delta_max) {
  require(m > 0, ErrorCode::InvalidArgument, "mass must be positive");
  require(std::isfinite(Cprime) && std::isfinite(c0) && std::isfinite(c2) &&
              std::isfinite(delta_max),
          ErrorCode::NonFinite, "bound constants must be finite");
  BoundConstants b;
  b.Cprime = Cprime;
  b.C = Cprime / (m * m);
  b.c0 = c0;
  b.c2 = c2;
  b.delta_max = delta_max;
  b.c = m * m * c0 + c2 + delta_max;
  b.mass = m;
  return b;
}

}  // namespace qeilab::construct
