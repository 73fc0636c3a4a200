#include "qeilab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "qeilab/error.hpp"

namespace qeilab::kernels {

namespace {

void require_same_shape(const KernelMatrix& a, const KernelMatrix& b, const char* what) {
  require(a.values.rows() == b.values.rows() && a.weights.size() == b.weights.size(),
          ErrorCode::GridMismatch, what);
  if (a.grid && b.grid) require(*a.grid == *b.grid, ErrorCode::GridMismatch, what);
  require(a.density == b.density, ErrorCode::GridMismatch, what);
}

rvec grid_weights(const grid::SpacetimeGrid& g) { return rvec::Constant(g.sites(), g.w_site()); }

}  // namespace

KernelMatrix on_grid(const grid::SpacetimeGrid& g, cmat values) {
  require(values.rows() == g.sites() && values.cols() == g.sites(), ErrorCode::GridMismatch,
          "kernel dimensions must equal (Nt*Nx)^2");
  return KernelMatrix{std::move(values), grid_weights(g), true, g};
}

KernelMatrix with_weights(rvec weights, cmat values) {
  require(values.rows() == weights.size() && values.cols() == weights.size(),
          ErrorCode::GridMismatch, "kernel dimensions must match the weights");
  return KernelMatrix{std::move(values), std::move(weights), true, std::nullopt};
}

KernelMatrix identity_density(const grid::SpacetimeGrid& g) {
  KernelMatrix K = identity_density(grid_weights(g));
  K.grid = g;
  return K;
}

KernelMatrix identity_density(const rvec& weights) {
  cmat v = cmat::Zero(weights.size(), weights.size());
  for (Eigen::Index a = 0; a < weights.size(); ++a) v(a, a) = 1.0 / weights[a];
  return KernelMatrix{v, weights, true, std::nullopt};
}

KernelMatrix rank_one(const grid::TestFunction& f) {
  return on_grid(f.grid, f.values * f.values.adjoint());
}

std::complex<double> pair(const KernelMatrix& K, const cvec& f, const cvec& g) {
  require(f.size() == K.size() && g.size() == K.size(), ErrorCode::GridMismatch,
          "test function does not live on the kernel's sites");
  if (!K.density) return f.dot(K.values * g);
  const cvec wf = f.cwiseProduct(K.weights.cast<std::complex<double>>());
  const cvec wg = g.cwiseProduct(K.weights.cast<std::complex<double>>());
  return wf.dot(K.values * wg);  // dot() conjugates the first argument
}

std::complex<double> pair(const KernelMatrix& K, const grid::TestFunction& f,
                          const grid::TestFunction& g) {
  if (K.grid)
    require(f.grid == *K.grid && g.grid == *K.grid, ErrorCode::GridMismatch,
            "test function grid differs from kernel grid");
  return pair(K, f.values, g.values);
}

cmat weighted_form(const KernelMatrix& K) {
  if (!K.density) return K.values;
  const rvec s = K.weights.cwiseSqrt();
  return s.asDiagonal() * K.values * s.asDiagonal();
}

PositivityWitness positivity_check(const KernelMatrix& K, double rel_tol) {
  require(K.values.allFinite(), ErrorCode::NonFinite, "positivity_check");
  PositivityWitness w;
  w.tolerance = rel_tol;
  cmat A = weighted_form(K);
  const double fro = A.norm();
  if (fro == 0) {
    w.positive = true;
    return w;
  }
  w.hermitian_defect = (A - A.adjoint()).norm() / fro;
  A = 0.5 * (A + A.adjoint()).eval();
  w.hermitized = w.hermitian_defect > 1e-8;
  Eigen::SelfAdjointEigenSolver<cmat> es(A, Eigen::EigenvaluesOnly);
  const rvec& ev = es.eigenvalues();
  w.min_eigenvalue = ev.minCoeff();
  w.norm = ev.cwiseAbs().maxCoeff();
  w.positive = w.min_eigenvalue >= -rel_tol * w.norm;
  return w;
}

KernelMatrix schur_product(const KernelMatrix& a, const KernelMatrix& b) {
  require_same_shape(a, b, "schur_product");
  KernelMatrix r = a;
  r.values = a.values.cwiseProduct(b.values);
  return r;
}

KernelMatrix add(const KernelMatrix& a, const KernelMatrix& b, std::complex<double> beta) {
  require_same_shape(a, b, "add");
  KernelMatrix r = a;
  r.values += beta * b.values;
  return r;
}

KernelMatrix scale(const KernelMatrix& a, std::complex<double> s) {
  KernelMatrix r = a;
  r.values *= s;
  return r;
}

KernelMatrix transpose(const KernelMatrix& a) {
  KernelMatrix r = a;
  r.values = a.values.transpose();
  return r;
}

std::vector<HsTerm> hs_decompose(const KernelMatrix& K, double rel_tol) {
  const PositivityWitness w = positivity_check(K, rel_tol);
  require(w.positive, ErrorCode::NotPositive, "hs_decompose needs a positive-type kernel");
  cmat A = weighted_form(K);
  A = 0.5 * (A + A.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<cmat> es(A);
  const rvec inv_sqrt_w =
      K.density ? rvec(K.weights.cwiseSqrt().cwiseInverse()) : rvec(rvec::Ones(K.size()));
  std::vector<HsTerm> terms;
  const double floor = rel_tol * w.norm;
  for (Eigen::Index j = es.eigenvalues().size() - 1; j >= 0; --j) {
    const double x = es.eigenvalues()[j];
    if (x <= floor) continue;
    // K = W^{-1/2} A W^{-1/2}; psi_j = W^{-1/2} e_j is orthonormal in <.,.>_w.
    terms.push_back({x, inv_sqrt_w.cast<std::complex<double>>().cwiseProduct(es.eigenvectors().col(j))});
  }
  return terms;
}

KernelMatrix hs_reconstruct(const std::vector<HsTerm>& terms, const KernelMatrix& shape) {
  KernelMatrix r = shape;
  r.values.setZero();
  for (const auto& t : terms) r.values += t.weight * t.psi * t.psi.adjoint();
  return r;
}

KernelMatrix mollify(const KernelMatrix& K, const grid::Mollifier& eta, double lambda) {
  require(K.grid.has_value(), ErrorCode::InvalidArgument, "mollify needs a grid kernel");
  const auto& g = *K.grid;
  const int ht = static_cast<int>(std::floor(lambda / g.dt));
  for (int i = 0; i < g.Nt; ++i) {
    bool nonzero = false;
    for (int j = 0; j < g.Nx && !nonzero; ++j) {
      const int a = g.index(i, j);
      nonzero = K.values.row(a).cwiseAbs().maxCoeff() > 0 || K.values.col(a).cwiseAbs().maxCoeff() > 0;
    }
    if (nonzero)
      require(i - ht >= 0 && i + ht < g.Nt, ErrorCode::InvalidArgument,
              "kernel mollification would reach the time boundary");
  }
  const Eigen::MatrixXd M = grid::mollifier_matrix(g, eta, lambda);
  KernelMatrix r = K;
  // (M K M^T) with M applied to the density in each argument.
  r.values = M.cast<std::complex<double>>() * K.values * M.transpose().cast<std::complex<double>>();
  return r;
}

std::complex<double> kernel_pairing(const KernelMatrix& a, const KernelMatrix& b) {
  require_same_shape(a, b, "kernel_pairing");
  const cmat wa = weighted_form(a);
  const cmat wb = weighted_form(b);
  return wa.cwiseProduct(wb).sum();
}

LadderReport mollified_pairing_limit(const KernelMatrix& k1, const KernelMatrix& k2,
                                     const grid::Mollifier& eta,
                                     const std::vector<double>& ladder, double rel_tol) {
  require(!ladder.empty(), ErrorCode::InvalidArgument, "empty lambda ladder");
  for (std::size_t r = 1; r < ladder.size(); ++r)
    require(ladder[r] < ladder[r - 1], ErrorCode::InvalidArgument,
            "lambda ladder must be strictly decreasing");
  LadderReport rep;
  rep.tolerance = rel_tol;
  double vmax = 0;
  for (double lam : ladder) {
    const KernelMatrix a = mollify(k1, eta, lam);
    const KernelMatrix b = mollify(k2, eta, lam);
    const std::complex<double> p = kernel_pairing(a, b);
    const double scale = weighted_form(a).norm() * weighted_form(b).norm();
    rep.lambdas.push_back(lam);
    rep.values.push_back(p.real());
    rep.imag_parts.push_back(p.imag());
    if (p.real() < -rel_tol * scale) rep.positive = false;
    vmax = std::max(vmax, std::abs(p.real()));
  }
  const double noise = 1e-12 * std::max(vmax, 1e-300);
  for (std::size_t r = 1; r < rep.values.size(); ++r)
    rep.differences.push_back(std::abs(rep.values[r] - rep.values[r - 1]));
  for (std::size_t r = 1; r < rep.differences.size(); ++r) {
    const double prev = rep.differences[r - 1];
    rep.ratios.push_back(prev > 0 ? rep.differences[r] / prev : 0.0);
    if (rep.differences[r] > prev + noise) rep.convergent = false;
  }
  return rep;
}

bool ConeSpec::contains(double kt, double kx) const {
  const double along = kt * direction[0] + kx * direction[1];
  const double pt = kt - along * direction[0];
  const double px = kx - along * direction[1];
  return alpha * along > std::hypot(pt, px);
}

namespace {

struct WeightedSample {
  double kabs;
  double value;  // (1+|k|^2)^s |f|^2 * cell
};

ConeLadder accumulate(std::vector<WeightedSample> samples, const std::vector<double>& cutoffs,
                      double threshold) {
  require(!cutoffs.empty(), ErrorCode::InvalidArgument, "empty cutoff ladder");
  for (std::size_t r = 1; r < cutoffs.size(); ++r)
    require(cutoffs[r] > cutoffs[r - 1], ErrorCode::InvalidArgument,
            "cutoff ladder must be increasing");
  require(!samples.empty(), ErrorCode::EmptyCone, "cone contains no lattice frequencies");
  std::sort(samples.begin(), samples.end(),
            [](const WeightedSample& a, const WeightedSample& b) { return a.kabs < b.kabs; });
  ConeLadder out;
  out.cutoffs = cutoffs;
  out.threshold = threshold;
  std::size_t q = 0;
  double acc = 0;
  for (double K : cutoffs) {
    while (q < samples.size() && samples[q].kabs <= K) acc += samples[q++].value;
    out.partial.push_back(acc);
  }
  for (std::size_t r = 1; r < out.partial.size(); ++r) {
    const double a = out.partial[r - 1];
    const double b = out.partial[r];
    out.ratios.push_back(a > 0 ? b / a : (b > 0 ? std::numeric_limits<double>::infinity() : 1.0));
  }
  out.bounded = out.ratios.empty() || out.ratios.back() <= 1.0 + threshold;
  return out;
}

}  // namespace

ConeLadder cone_sobolev_integral(const grid::Spectrum& spec, const ConeSpec& cone,
                                 double threshold) {
  std::vector<WeightedSample> samples;
  const double cell = spec.cell_volume();
  for (int m = 0; m < spec.grid.Nt; ++m)
    for (int n = 0; n < spec.grid.Nx; ++n) {
      const double kt = spec.k_t(m);
      const double kx = spec.k_x(n);
      if (!cone.contains(kt, kx)) continue;
      const double k2 = kt * kt + kx * kx;
      samples.push_back(
          {std::sqrt(k2), std::pow(1 + k2, cone.s) * std::norm(spec.values(m, n)) * cell});
    }
  return accumulate(std::move(samples), cone.cutoffs, threshold);
}

ConeLadder cone_sobolev_integral(const grid::TestFunction& localized, const ConeSpec& cone,
                                 double threshold) {
  return cone_sobolev_integral(grid::fourier(localized), cone, threshold);
}

ConeLadder ray_sobolev_integral(const Spectrum1D& spec, int side, double s,
                                const std::vector<double>& cutoffs, double threshold,
                                double k_power) {
  std::vector<WeightedSample> samples;
  for (std::size_t q = 0; q < spec.k.size(); ++q) {
    const double k = spec.k[q];
    if (k * side <= 0) continue;
    const double ka = std::abs(k);
    samples.push_back({ka, std::pow(1 + ka * ka, s) * std::pow(ka, k_power) *
                               std::norm(spec.values[q]) * spec.dk});
  }
  return accumulate(std::move(samples), cutoffs, threshold);
}

DecayFit decay_exponent(const Spectrum1D& spec, int side, double noise_floor, double k_max) {
  std::vector<std::pair<double, double>> ray;  // (|k|, |value|)
  for (std::size_t q = 0; q < spec.k.size(); ++q) {
    const double k = spec.k[q];
    if (k * side <= 0) continue;
    if (k_max > 0 && std::abs(k) > k_max) continue;
    ray.emplace_back(std::abs(k), std::abs(spec.values[q]));
  }
  require(ray.size() >= 16, ErrorCode::InvalidArgument,
          "decay_exponent needs at least 16 frequencies on the ray");
  std::sort(ray.begin(), ray.end());
  double vmax = 0;
  for (const auto& [k, v] : ray) vmax = std::max(vmax, v);
  DecayFit fit;
  const std::size_t skip = ray.size() / 4;
  std::vector<double> xs, ys;
  for (std::size_t q = skip; q < ray.size(); ++q) {
    if (ray[q].second <= noise_floor * vmax) break;
    xs.push_back(std::log(ray[q].first));
    ys.push_back(std::log(ray[q].second));
  }
  fit.used = static_cast<int>(xs.size());
  if (xs.size() < 16) {
    fit.below_noise = true;
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    sxx += (xs[q] - mx) * (xs[q] - mx);
    sxy += (xs[q] - mx) * (ys[q] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    const double r = ys[q] - fit.intercept - fit.slope * xs[q];
    rss += r * r;
  }
  fit.stderr_slope = std::sqrt(rss / std::max(n - 2, 1.0) / sxx);
  fit.band_lo = fit.slope - 2 * fit.stderr_slope;
  fit.band_hi = fit.slope + 2 * fit.stderr_slope;
  return fit;
}

Spectrum1D axis_ray(const grid::Spectrum& spec, int axis) {
  Spectrum1D out;
  if (axis == 0) {
    out.dk = 2 * std::numbers::pi / (2 * spec.grid.T);
    for (int m = 0; m < spec.grid.Nt; ++m) {
      out.k.push_back(spec.k_t(m));
      out.values.push_back(spec.values(m, 0));
    }
  } else {
    out.dk = 2 * std::numbers::pi / spec.grid.L;
    for (int n = 0; n < spec.grid.Nx; ++n) {
      out.k.push_back(spec.k_x(n));
      out.values.push_back(spec.values(0, n));
    }
  }
  return out;
}

}  // namespace qeilab::kernels
