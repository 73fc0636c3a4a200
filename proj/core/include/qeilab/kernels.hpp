#pragma once

// Discretized bikernel calculus: pairings, positive-type witnesses, Schur
// products, spectral decompositions, mollified pairing ladders and Sobolev
// cone-integral decay diagnostics.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "qeilab/grid.hpp"

namespace qeilab::kernels {

using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using cmat = Eigen::MatrixXcd;

// A complex kernel on a finite set of quadrature sites. With `density` set,
// pair(K, f, g) = sum conj(f_a) K_ab g_b w_a w_b, i.e. K is a density with
// respect to the site quadrature (the discrete delta_mu is diag(1/w)).
// Without it, the weights are not applied.
struct KernelMatrix {
  cmat values;
  rvec weights;
  bool density = true;
  std::optional<grid::SpacetimeGrid> grid;

  Eigen::Index size() const { return values.rows(); }
};

KernelMatrix on_grid(const grid::SpacetimeGrid& g, cmat values);
KernelMatrix with_weights(rvec weights, cmat values);

// Discrete delta_mu: diag(1 / w_a).
KernelMatrix identity_density(const grid::SpacetimeGrid& g);
KernelMatrix identity_density(const rvec& weights);
// f(x) conj(f(y)) as a density.
KernelMatrix rank_one(const grid::TestFunction& f);

std::complex<double> pair(const KernelMatrix& K, const cvec& f, const cvec& g);
std::complex<double> pair(const KernelMatrix& K, const grid::TestFunction& f,
                          const grid::TestFunction& g);

// The Hermitian form diag(sqrt w) K diag(sqrt w) (or K itself when not a density).
cmat weighted_form(const KernelMatrix& K);

struct PositivityWitness {
  double min_eigenvalue = 0;
  double norm = 0;  // spectral radius of the weighted form
  double tolerance = 0;
  double hermitian_defect = 0;  // ||K - K^H|| / ||K|| (Frobenius)
  bool hermitized = false;
  bool positive = false;
};

PositivityWitness positivity_check(const KernelMatrix& K, double rel_tol = 1e-8);

KernelMatrix schur_product(const KernelMatrix& a, const KernelMatrix& b);

KernelMatrix add(const KernelMatrix& a, const KernelMatrix& b, std::complex<double> beta = 1.0);
KernelMatrix scale(const KernelMatrix& a, std::complex<double> s);
KernelMatrix transpose(const KernelMatrix& a);

struct HsTerm {
  double weight;  // x_j >= 0
  cvec psi;       // as a function on the sites, orthonormal in the weighted inner product
};

// K = sum_j x_j psi_j psi_j^* with x_j >= 0. Throws NotPositive when the
// witness fails at `rel_tol`.
std::vector<HsTerm> hs_decompose(const KernelMatrix& K, double rel_tol = 1e-8);
KernelMatrix hs_reconstruct(const std::vector<HsTerm>& terms, const KernelMatrix& shape);

// (eta_lambda (x) eta_lambda) * K on the kernel's grid.
KernelMatrix mollify(const KernelMatrix& K, const grid::Mollifier& eta, double lambda);

struct LadderReport {
  std::vector<double> lambdas;
  std::vector<double> values;       // p(lambda), real part
  std::vector<double> imag_parts;
  std::vector<double> differences;  // |p(l_{r+1}) - p(l_r)|
  std::vector<double> ratios;       // successive difference ratios
  double tolerance = 0;
  bool positive = true;    // every rung >= -tolerance
  bool convergent = true;  // differences non-increasing beyond noise
  double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

// p(lambda) = sum_ab K1^(l)_ab K2^(l)_ab w_a w_b for each rung.
LadderReport mollified_pairing_limit(const KernelMatrix& k1, const KernelMatrix& k2,
                                     const grid::Mollifier& eta,
                                     const std::vector<double>& ladder, double rel_tol = 1e-8);

// Plain sum_ab A_ab B_ab w_a w_b: the pairing of two densities.
std::complex<double> kernel_pairing(const KernelMatrix& a, const KernelMatrix& b);

// Open convex cone {k : alpha (k.p) > |k - (k.p) p|} in R^2, coordinates (k_t, k_x).
struct ConeSpec {
  Eigen::Vector2d direction{1.0, 0.0};
  double alpha = 1.0;
  double s = 0.0;
  std::vector<double> cutoffs;

  bool contains(double kt, double kx) const;
};

struct ConeLadder {
  std::vector<double> cutoffs;
  std::vector<double> partial;  // I(K_r)
  std::vector<double> ratios;   // I(K_{r+1}) / I(K_r)
  double threshold = 1e-2;
  bool bounded = false;
};

// Cone ladder of a 2-d grid spectrum; `threshold` is the ratio-test slack.
ConeLadder cone_sobolev_integral(const grid::Spectrum& spec, const ConeSpec& cone,
                                 double threshold = 1e-2);
ConeLadder cone_sobolev_integral(const grid::TestFunction& localized, const ConeSpec& cone,
                                 double threshold = 1e-2);

// 1-d spectra: samples at frequencies k with a cell width dk; the "cone" is
// the open half line of sign `side`.
struct Spectrum1D {
  std::vector<double> k;
  std::vector<std::complex<double>> values;
  double dk = 1.0;
};

ConeLadder ray_sobolev_integral(const Spectrum1D& spec, int side, double s,
                                const std::vector<double>& cutoffs, double threshold = 1e-2,
                                double k_power = 0.0);

struct DecayFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  double band_lo = 0;  // slope -/+ 2 stderr
  double band_hi = 0;
  int used = 0;
  bool below_noise = false;
};

// Least-squares slope of log|value| against log|k| for the samples with
// sign(k) == side, skipping the lowest quartile of |k| and anything under
// noise_floor * max|value|. Throws InvalidArgument when fewer than 16
// frequencies lie on the ray at all.
DecayFit decay_exponent(const Spectrum1D& spec, int side, double noise_floor = 1e-14,
                        double k_max = 0.0);

// Samples of a 2-d spectrum along the lattice axis ray (+/- time or
// +/- space), as a 1-d spectrum in |k|.
Spectrum1D axis_ray(const grid::Spectrum& spec, int axis);

}  // namespace qeilab::kernels
