#pragma once

// Independent reference computations and hand-rolled generators for the
// test suites. Nothing here calls the library's FFT or mode projections:
// every sum is written out site by site.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qeilab/field.hpp"
#include "qeilab/grid.hpp"

namespace oracle {

using cd = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
inline constexpr double pi = std::numbers::pi;

// sum_a f_a exp(-i (kt t_a + kx x_a)) w_site.
inline cd fourier_at(const qeilab::grid::SpacetimeGrid& g, const cvec& f, double kt, double kx) {
  cd s = 0;
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j)
      s += f[g.index(i, j)] * std::polar(1.0, -(kt * g.t(i) + kx * g.x(j)));
  return s * g.w_site();
}

// sum_a h_a conj(psi_{n,sign}(a)) w with psi_{n,+} = (2 w L)^{-1/2} exp(-i w t + i k x).
inline cd mode_projection(const qeilab::field::ModeBasis& b, const qeilab::grid::SpacetimeGrid& g,
                          const cvec& h, int n, int sign) {
  const double om = b.omega(n);
  const double k = b.k(n);
  cd s = 0;
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j)
      s += h[g.index(i, j)] * std::polar(1.0, sign * (om * g.t(i) - k * g.x(j)));
  return s * g.w_site() / std::sqrt(2 * om * b.L);
}

// Vacuum pair(w2, f, h) = sum_n conj(P_n(f)) P_n(h) with the + modes.
inline cd vacuum_pair(const qeilab::field::ModeBasis& b, const qeilab::grid::SpacetimeGrid& g,
                      const cvec& f, const cvec& h) {
  cd s = 0;
  for (int n = -b.N_max; n <= b.N_max; ++n)
    s += std::conj(mode_projection(b, g, f, n, +1)) * mode_projection(b, g, h, n, +1);
  return s;
}

// Composite Simpson rule with one Richardson step.
template <class Fn>
double integrate(Fn&& fn, double a, double b, int panels = 4000) {
  const auto simpson = [&](int n) {
    const double h = (b - a) / n;
    double s = fn(a) + fn(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
    return s * h / 3;
  };
  const double coarse = simpson(panels);
  const double fine = simpson(2 * panels);
  return fine + (fine - coarse) / 15.0;
}

// Random smooth real test function: a bump with random centre and radii
// inside [-T + margin, T - margin] x circle.
inline qeilab::grid::TestFunction random_bump(const qeilab::grid::SpacetimeGrid& g,
                                              std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r_t = 0.3 + 0.4 * u(rng) * (g.T - margin);
  const double t0 = (g.T - margin - r_t) * (2 * u(rng) - 1);
  const double r_x = 0.4 + 0.8 * u(rng);
  const double x0 = g.L * u(rng);
  return qeilab::grid::bump(g, {t0, x0, r_t, r_x, false, true});
}

// Random complex combination of two random bumps.
inline cvec random_complex_function(const qeilab::grid::SpacetimeGrid& g, std::mt19937_64& rng,
                                    double margin) {
  std::normal_distribution<double> n(0.0, 1.0);
  const auto a = random_bump(g, rng, margin);
  const auto b = random_bump(g, rng, margin);
  return cd(n(rng), n(rng)) * a.values + cd(n(rng), n(rng)) * b.values;
}

// B B^H / n with B complex Gaussian of shape n x rank.
inline cmat random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  cmat B(n, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = gauss(rng);
      B(i, j) = cd(re, gauss(rng));
    }
  return B * B.adjoint() / static_cast<double>(n);
}

// Fock space of a few modes, each truncated at `cap` quanta; annihilators
// as dense matrices on the tensor product.
class FockSpace {
 public:
  FockSpace(std::vector<int> modes, int cap) : modes_(std::move(modes)), cap_(cap) {
    dim_ = 1;
    for (std::size_t q = 0; q < modes_.size(); ++q) dim_ *= cap_ + 1;
  }

  int dim() const { return dim_; }

  int index(const std::vector<int>& occ) const {
    int idx = 0;
    for (std::size_t q = 0; q < modes_.size(); ++q) idx = idx * (cap_ + 1) + occ[q];
    return idx;
  }

  cmat annihilator(int slot) const {
    cmat a = cmat::Zero(dim_, dim_);
    std::vector<int> occ(modes_.size());
    for (int s = 0; s < dim_; ++s) {
      int r = s;
      for (int q = static_cast<int>(modes_.size()) - 1; q >= 0; --q) {
        occ[static_cast<std::size_t>(q)] = r % (cap_ + 1);
        r /= cap_ + 1;
      }
      const int nq = occ[static_cast<std::size_t>(slot)];
      if (nq == 0) continue;
      auto lower = occ;
      lower[static_cast<std::size_t>(slot)] -= 1;
      a(index(lower), s) = std::sqrt(static_cast<double>(nq));
    }
    return a;
  }

  // phi(g) = sum_n (P_n^+(g) a_n + P_n^-(g) a_n^dagger) with the direct projections.
  cmat smeared_field(const qeilab::field::ModeBasis& b, const qeilab::grid::SpacetimeGrid& g,
                     const cvec& h) const {
    cmat phi = cmat::Zero(dim_, dim_);
    for (std::size_t q = 0; q < modes_.size(); ++q) {
      const cmat a = annihilator(static_cast<int>(q));
      // int h psi_{n,+} = conj of the projection of conj(h)
      const cd plus = std::conj(mode_projection(b, g, h.conjugate(), modes_[q], +1));
      const cd minus = std::conj(mode_projection(b, g, h.conjugate(), modes_[q], -1));
      phi += plus * a + minus * a.adjoint();
    }
    return phi;
  }

  const std::vector<int>& modes() const { return modes_; }

 private:
  std::vector<int> modes_;
  int cap_;
  int dim_ = 1;
};

}  // namespace oracle
