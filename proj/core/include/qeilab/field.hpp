#pragma once

// Mode sums for the massive free scalar on the cylinder.
//
// Modes: psi_{n,+}(t,x) = exp(-i w_n t + i k_n x), psi_{n,-} = conj(psi_{n,+}),
// k_n = 2 pi n / L, w_n = sqrt(k_n^2 + m^2), normalization (2 w_n L)^{-1/2}.
// A quasi-free two-point function is stored as
//   w2(x, y) = sum c_{n,s} psi_{n,s}(x) conj(psi_{n,s}(y)) + phi(x) phi(y),
// phi a real classical solution (coherent states only).

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "qeilab/grid.hpp"
#include "qeilab/kernels.hpp"

namespace qeilab::field {

using cvec = Eigen::VectorXcd;

struct ModeBasis {
  double m = 1;
  double L = 0;
  int N_max = 0;

  int count() const { return 2 * N_max + 1; }
  double k(int n) const;
  double omega(int n) const;
  double omega_max() const { return omega(N_max); }
  // exp(sign i (-w_n t + k_n x)) on the grid sites, without the normalization.
  cvec mode(const grid::SpacetimeGrid& g, int n, int sign) const;
};

ModeBasis make_basis(double m, double L, int N_max);

// Modes must sit below the spatial and temporal Nyquist frequencies.
void check_resolution(const ModeBasis& b, const grid::SpacetimeGrid& g);

double bose(double beta, double omega);

struct Vacuum {};
struct Thermal {
  double beta = 1;
};
struct ModeAmplitude {
  int n = 0;
  std::complex<double> a;
};
struct Coherent {
  std::vector<ModeAmplitude> amplitudes;
};
struct Occupation {
  int n = 0;
  int count = 1;
};
struct Particles {
  std::vector<Occupation> occupations;
};

using StateSpec = std::variant<Vacuum, Thermal, Coherent, Particles>;

std::string kind(const StateSpec& s);

// phi(t,x) = sum_n (2 w_n L)^{-1/2} 2 Re(a_n exp(-i w_n t + i k_n x)).
struct ClassicalSolution {
  ModeBasis basis;
  std::vector<ModeAmplitude> amplitudes;

  double value(double t, double x) const;
  double d_t(double t, double x) const;
  double d_x(double t, double x) const;
  double d_tt(double t, double x) const;
  double d_xx(double t, double x) const;
  cvec sample(const grid::SpacetimeGrid& g) const;
  // sum |a_n|^2 w_n, the conserved slice energy.
  double energy() const;
};

ClassicalSolution make_solution(const ModeBasis& b, std::vector<ModeAmplitude> amplitudes);
// A cos(m t): a_0 = A sqrt(2 m L) / 2.
ClassicalSolution zero_mode_solution(const ModeBasis& b, double A);

struct ModeTerm {
  int n = 0;
  int sign = 1;
  double coeff = 0;
};

// sum_a h_a conj(e_{n,s}(a)) w_a for every mode, e_{n,s} the unnormalized plane wave;
// index (n + N_max) * 2 + (s < 0).
struct ModeProjections {
  int N_max = 0;
  std::vector<std::complex<double>> values;

  std::complex<double> operator()(int n, int sign) const {
    return values[static_cast<std::size_t>((n + N_max) * 2 + (sign < 0 ? 1 : 0))];
  }
};

ModeProjections project(const ModeBasis& b, const grid::SpacetimeGrid& g, const cvec& h);

class TwoPoint {
 public:
  TwoPoint(ModeBasis basis, std::vector<ModeTerm> terms,
           std::optional<ClassicalSolution> classical = std::nullopt);

  const ModeBasis& basis() const { return basis_; }
  const std::vector<ModeTerm>& terms() const { return terms_; }
  const std::optional<ClassicalSolution>& classical() const { return classical_; }

  std::complex<double> evaluate(double t, double x, double tp, double xp) const;
  // sum conj(f_a) w2(a, b) g_b w_a w_b.
  std::complex<double> pair(const grid::SpacetimeGrid& g, const cvec& f, const cvec& h) const;
  std::complex<double> pair(const grid::TestFunction& f, const grid::TestFunction& h) const;
  kernels::KernelMatrix sampled(const grid::SpacetimeGrid& g) const;
  // w2 - w1 (x) w1.
  TwoPoint truncated() const;

 private:
  ModeBasis basis_;
  std::vector<ModeTerm> terms_;
  std::optional<ClassicalSolution> classical_;
};

// Throws CutoffInsufficient when a thermal tail exp(-beta w_N) exceeds 1e-12,
// InvalidArgument for amplitudes or occupations outside the basis.
TwoPoint two_point(const StateSpec& s, const ModeBasis& b);

// iE(f, h) = w2(f, h) - w2(h, f), evaluated on the vacuum.
std::complex<double> commutator(const ModeBasis& b, const grid::TestFunction& f,
                                const grid::TestFunction& h);

struct StressTensor {
  double T00 = 0;
  double T01 = 0;
  double T11 = 0;
};

StressTensor classical_stress(const ClassicalSolution& phi, double t, double x);

// int g lim (w2 - w2_vac), by mode sums.
double wick_square(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& g);

// int F^2 lim D_00 (w2 - w2_vac), F real.
double stress_expectation(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& F);

double one_point(const StateSpec& s, const ModeBasis& b, double t, double x);

// w2(f, f) for real f.
double smeared_field_square(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& f);

}  // namespace qeilab::field
