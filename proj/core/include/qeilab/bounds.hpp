#pragma once

// Verifiers for the smeared-field quantum inequality, the classical energy
// inequality of coherent states, and the pointwise field bound in 1+1
// dimensions.

#include <optional>
#include <string>
#include <vector>

#include "qeilab/construct.hpp"
#include "qeilab/field.hpp"
#include "qeilab/grid.hpp"

namespace qeilab::bounds {

struct LabeledState {
  std::string id;
  field::StateSpec state;
  double parameter = 0;  // sweep coordinate used for plotting
};

// Kernels u and w for a smearing F, with the per-mode vacuum-route pairings
// P[n,s] = u(conj psi, conj psi) and Q[n,s] = w(conj psi, conj psi).
struct ReferenceKernels {
  field::ModeBasis basis;
  construct::ChartAtlas atlas;
  construct::ChartKernel U;
  construct::DerivativeKernel W;
  std::vector<double> P;  // index (n + N_max) * 2 + (s < 0)
  std::vector<double> Q;
  double c0 = 0;
  double c2 = 0;
};

ReferenceKernels reference_kernels(const grid::TestFunction& F, const field::ModeBasis& basis,
                                   int l, int threads = 1);

// The state-dependent ingredients of the inequality chain.
struct StateTerms {
  double omega_u = 0;  // w2(u)
  double omega_w = 0;  // w2(w)
  double stress = 0;   // w(T(F^2))
  double wick = 0;     // w(:phi^2:(F^2))
  double delta = 0;    // (w2(w) - c2) - (stress - m^2 wick / 2)
};

StateTerms state_terms(const ReferenceKernels& ref, const field::StateSpec& s,
                       const grid::TestFunction& F);

struct QeiRow {
  std::string id;
  std::string kind;
  double parameter = 0;
  double lhs = 0;
  double omega_u = 0;
  double omega_w = 0;
  double stress = 0;
  double wick = 0;
  double rhs = 0;
  double margin1 = 0;
  double margin2 = 0;
  double margin3 = 0;
  double delta = 0;
  double scale = 0;
  bool pass = false;
};

struct QeiReport {
  construct::BoundConstants constants;
  construct::CprimeResult cprime;
  int order = 3;
  double rel_tol = 1e-6;
  bool delta_nonpositive = true;  // every state has delta <= 0
  std::vector<QeiRow> rows;
  bool pass = false;
};

struct QeiOptions {
  int l = 3;
  double rel_tol = 1e-6;
  std::optional<double> delta_max;  // default: max(0, observed delta)
  int threads = 1;
};

// f real with F == 1 on supp f.
QeiReport qei_verify(const std::vector<LabeledState>& states, const grid::TestFunction& f,
                     const grid::TestFunction& F, const field::ModeBasis& basis,
                     const QeiOptions& opt = {});

// The f = 0 constant c = m^2 c0 + c2 + delta_max over the given family.
double reference_constant(const ReferenceKernels& ref, const std::vector<LabeledState>& states,
                          const grid::TestFunction& F);

struct ClassicalRow {
  std::string id;
  double stress = 0;            // w(T(F^2))
  double classical_energy = 0;  // int T00[w1] F^2 by grid quadrature
  double difference = 0;
  double slack = 0;  // stress + c - classical_energy
  double scale = 0;
  bool pass = false;
};

struct ClassicalQeiReport {
  double c = 0;
  double rel_tol = 1e-6;
  std::vector<ClassicalRow> rows;
  bool pass = false;
};

// Coherent states only.
ClassicalQeiReport classical_qei(const std::vector<LabeledState>& states,
                                 const field::ModeBasis& basis, const grid::TestFunction& F,
                                 double c, double rel_tol = 1e-6);

// int_{|x-x0|<half} T00[phi](t, x) dx (full circle when clamped).
double slice_energy(const field::ClassicalSolution& phi, double t, double x0, double half,
                    bool full_circle);

struct RegionSpec {
  double t0 = 0;
  double x0 = 0;
  double R = 0;
  double L = 0;
  grid::Box W;          // |t-t0| < R, |x-x0| < 3R
  bool slice_clamped = false;  // 2R >= L: V0 is the full circle
  std::vector<char> mask_W;
  std::vector<char> mask_Vplus;
  std::vector<char> mask_Vminus;
  grid::SpacetimeGrid grid;

  // Half width R + 2|tau| of the slice V_tau, and whether it wraps the circle.
  double slice_half(double tau) const { return R + 2 * std::abs(tau); }
  bool slice_full(double tau) const { return 2 * slice_half(tau) >= L; }
  double slice_length(double tau) const;
  double cell_area() const { return grid.w_site(); }
};

RegionSpec make_regions(double t0, double x0, double R, const grid::SpacetimeGrid& g);

struct EnergyEstimate {
  double C0_emp = 1;
  std::vector<double> taus;
  std::vector<double> ratios;
  bool degenerate = false;
  bool bounded = true;  // C0_emp <= 1 + 1e-6
};

EnergyEstimate energy_estimate_check(const field::ClassicalSolution& phi, const RegionSpec& r,
                                     int samples = 24);

struct MorreyResult {
  double sup_sq = 0;
  double slice_energy = 0;
  double ratio = 0;
  double C4 = 0;       // sharp analytic constant
  double C4_spec = 0;  // (2/min(1,m^2)) max(1/|V0|, 1), reported only
  bool pass = false;
};

double morrey_constant(double m, double slice_length, bool full_circle, double L);
MorreyResult morrey_bound(const field::ClassicalSolution& phi, const RegionSpec& r);

struct PointwiseConstants {
  double C0 = 1;
  double C1 = 1;
  double C2 = 0;
  double C4 = 0;
  double C4_spec = 0;
  double c_qei = 0;  // f = 0 constant of the smeared inequality
  double C = 0;      // C4 / C2
  double c = 0;      // c_qei + 1/C, or the override
};

struct PointwiseRow {
  std::string id;
  std::string kind;
  double parameter = 0;
  double phi_abs = 0;
  double sup_sq = 0;
  double slice_energy = 0;
  double region_energy = 0;
  double smeared_energy = 0;  // int T00[w1] F^2
  double stress = 0;
  double rhs = 0;  // C (stress + c)
  double C0_emp = 1;
  double morrey_ratio = 0;
  // slack of each link, >= -tol to pass
  double link_morrey = 0;  // C4 E0 - |phi(x)|^2
  double link_energy = 0;  // region / C2 - E0
  double link_region = 0;  // smeared - region
  double link_qei = 0;     // stress + c_qei - smeared
  double link_final = 0;   // rhs - |phi(x)|
  double scale = 0;
  bool pass = false;
};

struct PointwiseReport {
  RegionSpec regions;
  PointwiseConstants constants;
  double rel_tol = 1e-6;
  std::vector<PointwiseRow> rows;
  bool pass = false;
};

struct PointwiseOptions {
  int l = 3;
  double rel_tol = 1e-6;
  std::optional<double> c_override;
  int threads = 1;
};

// F == 1 on a neighbourhood of W.
PointwiseReport pointwise_verify(const std::vector<LabeledState>& states, const RegionSpec& regions,
                                 const grid::TestFunction& F, const field::ModeBasis& basis,
                                 const PointwiseOptions& opt = {});

}  // namespace qeilab::bounds
