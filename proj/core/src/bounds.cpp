#include "qeilab/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qeilab/error.hpp"
#include "qeilab/quadrature.hpp"

namespace qeilab::bounds {

namespace {

using cvec = Eigen::VectorXcd;

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::size_t slot(const field::ModeBasis& b, int n, int sign) {
  return static_cast<std::size_t>((n + b.N_max) * 2 + (sign < 0 ? 1 : 0));
}

grid::TestFunction squared(const grid::TestFunction& F) {
  grid::TestFunction F2 = F;
  F2.values = F.values.real().array().square().matrix().cast<std::complex<double>>();
  F2.bump.reset();
  return F2;
}

void require_real(const grid::TestFunction& f, const char* what) {
  const double scale = f.values.cwiseAbs().maxCoeff();
  require(f.values.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1e-300),
          ErrorCode::InvalidArgument, what);
}

std::optional<field::ClassicalSolution> one_point_solution(const field::StateSpec& s,
                                                           const field::ModeBasis& b) {
  if (const auto* c = std::get_if<field::Coherent>(&s)) return field::make_solution(b, c->amplitudes);
  return std::nullopt;
}

double smeared_classical_energy(const field::ClassicalSolution& phi, const grid::TestFunction& F) {
  const auto& g = F.grid;
  double acc = 0;
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) {
      const double Fv = F.values[g.index(i, j)].real();
      if (Fv == 0.0) continue;
      acc += Fv * Fv * field::classical_stress(phi, g.t(i), g.x(j)).T00;
    }
  return acc * g.w_site();
}

// Highest wavenumber present in the solution, used to size quadrature panels.
double bandwidth(const field::ClassicalSolution& phi) {
  double k = phi.basis.m;
  for (const auto& a : phi.amplitudes) k = std::max(k, phi.basis.omega(a.n));
  return k;
}

double region_energy(const field::ClassicalSolution& phi, const RegionSpec& r) {
  const double kb = bandwidth(phi);
  const int panels = std::max(4, static_cast<int>(std::ceil(2 * r.R * kb / 3.0)) + 2);
  const auto rule = quadrature::composite(r.t0 - r.R, r.t0 + r.R, panels, 12);
  double acc = 0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    acc += rule.weights[q] * slice_energy(phi, rule.nodes[q], r.x0, 3 * r.R, r.W.full_circle);
  return acc;
}

double sup_square_on_arc(const field::ClassicalSolution& phi, double t, double lo, double hi) {
  const int n = 4096;
  const double h = (hi - lo) / n;
  double best = -1;
  int arg = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(phi.value(t, lo + i * h));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  // Golden-section refinement on the bracketing cells.
  double a = lo + std::max(0, arg - 1) * h;
  double b = lo + std::min(n, arg + 1) * h;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (std::abs(phi.value(t, c)) > std::abs(phi.value(t, d)))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  best = std::max({best, std::abs(phi.value(t, a)), std::abs(phi.value(t, b))});
  return best * best;
}

}  // namespace

ReferenceKernels reference_kernels(const grid::TestFunction& F, const field::ModeBasis& basis,
                                   int l, int threads) {
  const auto& g = F.grid;
  field::check_resolution(basis, g);
  require_real(F, "smearing function must be real");
  construct::ChartAtlas atlas = construct::build_atlas_cylinder(g, F.support);
  construct::ChartKernel U = construct::build_u(grid::zero_function(g), F, atlas, l);
  construct::DerivativeKernel W = construct::build_w(F, atlas, l);
  const int modes = 2 * basis.count();
  std::vector<double> P(static_cast<std::size_t>(modes)), Q(static_cast<std::size_t>(modes));
  // The forms act on unnormalized plane waves; the x phase drops out column
  // by column, so modes n and -n give identical values: evaluate n >= 0 and
  // mirror.
  parallel_for(2 * (basis.N_max + 1), threads, [&](int idx) {
    const int n = idx / 2;
    const int sign = idx % 2 == 0 ? 1 : -1;
    // unnormalized conj psi_{n,sign} = exp(i sign (w t - k x))
    const double w = sign * basis.omega(n);
    const double p = U.plane_wave_form(w);
    const double q = W.plane_wave_form(w, basis.k(n));
    P[slot(basis, n, sign)] = P[slot(basis, -n, sign)] = p;
    Q[slot(basis, n, sign)] = Q[slot(basis, -n, sign)] = q;
  });
  double c0 = 0, c2 = 0;
  for (int n = -basis.N_max; n <= basis.N_max; ++n) {
    const double norm = 1.0 / (2 * basis.omega(n) * basis.L);
    c0 += norm * P[slot(basis, n, 1)];
    c2 += norm * Q[slot(basis, n, 1)];
  }
  return ReferenceKernels{basis, std::move(atlas), std::move(U), std::move(W),
                          std::move(P), std::move(Q), c0, c2};
}

StateTerms state_terms(const ReferenceKernels& ref, const field::StateSpec& s,
                       const grid::TestFunction& F) {
  const auto& b = ref.basis;
  const field::TwoPoint tp = field::two_point(s, b);
  StateTerms out;
  for (const auto& term : tp.terms()) {
    out.omega_u += term.coeff * ref.P[slot(b, term.n, term.sign)];
    out.omega_w += term.coeff * ref.Q[slot(b, term.n, term.sign)];
  }
  if (tp.classical()) {
    const cvec phi = tp.classical()->sample(F.grid);
    out.omega_u += ref.U.quad_form(phi);
    out.omega_w += ref.W.quad_form(phi);
  }
  out.stress = field::stress_expectation(s, b, F);
  out.wick = field::wick_square(s, b, squared(F));
  out.delta = (out.omega_w - ref.c2) - (out.stress - 0.5 * b.m * b.m * out.wick);
  return out;
}

double reference_constant(const ReferenceKernels& ref, const std::vector<LabeledState>& states,
                          const grid::TestFunction& F) {
  double dmax = 0;
  for (const auto& st : states) dmax = std::max(dmax, state_terms(ref, st.state, F).delta);
  return ref.basis.m * ref.basis.m * ref.c0 + ref.c2 + dmax;
}

QeiReport qei_verify(const std::vector<LabeledState>& states, const grid::TestFunction& f,
                     const grid::TestFunction& F, const field::ModeBasis& basis,
                     const QeiOptions& opt) {
  require(f.grid == F.grid, ErrorCode::GridMismatch, "f and F live on different grids");
  require(opt.rel_tol > 0, ErrorCode::InvalidArgument, "tolerance must be positive");
  require_real(f, "the smeared field needs a real test function");
  for (int a = 0; a < f.grid.sites(); ++a)
    if (f.values[a] != 0.0)
      require(std::abs(F.values[a] - 1.0) <= 1e-12, ErrorCode::Coverage,
              "F must equal one on the support of f");

  const ReferenceKernels ref = reference_kernels(F, basis, opt.l, opt.threads);
  QeiReport rep;
  rep.order = opt.l;
  rep.rel_tol = opt.rel_tol;
  rep.cprime = construct::bound_constant_Cprime(f, F, ref.atlas, opt.l);

  std::vector<StateTerms> terms(states.size());
  std::vector<double> lhs(states.size());
  parallel_for(static_cast<int>(states.size()), opt.threads, [&](int i) {
    const auto& st = states[static_cast<std::size_t>(i)].state;
    terms[static_cast<std::size_t>(i)] = state_terms(ref, st, F);
    lhs[static_cast<std::size_t>(i)] = field::two_point(st, basis).pair(f, f).real();
  });

  double observed = 0;
  for (const auto& t : terms) {
    observed = std::max(observed, t.delta);
    if (t.delta > 0) rep.delta_nonpositive = false;
  }
  rep.constants = construct::assemble_constants(rep.cprime.value, ref.c0, ref.c2, basis.m,
                                                opt.delta_max.value_or(observed));
  const auto& K = rep.constants;
  rep.pass = !rep.cprime.divergent;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& t = terms[i];
    QeiRow row;
    row.id = states[i].id;
    row.kind = field::kind(states[i].state);
    row.parameter = states[i].parameter;
    row.lhs = lhs[i];
    row.omega_u = t.omega_u;
    row.omega_w = t.omega_w;
    row.stress = t.stress;
    row.wick = t.wick;
    row.delta = t.delta;
    row.rhs = K.C * (t.stress + K.c);
    row.margin1 = K.Cprime * t.omega_u - row.lhs;
    row.margin2 = t.omega_w;
    row.margin3 = row.rhs - row.lhs;
    row.scale = std::max({1.0, std::abs(row.lhs), std::abs(K.Cprime * t.omega_u),
                          std::abs(t.omega_w), K.C * std::abs(t.stress), K.C * std::abs(K.c)});
    const double tol = opt.rel_tol * row.scale;
    row.pass = row.margin1 >= -tol && row.margin2 >= -tol && row.margin3 >= -tol;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ClassicalQeiReport classical_qei(const std::vector<LabeledState>& states,
                                 const field::ModeBasis& basis, const grid::TestFunction& F,
                                 double c, double rel_tol) {
  ClassicalQeiReport rep;
  rep.c = c;
  rep.rel_tol = rel_tol;
  rep.pass = true;
  for (const auto& st : states) {
    const auto phi = one_point_solution(st.state, basis);
    require(phi.has_value(), ErrorCode::InvalidArgument, "classical_qei takes coherent states only");
    ClassicalRow row;
    row.id = st.id;
    row.stress = field::stress_expectation(st.state, basis, F);
    row.classical_energy = smeared_classical_energy(*phi, F);
    row.difference = row.stress - row.classical_energy;
    row.slack = row.stress + c - row.classical_energy;
    row.scale = std::max({1.0, std::abs(row.stress), std::abs(row.classical_energy)});
    row.pass = std::abs(row.difference) <= rel_tol * row.scale && row.slack >= -rel_tol * row.scale;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

double slice_energy(const field::ClassicalSolution& phi, double t, double x0, double half,
                    bool full_circle) {
  const double L = phi.basis.L;
  const double lo = full_circle ? 0.0 : x0 - half;
  const double hi = full_circle ? L : x0 + half;
  const double kb = bandwidth(phi);
  const int panels = std::max(4, static_cast<int>(std::ceil((hi - lo) * kb / 3.0)) + 2);
  const auto rule = quadrature::composite(lo, hi, panels, 12);
  double acc = 0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    acc += rule.weights[q] * field::classical_stress(phi, t, rule.nodes[q]).T00;
  return acc;
}

double RegionSpec::slice_length(double tau) const {
  return slice_full(tau) ? L : 2 * slice_half(tau);
}

RegionSpec make_regions(double t0, double x0, double R, const grid::SpacetimeGrid& g) {
  require(R > 0, ErrorCode::InvalidArgument, "region scale must be positive");
  require(t0 - R > -g.T && t0 + R < g.T, ErrorCode::InvalidArgument,
          "region scale too large for the time window");
  RegionSpec r;
  r.t0 = t0;
  r.x0 = x0;
  r.R = R;
  r.L = g.L;
  r.grid = g;
  r.slice_clamped = 2 * R >= g.L;
  r.W = grid::Box{t0 - R, t0 + R, x0, 3 * R, 6 * R >= g.L};
  const auto n = static_cast<std::size_t>(g.sites());
  r.mask_W.assign(n, 0);
  r.mask_Vplus.assign(n, 0);
  r.mask_Vminus.assign(n, 0);
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) {
      const double tau = g.t(i) - t0;
      const double d = std::abs(grid::periodic_offset(g.x(j), x0, g.L));
      const auto a = static_cast<std::size_t>(g.index(i, j));
      if (std::abs(tau) < R && (r.W.full_circle || d < 3 * R)) r.mask_W[a] = 1;
      const bool in_slice = r.slice_full(tau) || d < r.slice_half(tau);
      if (tau > 0 && tau < R && in_slice) r.mask_Vplus[a] = 1;
      if (tau < 0 && -tau < R && in_slice) r.mask_Vminus[a] = 1;
    }
  return r;
}

EnergyEstimate energy_estimate_check(const field::ClassicalSolution& phi, const RegionSpec& r,
                                     int samples) {
  require(samples >= 2, ErrorCode::InvalidArgument, "need at least two slice samples");
  EnergyEstimate est;
  const double E0 = slice_energy(phi, r.t0, r.x0, r.R, r.slice_clamped);
  const int per_side = samples / 2;
  for (int s = 0; s < per_side; ++s)
    for (int sign : {-1, 1}) {
      const double tau = sign * r.R * (s + 0.5) / per_side;
      est.taus.push_back(tau);
      const double Et = slice_energy(phi, r.t0 + tau, r.x0, r.slice_half(tau), r.slice_full(tau));
      double ratio = 1.0;
      if (E0 <= 0.0 && Et <= 0.0)
        est.degenerate = true;
      else
        ratio = E0 / Et;
      est.ratios.push_back(ratio);
    }
  est.C0_emp = *std::max_element(est.ratios.begin(), est.ratios.end());
  est.bounded = est.C0_emp <= 1.0 + 1e-6;
  return est;
}

double morrey_constant(double m, double slice_length, bool full_circle, double L) {
  const double pref = 2.0 / std::min(1.0, m * m);
  if (full_circle) return pref * 0.5 / std::tanh(L / 2);
  return pref / std::tanh(slice_length);
}

MorreyResult morrey_bound(const field::ClassicalSolution& phi, const RegionSpec& r) {
  MorreyResult out;
  const double m = phi.basis.m;
  const double len = r.slice_clamped ? r.L : 2 * r.R;
  const double lo = r.slice_clamped ? 0.0 : r.x0 - r.R;
  const double hi = r.slice_clamped ? r.L : r.x0 + r.R;
  out.sup_sq = sup_square_on_arc(phi, r.t0, lo, hi);
  out.slice_energy = slice_energy(phi, r.t0, r.x0, r.R, r.slice_clamped);
  out.C4 = morrey_constant(m, len, r.slice_clamped, r.L);
  out.C4_spec = 2.0 / std::min(1.0, m * m) * std::max(1.0 / len, 1.0);
  if (out.slice_energy <= 0.0) {
    require(out.sup_sq == 0.0, ErrorCode::NotPositive,
            "zero slice energy with a nonzero field value");
    out.ratio = 0.0;
  } else {
    out.ratio = out.sup_sq / out.slice_energy;
  }
  out.pass = out.ratio <= out.C4;
  return out;
}

PointwiseReport pointwise_verify(const std::vector<LabeledState>& states, const RegionSpec& regions,
                                 const grid::TestFunction& F, const field::ModeBasis& basis,
                                 const PointwiseOptions& opt) {
  require(F.grid == regions.grid, ErrorCode::GridMismatch, "regions and F live on different grids");
  require(opt.rel_tol > 0, ErrorCode::InvalidArgument, "tolerance must be positive");
  for (std::size_t a = 0; a < regions.mask_W.size(); ++a)
    if (regions.mask_W[a])
      require(std::abs(F.values[static_cast<Eigen::Index>(a)] - 1.0) <= 1e-12, ErrorCode::Coverage,
              "F must equal one on the region W");

  const ReferenceKernels ref = reference_kernels(F, basis, opt.l, opt.threads);
  PointwiseReport rep;
  rep.regions = regions;
  rep.rel_tol = opt.rel_tol;
  auto& K = rep.constants;
  K.C0 = 1.0;
  K.C1 = 1.0;
  K.C2 = 2 * regions.R / K.C0;
  const double len = regions.slice_clamped ? regions.L : 2 * regions.R;
  K.C4 = morrey_constant(basis.m, len, regions.slice_clamped, regions.L);
  K.C4_spec = 2.0 / std::min(1.0, basis.m * basis.m) * std::max(1.0 / len, 1.0);
  K.c_qei = reference_constant(ref, states, F);
  K.C = K.C4 / K.C2;
  K.c = opt.c_override.value_or(K.c_qei + 1.0 / K.C);

  rep.rows.resize(states.size());
  parallel_for(static_cast<int>(states.size()), opt.threads, [&](int i) {
    const auto& st = states[static_cast<std::size_t>(i)];
    const field::ClassicalSolution phi =
        one_point_solution(st.state, basis).value_or(field::make_solution(basis, {}));
    PointwiseRow row;
    row.id = st.id;
    row.kind = field::kind(st.state);
    row.parameter = st.parameter;
    row.phi_abs = std::abs(phi.value(regions.t0, regions.x0));
    const MorreyResult mor = morrey_bound(phi, regions);
    const EnergyEstimate est = energy_estimate_check(phi, regions);
    row.sup_sq = mor.sup_sq;
    row.slice_energy = mor.slice_energy;
    row.morrey_ratio = mor.ratio;
    row.C0_emp = est.C0_emp;
    row.region_energy = region_energy(phi, regions);
    row.smeared_energy = smeared_classical_energy(phi, F);
    row.stress = field::stress_expectation(st.state, basis, F);
    row.rhs = K.C * (row.stress + K.c);
    row.link_morrey = K.C4 * row.slice_energy - row.sup_sq;
    row.link_energy = row.region_energy / K.C2 - row.slice_energy;
    row.link_region = row.smeared_energy - row.region_energy;
    row.link_qei = row.stress + K.c_qei - row.smeared_energy;
    row.link_final = row.rhs - row.phi_abs;
    row.scale = std::max({1.0, row.phi_abs, K.C4 * row.slice_energy, row.region_energy / K.C2,
                          row.smeared_energy, std::abs(row.stress) + std::abs(K.c_qei),
                          std::abs(row.rhs)});
    const double tol = opt.rel_tol * row.scale;
    row.pass = row.link_morrey >= -tol && row.link_energy >= -tol && row.link_region >= -tol &&
               row.link_qei >= -tol && row.link_final >= -tol && est.bounded;
    rep.rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.pass; });
  return rep;
}

}  // namespace qeilab::bounds
