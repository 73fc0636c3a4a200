#include "qeilab/field.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "qeilab/error.hpp"
#include "qeilab/fft.hpp"

namespace qeilab::field {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

void check_mode(const ModeBasis& b, int n) {
  require(n >= -b.N_max && n <= b.N_max, ErrorCode::InvalidArgument,
          "mode index outside the basis");
}

void check_thermal_tail(const ModeBasis& b, double beta) {
  require(beta > 0, ErrorCode::InvalidArgument, "inverse temperature must be positive");
  require(std::exp(-beta * b.omega_max()) <= 1e-12, ErrorCode::CutoffInsufficient,
          "thermal tail exp(-beta w_N) above 1e-12; raise N_max");
}

std::map<int, int> occupation_table(const Particles& p, const ModeBasis& b) {
  std::map<int, int> occ;
  for (const auto& o : p.occupations) {
    check_mode(b, o.n);
    require(o.count >= 0, ErrorCode::InvalidArgument, "negative occupation");
    occ[o.n] += o.count;
  }
  return occ;
}

// Mode phase exp(-i Omega t + i K x) with the derivative factors of one
// term of a classical solution.
struct Wave {
  cplx alpha;
  double Omega;
  double K;
};

std::vector<Wave> waves(const ClassicalSolution& phi) {
  std::vector<Wave> out;
  for (const auto& a : phi.amplitudes) {
    const double w = phi.basis.omega(a.n);
    const double k = phi.basis.k(a.n);
    const cplx alpha = a.a / std::sqrt(2 * w * phi.basis.L);
    out.push_back({alpha, w, k});
    out.push_back({std::conj(alpha), -w, -k});
  }
  return out;
}

}  // namespace

double ModeBasis::k(int n) const { return 2 * kPi * n / L; }
double ModeBasis::omega(int n) const { return std::sqrt(k(n) * k(n) + m * m); }

cvec ModeBasis::mode(const grid::SpacetimeGrid& g, int n, int sign) const {
  cvec out(g.sites());
  const double w = omega(n);
  const double kn = k(n);
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j)
      out[g.index(i, j)] = std::polar(1.0, sign * (-w * g.t(i) + kn * g.x(j)));
  return out;
}

ModeBasis make_basis(double m, double L, int N_max) {
  require(m > 0, ErrorCode::InvalidArgument, "mass must be positive");
  require(L > 0, ErrorCode::InvalidArgument, "circumference must be positive");
  require(N_max >= 0, ErrorCode::InvalidArgument, "mode cutoff must be non-negative");
  return ModeBasis{m, L, N_max};
}

void check_resolution(const ModeBasis& b, const grid::SpacetimeGrid& g) {
  require(std::abs(b.L - g.L) <= 1e-12 * g.L, ErrorCode::GridMismatch,
          "basis and grid circumferences differ");
  require(2 * b.N_max < g.Nx, ErrorCode::UnresolvedScale,
          "spatial grid does not resolve the mode cutoff");
  require(b.omega_max() * g.dt < kPi, ErrorCode::UnresolvedScale,
          "time step does not resolve the highest mode frequency");
}

double bose(double beta, double omega) { return 1.0 / std::expm1(beta * omega); }

std::string kind(const StateSpec& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Vacuum>) return "vacuum";
        if constexpr (std::is_same_v<V, Thermal>) return "thermal";
        if constexpr (std::is_same_v<V, Coherent>) return "coherent";
        return "particles";
      },
      s);
}

double ClassicalSolution::value(double t, double x) const {
  double s = 0;
  for (const auto& w : waves(*this)) s += (w.alpha * std::polar(1.0, -w.Omega * t + w.K * x)).real();
  return s;
}

double ClassicalSolution::d_t(double t, double x) const {
  double s = 0;
  for (const auto& w : waves(*this))
    s += (cplx(0, -w.Omega) * w.alpha * std::polar(1.0, -w.Omega * t + w.K * x)).real();
  return s;
}

double ClassicalSolution::d_x(double t, double x) const {
  double s = 0;
  for (const auto& w : waves(*this))
    s += (cplx(0, w.K) * w.alpha * std::polar(1.0, -w.Omega * t + w.K * x)).real();
  return s;
}

double ClassicalSolution::d_tt(double t, double x) const {
  double s = 0;
  for (const auto& w : waves(*this))
    s += (-w.Omega * w.Omega * w.alpha * std::polar(1.0, -w.Omega * t + w.K * x)).real();
  return s;
}

double ClassicalSolution::d_xx(double t, double x) const {
  double s = 0;
  for (const auto& w : waves(*this))
    s += (-w.K * w.K * w.alpha * std::polar(1.0, -w.Omega * t + w.K * x)).real();
  return s;
}

cvec ClassicalSolution::sample(const grid::SpacetimeGrid& g) const {
  cvec out(g.sites());
  for (int i = 0; i < g.Nt; ++i)
    for (int j = 0; j < g.Nx; ++j) out[g.index(i, j)] = value(g.t(i), g.x(j));
  return out;
}

double ClassicalSolution::energy() const {
  double e = 0;
  for (const auto& a : amplitudes) e += std::norm(a.a) * basis.omega(a.n);
  return e;
}

ClassicalSolution make_solution(const ModeBasis& b, std::vector<ModeAmplitude> amplitudes) {
  std::map<int, cplx> merged;
  for (const auto& a : amplitudes) {
    check_mode(b, a.n);
    require(std::isfinite(a.a.real()) && std::isfinite(a.a.imag()), ErrorCode::NonFinite,
            "mode amplitude");
    merged[a.n] += a.a;
  }
  ClassicalSolution s{b, {}};
  for (const auto& [n, a] : merged) s.amplitudes.push_back({n, a});
  return s;
}

ClassicalSolution zero_mode_solution(const ModeBasis& b, double A) {
  return make_solution(b, {{0, cplx(A * std::sqrt(2 * b.m * b.L) / 2, 0)}});
}

ModeProjections project(const ModeBasis& b, const grid::SpacetimeGrid& g, const cvec& h) {
  check_resolution(b, g);
  require(h.size() == g.sites(), ErrorCode::GridMismatch, "test function size");
  Eigen::MatrixXcd rows(g.Nt, g.Nx);
  cvec row(g.Nx);
  for (int i = 0; i < g.Nt; ++i) {
    for (int j = 0; j < g.Nx; ++j) row[j] = h[g.index(i, j)];
    rows.row(i) = fft::forward(row).transpose();
  }
  ModeProjections P{b.N_max, std::vector<cplx>(static_cast<std::size_t>(2 * b.count()))};
  const double w_site = g.w_site();
  for (int n = -b.N_max; n <= b.N_max; ++n) {
    const double w = b.omega(n);
    const int qp = ((n % g.Nx) + g.Nx) % g.Nx;
    const int qm = ((-n % g.Nx) + g.Nx) % g.Nx;
    cplx plus = 0, minus = 0;
    for (int i = 0; i < g.Nt; ++i) {
      const cplx ph = std::polar(1.0, w * g.t(i));
      plus += ph * rows(i, qp);
      minus += std::conj(ph) * rows(i, qm);
    }
    const auto base = static_cast<std::size_t>((n + b.N_max) * 2);
    P.values[base] = plus * w_site;
    P.values[base + 1] = minus * w_site;
  }
  return P;
}

TwoPoint::TwoPoint(ModeBasis basis, std::vector<ModeTerm> terms,
                   std::optional<ClassicalSolution> classical)
    : basis_(basis), terms_(std::move(terms)), classical_(std::move(classical)) {}

cplx TwoPoint::evaluate(double t, double x, double tp, double xp) const {
  cplx s = 0;
  for (const auto& term : terms_) {
    const double w = basis_.omega(term.n);
    const double k = basis_.k(term.n);
    s += term.coeff * std::polar(1.0, term.sign * (-w * (t - tp) + k * (x - xp)));
  }
  if (classical_) s += classical_->value(t, x) * classical_->value(tp, xp);
  return s;
}

cplx TwoPoint::pair(const grid::SpacetimeGrid& g, const cvec& f, const cvec& h) const {
  const ModeProjections Pf = project(basis_, g, f);
  const ModeProjections Ph = project(basis_, g, h);
  cplx s = 0;
  for (const auto& term : terms_) s += term.coeff * std::conj(Pf(term.n, term.sign)) * Ph(term.n, term.sign);
  if (classical_) {
    const cvec phi = classical_->sample(g);
    s += std::conj((f.cwiseProduct(phi)).sum() * g.w_site()) * (h.cwiseProduct(phi)).sum() * g.w_site();
  }
  return s;
}

cplx TwoPoint::pair(const grid::TestFunction& f, const grid::TestFunction& h) const {
  require(f.grid == h.grid, ErrorCode::GridMismatch, "test functions on different grids");
  return pair(f.grid, f.values, h.values);
}

kernels::KernelMatrix TwoPoint::sampled(const grid::SpacetimeGrid& g) const {
  check_resolution(basis_, g);
  const int N = g.sites();
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& term : terms_) {
    const cvec psi = basis_.mode(g, term.n, term.sign);
    K.noalias() += term.coeff * psi * psi.adjoint();
  }
  if (classical_) {
    const cvec phi = classical_->sample(g);
    K.noalias() += phi * phi.transpose();
  }
  return kernels::on_grid(g, std::move(K));
}

TwoPoint TwoPoint::truncated() const { return TwoPoint(basis_, terms_, std::nullopt); }

TwoPoint two_point(const StateSpec& s, const ModeBasis& b) {
  std::vector<ModeTerm> terms;
  auto norm = [&](int n) { return 1.0 / (2 * b.omega(n) * b.L); };
  for (int n = -b.N_max; n <= b.N_max; ++n) terms.push_back({n, 1, norm(n)});
  std::optional<ClassicalSolution> classical;
  if (const auto* th = std::get_if<Thermal>(&s)) {
    check_thermal_tail(b, th->beta);
    for (int n = -b.N_max; n <= b.N_max; ++n) {
      const double nb = bose(th->beta, b.omega(n)) * norm(n);
      terms[static_cast<std::size_t>(n + b.N_max)].coeff += nb;
      terms.push_back({n, -1, nb});
    }
  } else if (const auto* p = std::get_if<Particles>(&s)) {
    for (const auto& [n, count] : occupation_table(*p, b)) {
      const double extra = count * norm(n);
      terms[static_cast<std::size_t>(n + b.N_max)].coeff += extra;
      terms.push_back({n, -1, extra});
    }
  } else if (const auto* c = std::get_if<Coherent>(&s)) {
    classical = make_solution(b, c->amplitudes);
  }
  return TwoPoint(b, std::move(terms), std::move(classical));
}

cplx commutator(const ModeBasis& b, const grid::TestFunction& f, const grid::TestFunction& h) {
  const TwoPoint vac = two_point(Vacuum{}, b);
  return vac.pair(f, h) - vac.pair(h, f);
}

StressTensor classical_stress(const ClassicalSolution& phi, double t, double x) {
  const double p = phi.value(t, x);
  const double pt = phi.d_t(t, x);
  const double px = phi.d_x(t, x);
  const double m2 = phi.basis.m * phi.basis.m;
  return {0.5 * (pt * pt + px * px + m2 * p * p), pt * px, 0.5 * (pt * pt + px * px - m2 * p * p)};
}

double wick_square(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& g) {
  const double integral = g.quadrature_real();
  if (const auto* th = std::get_if<Thermal>(&s)) {
    check_thermal_tail(b, th->beta);
    double sum = 0;
    for (int n = -b.N_max; n <= b.N_max; ++n)
      sum += bose(th->beta, b.omega(n)) / (b.omega(n) * b.L);
    return sum * integral;
  }
  if (const auto* p = std::get_if<Particles>(&s)) {
    double sum = 0;
    for (const auto& [n, count] : occupation_table(*p, b)) sum += count / (b.omega(n) * b.L);
    return sum * integral;
  }
  if (const auto* c = std::get_if<Coherent>(&s)) {
    const cvec phi = make_solution(b, c->amplitudes).sample(g.grid);
    return (g.values.real().array() * phi.real().array().square()).sum() * g.grid.w_site();
  }
  return 0.0;
}

double stress_expectation(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& F) {
  const grid::SpacetimeGrid& g = F.grid;
  const Eigen::VectorXd F2 = F.values.real().array().square();
  const double integral = F2.sum() * g.w_site();
  if (const auto* th = std::get_if<Thermal>(&s)) {
    check_thermal_tail(b, th->beta);
    double sum = 0;
    for (int n = -b.N_max; n <= b.N_max; ++n) sum += bose(th->beta, b.omega(n)) * b.omega(n);
    return sum / b.L * integral;
  }
  if (const auto* p = std::get_if<Particles>(&s)) {
    double sum = 0;
    for (const auto& [n, count] : occupation_table(*p, b)) sum += count * b.omega(n);
    return sum / b.L * integral;
  }
  if (const auto* c = std::get_if<Coherent>(&s)) {
    // Bilinear in the mode amplitudes: 1/2 sum alpha alpha' (D_t D_t' + D_x D_x' + m^2) G(Omega+Omega', K+K').
    const auto ws = waves(make_solution(b, c->amplitudes));
    const double m2 = b.m * b.m;
    cplx total = 0;
    for (const auto& w1 : ws)
      for (const auto& w2 : ws) {
        const double Om = w1.Omega + w2.Omega;
        const double K = w1.K + w2.K;
        cplx G = 0;
        for (int i = 0; i < g.Nt; ++i)
          for (int j = 0; j < g.Nx; ++j) {
            const double v = F2[g.index(i, j)];
            if (v != 0.0) G += v * std::polar(1.0, -Om * g.t(i) + K * g.x(j));
          }
        const cplx dt = cplx(0, -w1.Omega) * cplx(0, -w2.Omega);
        const cplx dx = cplx(0, w1.K) * cplx(0, w2.K);
        total += 0.5 * w1.alpha * w2.alpha * (dt + dx + m2) * G;
      }
    return total.real() * g.w_site();
  }
  return 0.0;
}

double one_point(const StateSpec& s, const ModeBasis& b, double t, double x) {
  if (const auto* c = std::get_if<Coherent>(&s)) return make_solution(b, c->amplitudes).value(t, x);
  return 0.0;
}

double smeared_field_square(const StateSpec& s, const ModeBasis& b, const grid::TestFunction& f) {
  const double scale = f.values.cwiseAbs().maxCoeff();
  require(f.values.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1e-300),
          ErrorCode::InvalidArgument, "smeared field square needs a real test function");
  const cplx v = two_point(s, b).pair(f, f);
  require(std::abs(v.imag()) <= 1e-10 * std::max(1.0, std::abs(v.real())), ErrorCode::NonFinite,
          "smeared field square is not real");
  return v.real();
}

}  // namespace qeilab::field
