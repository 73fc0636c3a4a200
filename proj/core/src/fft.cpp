#include "qeilab/fft.hpp"

#include <numbers>

#include <unsupported/Eigen/FFT>

#include "qeilab/error.hpp"

namespace qeilab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::GridMismatch: return "grid mismatch";
    case ErrorCode::UnresolvedScale: return "unresolved scale";
    case ErrorCode::NonFinite: return "non-finite entries";
    case ErrorCode::NotPositive: return "positivity failure";
    case ErrorCode::Coverage: return "chart coverage failure";
    case ErrorCode::CutoffInsufficient: return "cutoff insufficiency";
    case ErrorCode::EmptyCone: return "empty cone";
    case ErrorCode::Divergent: return "divergent";
  }
  return "unknown";
}

namespace fft {

namespace {
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> e;
  return e;
}
}  // namespace

cvec forward(const cvec& in) {
  std::vector<std::complex<double>> src(in.data(), in.data() + in.size());
  std::vector<std::complex<double>> dst;
  engine().fwd(dst, src);
  return Eigen::Map<cvec>(dst.data(), static_cast<Eigen::Index>(dst.size()));
}

cvec inverse(const cvec& in) {
  std::vector<std::complex<double>> src(in.data(), in.data() + in.size());
  std::vector<std::complex<double>> dst;
  engine().inv(dst, src);  // Eigen scales by 1/n
  return Eigen::Map<cvec>(dst.data(), static_cast<Eigen::Index>(dst.size()));
}

double bin_frequency(int m, int n, double h) {
  const int idx = (m <= n / 2) ? m : m - n;
  return 2.0 * std::numbers::pi * idx / (n * h);
}

}  // namespace fft
}  // namespace qeilab

#include <cmath>

#include "qeilab/quadrature.hpp"

namespace qeilab::quadrature {

Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
  }
  return r;
}

Rule composite(double a, double b, int panels, int per_panel) {
  const Rule base = gauss_legendre(per_panel);
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < per_panel; ++i) {
      r.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1));
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

}  // namespace qeilab::quadrature
