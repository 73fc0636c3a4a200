#pragma once

#include <utility>
#include <vector>

namespace qeilab::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points on [-1, 1] (Newton on P_n).
Rule gauss_legendre(int n);

// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
Rule composite(double a, double b, int panels, int per_panel);

}  // namespace qeilab::quadrature
