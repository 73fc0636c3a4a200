#pragma once

// Thin wrapper over Eigen's FFT module. Forward transforms use the e^{-i k x}
// sign and no normalization; `inverse` divides by the length.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace qeilab::fft {

using cvec = Eigen::VectorXcd;

cvec forward(const cvec& in);
cvec inverse(const cvec& in);

// Angular frequency of DFT bin m on a lattice of n points with spacing h,
// using the symmetric index range m -> m or m - n.
double bin_frequency(int m, int n, double h);

}  // namespace qeilab::fft
