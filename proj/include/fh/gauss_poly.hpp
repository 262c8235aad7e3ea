#pragma once

#include <cmath>
#include <vector>

namespace fh {

/// One-dimensional function f(x) = (sum_m coeffs[m] x^{2m}) * exp(-rate x^2).
/// Closed under convolution with polynomial-times-Gaussian smoothing kernels,
/// which is what makes the smoothed distances computable without quadrature.
struct GaussPoly {
  double rate = 0.0;
  std::vector<double> coeffs{1.0};  // even powers: coeffs[m] multiplies x^{2m}

  double operator()(double x) const {
    double x2 = x * x, v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x2 + *it;
    double e = rate * x2;
    return e > 700.0 ? 0.0 : v * std::exp(-e);
  }
};

/// Convolution (1/h) kappa(./h) * f where kappa(z) = (sum_l p[l] z^{2l}) e^{-z^2}.
/// Exact: the result is again polynomial-times-Gaussian with rate
/// f.rate / (1 + f.rate h^2).
GaussPoly smooth_gauss_poly(const std::vector<double>& kernel_poly, double h,
                            const GaussPoly& f);

}  // namespace fh
