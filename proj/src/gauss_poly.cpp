#include "fh/gauss_poly.hpp"

#include <cmath>
#include <stdexcept>

namespace fh {

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
  return v;
}

// int w^{i} e^{-A w^2} dw, zero for odd i.
double gauss_moment(int i, double A) {
  if (i % 2) return 0.0;
  return std::tgamma((i + 1) / 2.0) * std::pow(A, -(i + 1) / 2.0);
}

}  // namespace

GaussPoly smooth_gauss_poly(const std::vector<double>& kernel_poly, double h,
                            const GaussPoly& f) {
  if (kernel_poly.empty()) throw std::invalid_argument("smooth_gauss_poly: empty kernel");
  if (h == 0.0) return f;  // K_0 = delta
  const double sigma = f.rate;
  const double A = 1.0 + sigma * h * h;
  const double mu_slope = sigma * h / A;  // argmax shift per unit x, B/A = mu_slope * x

  const int L = static_cast<int>(kernel_poly.size()) - 1;   // kernel degree in z^2
  const int M = static_cast<int>(f.coeffs.size()) - 1;      // target degree in x^2
  const int zmax = 2 * L + 2 * M;
  const int xmax = 2 * M + zmax;

  // Z[t][k]: coefficient of z^t x^k in p(z) * q(x - h z)
  std::vector<std::vector<double>> Z(zmax + 1, std::vector<double>(2 * M + 1, 0.0));
  for (int l = 0; l <= L; ++l) {
    if (kernel_poly[l] == 0.0) continue;
    for (int m = 0; m <= M; ++m) {
      if (f.coeffs[m] == 0.0) continue;
      for (int i = 0; i <= 2 * m; ++i) {
        double c = kernel_poly[l] * f.coeffs[m] * binom(2 * m, i) * std::pow(-h, i);
        Z[2 * l + i][2 * m - i] += c;
      }
    }
  }

  // int z^t e^{-A z^2 + 2 B z} dz = e^{B^2/A} sum_i C(t,i) (B/A)^{t-i} G_i(A),
  // with B = sigma h x; the e^{B^2/A} factor folds into the output rate sigma/A.
  std::vector<double> R(xmax + 1, 0.0);
  for (int t = 0; t <= zmax; ++t) {
    for (int i = 0; i <= t; i += 2) {
      double g = gauss_moment(i, A);
      double c = binom(t, i) * std::pow(mu_slope, t - i) * g;
      if (c == 0.0) continue;
      for (int k = 0; k <= 2 * M; ++k) {
        if (Z[t][k] == 0.0) continue;
        R[k + t - i] += Z[t][k] * c;
      }
    }
  }

  GaussPoly out;
  out.rate = sigma / A;
  out.coeffs.assign(xmax / 2 + 1, 0.0);
  for (int k = 0; k <= xmax; ++k) {
    if (k % 2 == 0)
      out.coeffs[k / 2] = R[k];
    // odd coefficients vanish by symmetry of even kernel and even target
  }
  while (out.coeffs.size() > 1 && std::abs(out.coeffs.back()) < 1e-300) out.coeffs.pop_back();
  return out;
}

}  // namespace fh
