#pragma once

#include <functional>
#include <vector>

namespace fh {

/// Nodes/weights for integrals of the form int f(z) e^{-z^2} dz.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix of the (physicists') Hermite polynomials.
HermiteRule gauss_hermite(int n);

/// Nodes/weights for int_{-1}^{1} f(x) dx.
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix of the Legendre polynomials.
LegendreRule gauss_legendre(int n);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated
  bool converged = true;
};

// Composite-Simpson with interval doubling until |change| < tol (abs+rel).
QuadResult integrate_simpson(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-8, int max_doublings = 22, int n0 = 64);

// Trapezoid on a fixed uniform grid.
double integrate_trapezoid(const std::vector<double>& vals, double step);

}  // namespace fh
