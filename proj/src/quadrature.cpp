#include "fh/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace fh {

HermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(i / 2.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(M_PI);  // int e^{-z^2} dz
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

LegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  LegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

QuadResult integrate_simpson(const std::function<double(double)>& f, double lo, double hi,
                             double tol, int max_doublings, int n0) {
  auto simpson = [&](long long n) {
    double h = (hi - lo) / static_cast<double>(n);
    double s = f(lo) + f(hi);
    for (long long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
  };
  long long n = n0 % 2 ? n0 + 1 : n0;
  double prev = simpson(n);
  for (int it = 0; it < max_doublings; ++it) {
    n *= 2;
    double cur = simpson(n);
    double change = std::abs(cur - prev);
    if (change < tol * (1.0 + std::abs(cur))) return {cur, change, true};
    prev = cur;
  }
  return {prev, std::abs(prev) * tol * 10, false};
}

double integrate_trapezoid(const std::vector<double>& vals, double step) {
  if (vals.size() < 2) return 0.0;
  double s = 0.5 * (vals.front() + vals.back());
  for (size_t i = 1; i + 1 < vals.size(); ++i) s += vals[i];
  return s * step;
}

}  // namespace fh
