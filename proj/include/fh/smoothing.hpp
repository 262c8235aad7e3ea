#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fh/sample_set.hpp"

namespace fh {

enum class BaseTag {
  GaussianBase,  // per-coordinate pi^{-1/2} e^{-u^2} times an even polynomial
  CauchyBase     // per-coordinate pi^{-1} (1+u^2)^{-1}, order 2 only
};

std::string to_string(BaseTag base);
BaseTag base_tag_from_string(const std::string& s);

/// Product smoothing kernel K(u) = prod_i kappa(u_i) of a given order r.
/// For the Gaussian base, kappa(u) = (sum_l poly[l] u^{2l}) e^{-u^2} with the
/// polynomial solving the moment system; r = 2 gives kappa = pi^{-1/2} e^{-u^2}.
/// Higher-order kernels are signed.
struct SmoothingKernel {
  BaseTag base = BaseTag::GaussianBase;
  int order = 2;
  int dim = 1;
  std::vector<double> poly;  // even-power coefficients; empty for the Cauchy base

  double eval1d(double u) const;
  double eval(const Eigen::VectorXd& u) const;
};

/// Builds the order-r product kernel; r must be even and >= 2. The Cauchy base
/// only supports r = 2.
SmoothingKernel build_order_kernel(int r, int d, BaseTag base);

SmoothingKernel kernel_from_json_string(const std::string& json_text);
std::string kernel_to_json_string(const SmoothingKernel& K);

struct MomentEntry {
  std::vector<int> alpha;
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
};

struct MomentReport {
  double integral = 0.0;
  double integral_error = 0.0;
  std::vector<MomentEntry> vanishing;  // signed moments, 0 < |alpha| <= r-1
  std::vector<MomentEntry> theta;      // Theta(alpha) for |alpha| = r
  bool order_ok = false;
  bool quadrature_ok = true;
  std::string to_json_string() const;
};

/// Quadrature audit of the order-r moment conditions at the given tolerance.
MomentReport check_order(const SmoothingKernel& K, int r, double tol = 1e-6);

/// (P_n * K_h)(x) = (1/(n h^d)) sum_i K((x - X_i)/h). Signed for order > 2.
double kde_eval(const SmoothingKernel& K, double h, const SampleSet& X,
                const Eigen::VectorXd& x);

/// Batch evaluation over the rows of `grid` (g x d).
Eigen::VectorXd kde_on_grid(const SmoothingKernel& K, double h, const SampleSet& X,
                            const Eigen::MatrixXd& grid);

enum class BandwidthMode { L1Optimal, SupNorm };

/// n^{-1/(2s+d)} (L1-optimal) or (n/log n)^{-1/(2s+d)} (sup-norm), times `constant`.
double bandwidth_rule(int n, int s, int d, BandwidthMode mode, double constant = 1.0);

/// Order condition r > s + d/2 used by the experiment configs.
bool order_condition_ok(int r, int s, int d);

}  // namespace fh
