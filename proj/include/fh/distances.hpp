#pragma once

#include <Eigen/Dense>
#include <string>

#include "fh/kernels.hpp"
#include "fh/sample_set.hpp"
#include "fh/smoothing.hpp"

namespace fh {

struct OptimizerConfig {
  int grid_size = 64;     // coarse scan points over the parameter domain
  double xtol = 1e-9;     // golden-section bracket tolerance
  int max_evals = 10000;
};

struct DistanceEstimate {
  double value = 0.0;
  double arg_sup = 0.0;           // parameter attaining the supremum
  Eigen::VectorXd arg_point;      // location y for the K_X metric
  std::string method;             // closed_form | quadrature | v_statistic
  int evaluations = 0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double tol_achieved = 0.0;
  double quadrature_error = 0.0;  // only for the quadrature path
  bool budget_exhausted = false;
  std::string to_json_string() const;
};

/// V-statistic MMD^2 between empirical measures (U-statistic optional);
/// the V form is clamped at 0.
double mmd_squared(const KernelFamily& family, double param, const SampleSet& X,
                   const SampleSet& Y, bool u_statistic = false);

/// sup over the family parameter of sqrt(mmd_squared); coarse log grid plus
/// golden-section refinement.
DistanceEstimate sup_mmd(const KernelFamily& family, const SampleSet& X,
                         const SampleSet& Y, const OptimizerConfig& cfg = {});

/// Closed-form ||P_n * K_h - P_n||_{F_H} for the Gaussian family sigma in (0,a]
/// with the order-2 Gaussian-base kernel K = pi^{-d/2} e^{-||u||^2}.
DistanceEstimate smoothed_empirical_gauss(double a, double h, const SampleSet& X,
                                          const OptimizerConfig& cfg = {});

/// Same, for an arbitrary even-order Gaussian-base kernel (exact via the
/// polynomial-Gaussian convolution calculus).
DistanceEstimate smoothed_empirical_gauss_kernel(double a, const SmoothingKernel& K,
                                                 double h, const SampleSet& X,
                                                 const OptimizerConfig& cfg = {});

/// Closed-form ||P_n * K_h - P_n||_{F_H} for the product-Cauchy family
/// alpha in [c, c_max] with K = pi^{-d} prod (1+u_i^2)^{-1}.
DistanceEstimate smoothed_empirical_cauchy(double c, double h, const SampleSet& X,
                                           const OptimizerConfig& cfg = {},
                                           double c_max = 0.0);

/// Closed-form ||P_n * K_h - Q_m * K_g||_{F_H}, Gaussian family, order-2
/// Gaussian-base kernel. h = g = 0 reduces exactly to sup_mmd.
DistanceEstimate smoothed_cross_gauss(const SampleSet& X, double h, const SampleSet& Y,
                                      double g, double a, const OptimizerConfig& cfg = {});

/// Quadrature evaluation of (K_h*K_h*psi + psi - 2 K_h*psi) at all pairwise
/// differences, then a parameter sup. Independent of the closed forms; d <= 2.
DistanceEstimate smoothed_distance_generic(const KernelFamily& family,
                                           const SmoothingKernel& K, double h,
                                           const SampleSet& X,
                                           const OptimizerConfig& cfg = {},
                                           int quad_nodes = 48);

/// Blockwise-vectorized max over a fixed sigma grid of the closed-form
/// squared smoothed-gap objective ||P_n * K_h - P_n||^2_{F_H}(sigma); used on
/// the Lepski hot path where n is large. Early-exits once the running max
/// exceeds `bail_above` (negative disables). Gaussian base; r > 2 needs d = 1.
double smoothed_gap_gauss_sq_max(double a, const SmoothingKernel& K, double h,
                                 const SampleSet& X, int sigma_grid = 16,
                                 double bail_above = -1.0);

/// sup over (parameter, y) of |(1/n) sum psi(y-X_i) - (1/m) sum psi(y-Y_j)|,
/// multi-start local search seeded at the data points and midpoints.
DistanceEstimate kx_distance(const KernelFamily& family, const SampleSet& X,
                             const SampleSet& Y, const OptimizerConfig& cfg = {});

}  // namespace fh
