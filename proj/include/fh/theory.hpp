#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fh/harness.hpp"
#include "fh/kernels.hpp"
#include "fh/sample_set.hpp"

namespace fh {

struct BoundReport {
  double lhs_mean = 0.0;
  double lhs_median = 0.0;
  double lhs_q90 = 0.0;
  double lhs_max = 0.0;
  double rhs = 0.0;      // primary bound
  double rhs_alt = 0.0;  // secondary bound where one exists (theta-form for Massart)
  double violation_fraction = 0.0;
  double mc_stderr = 0.0;
  bool pass = false;
  std::string config;  // canonical JSON of the inputs
  std::string to_json_string() const;
};

/// Monte-Carlo estimate (n_eps Rademacher draws) of
/// E_eps sup over the grid of |sum_{i<j} eps_i eps_j k(X_i, X_j)|.
/// `stderr_out`, if given, receives the MC standard error.
double chaos_sup(const KernelFamily& family, const std::vector<double>& param_grid,
                 const SampleSet& X, int n_eps, std::uint64_t seed,
                 double* stderr_out = nullptr);

/// E sup_{a in A} |sum_{i<j} eps_i eps_j a_ij| against both the theta-form
/// bound (eR/theta) log(|A|/(1-theta)) and eR(1 + sqrt(log|A|))^2, where
/// R = sup_a ||a||_2. A_set holds symmetric-coefficient matrices, each l x l
/// with a zero diagonal (only the upper triangle is read). `exhaustive`
/// enumerates all 2^l sign vectors (l <= 24) instead of sampling n_eps draws.
BoundReport massart_check(const std::vector<Eigen::MatrixXd>& A_set, double theta,
                          int n_eps, std::uint64_t seed, bool exhaustive = false);

/// Coverage audit of the high-probability bound on ||P_n - P||_{F_H}:
/// 4 sqrt(2) sqrt( inf_alpha { alpha + (4e/n) int_alpha^{2 nu} log 2N(rho,eps) d eps } )
///   + 3 sqrt(2 nu) (sqrt2 + sqrt(tau)) / sqrt(n),
/// with the covering number N taken from the empirical greedy cover on each
/// trial's own data. The LHS is exact for the Gaussian family with a
/// Gaussian-mixture P; otherwise it is sup_mmd against a large reference draw.
BoundReport concentration_check(const KernelFamily& family, const DistributionSpec& spec,
                                int n, double tau, int trials, std::uint64_t seed,
                                int param_grid_size = 64, int eps_levels = 24);

}  // namespace fh
