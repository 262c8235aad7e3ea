#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fh/sample_set.hpp"
#include "fh/smoothing.hpp"

namespace fh {

// --- seeding -----------------------------------------------------------

/// Per-stream seeds derived from a master seed by a counter scheme
/// (splitmix64 of master ^ golden-ratio-scrambled counter); documented so
/// experiment replications are reproducible independently of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// FNV-1a of a canonical string (used for config hashes in reports).
std::uint64_t fnv1a_hash(const std::string& s);

// --- synthetic distributions -------------------------------------------

struct MixtureComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // diagonal covariance (gaussian) or half-width scale (cauchy)
};

enum class DistKind { GaussianMixture, Uniform, CauchyMixture };

struct DistributionSpec {
  DistKind kind = DistKind::GaussianMixture;
  int dim = 1;
  int smoothness = 1;  // declared Sobolev order tag, not inferred
  std::vector<MixtureComponent> components;   // mixtures
  Eigen::VectorXd uniform_lo, uniform_hi;     // uniform box

  static DistributionSpec std_normal(int dim);
  static DistributionSpec from_json_string(const std::string& json_text);
  std::string to_json_string() const;
};

SampleSet sample_distribution(const DistributionSpec& spec, int n, std::uint64_t seed);

/// Density of the spec at x (gaussian mixture / uniform; cauchy mixture d=1..).
double density(const DistributionSpec& spec, const Eigen::VectorXd& x);

// --- closed-form population distances (gaussian family, gaussian mixtures) ---

/// D_sigma^2(P_n, P) for the Gaussian kernel e^{-sigma||.||^2} and P a
/// diagonal-covariance Gaussian mixture; exact (no reference sample).
double population_mmd_sq_gauss(double sigma, const SampleSet& X,
                               const DistributionSpec& spec);

/// ||P_n - P||_{F_H} over sigma in (0,a], exact population embedding.
double emp_fh_gauss(const SampleSet& X, const DistributionSpec& spec, double a,
                    int sigma_grid = 32);

/// ||P_n*K_h - P||_{F_H} for a Gaussian-base kernel of any even order (d = 1
/// for order > 2), exact via the polynomial-Gaussian convolution calculus.
double kde_fh_gauss(const SampleSet& X, const DistributionSpec& spec,
                    const SmoothingKernel& K, double h, double a, int sigma_grid = 32);

/// L1 distance between the KDE and the true density (d = 1, grid quadrature).
double kde_l1_risk(const SampleSet& X, const DistributionSpec& spec,
                   const SmoothingKernel& K, double h);

// --- experiments --------------------------------------------------------

enum class RateQuantity { EmpFh, KdeFh, KdeL1, SmoothedGap };

struct RateConfig {
  RateQuantity quantity = RateQuantity::EmpFh;
  DistributionSpec spec;
  double family_a = 1.0;
  std::vector<int> n_list;
  int reps = 30;
  int order = 2;          // smoothing kernel order (KdeFh/KdeL1/SmoothedGap)
  int s = 1;              // smoothness used by the bandwidth rule
  bool use_lepski = false;  // KdeL1: data-driven bandwidth instead of the rule
  double lepski_A = 0.2;
  double bandwidth_constant = 1.0;
  int sigma_grid = 32;
  std::uint64_t seed = 1;
};

struct ExperimentReport {
  std::vector<double> sweep;   // n values
  std::vector<double> means;
  std::vector<double> stderrs;
  double slope = 0.0;          // OLS on log-log means
  double slope_stderr = 0.0;
  std::vector<double> extra;   // quantity-specific series (e.g. sqrt(n) * gap)
  std::string note;
  std::uint64_t config_hash = 0;
  std::string to_json_string() const;
  std::string to_tidy_csv() const;  // columns: n, mean, stderr
};

ExperimentReport rate_experiment(const RateConfig& cfg);

struct CltConfig {
  DistributionSpec spec;
  double family_a = 1.0;
  std::vector<int> n_list;
  int reps = 200;
  int sigma_grid = 32;
  std::uint64_t seed = 1;
};

/// Distributional stability of sqrt(n) ||P_n - P||_{F_H}: KS distances between
/// consecutive-n empirical distributions.
ExperimentReport clt_spread_experiment(const CltConfig& cfg);

// --- small statistics helpers ------------------------------------------

double ks_distance(std::vector<double> a, std::vector<double> b);
double ks_critical(int n, int m, double alpha = 0.05);

/// OLS slope of y on x with standard error; returns {slope, stderr}.
std::pair<double, double> ols_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace fh
