#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fh/sample_set.hpp"

namespace fh {

enum class FamilyTag {
  Gaussian,           // e^{-sigma ||u||_2^2}, sigma in (0,a]
  Laplacian,          // e^{-sigma ||u||_1}, sigma in (0,a]
  Matern,             // Bessel form, scale c in (0,a], shape beta > d/2
  InverseMultiquadric,// (1 + ||u/c||_2^2)^{-beta}, c in [a, inf)
  ProductCauchy,      // prod_i c^2/(c^2 + u_i^2), c in [a, inf)
  Spline,             // prod_i (1 - |u_i|/c)_+, c in (0, inf)
  RbfMixture          // sum_j w_j e^{-theta s_j ||u||_2^2}, theta scales the atoms
};

std::string to_string(FamilyTag tag);
FamilyTag family_tag_from_string(const std::string& s);

/// A parameterized cone of normalized (k(x,x)=1), translation-invariant,
/// positive-definite kernels with a scalar parameter domain [lo, hi].
///
/// Half-open domains (0,a] are realized as [sigma_min_frac*a, a]; unbounded
/// domains [a,inf) are truncated to [a, c_max_frac*a]. Truncations are
/// recorded in the flags below.
class KernelFamily {
 public:
  static constexpr double kDefaultSigmaMinFrac = 1e-6;
  static constexpr double kDefaultCMaxFrac = 1e3;

  KernelFamily(FamilyTag tag, double domain_lo, double domain_hi, int dim,
               double beta = 0.0, std::vector<double> mix_weights = {},
               std::vector<double> mix_rates = {},
               double sigma_min_frac = kDefaultSigmaMinFrac,
               double c_max_frac = kDefaultCMaxFrac);

  static KernelFamily from_json_string(const std::string& json_text);
  static KernelFamily from_json_file(const std::string& path);
  std::string to_json_string() const;

  FamilyTag tag() const { return tag_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int dim() const { return dim_; }
  double beta() const { return beta_; }
  bool truncated_lo() const { return truncated_lo_; }
  bool truncated_hi() const { return truncated_hi_; }
  const std::vector<double>& mix_weights() const { return mix_weights_; }
  const std::vector<double>& mix_rates() const { return mix_rates_; }

  bool contains(double param) const { return param >= lo_ && param <= hi_; }
  void require_param(double param) const;

  /// psi(u) for the kernel at the given parameter; result in (0, 1].
  double eval_diff(double param, const Eigen::VectorXd& u) const;
  double eval(double param, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  Eigen::MatrixXd gram(double param, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) const;
  Eigen::MatrixXd gram(double param, const SampleSet& X, const SampleSet& Y) const {
    return gram(param, X.points, X.points.data() == Y.points.data() ? X.points : Y.points);
  }

  /// Log-spaced parameter grid over [lo, hi].
  std::vector<double> param_grid(int size) const;

 private:
  FamilyTag tag_;
  double lo_, hi_;
  int dim_;
  double beta_;
  std::vector<double> mix_weights_, mix_rates_;
  bool truncated_lo_ = false, truncated_hi_ = false;
};

/// Data-dependent pseudo-metric between two kernels of the same family:
/// sqrt( (2/n^2) sum_{i<j} (k1(X_i,X_j) - k2(X_i,X_j))^2 ).
double rho_distance(const KernelFamily& family, double param1, double param2,
                    const SampleSet& X);

/// rho distances between all pairs of grid parameters on a fixed sample.
Eigen::MatrixXd rho_matrix(const KernelFamily& family, const std::vector<double>& grid,
                           const SampleSet& X);

struct Cover {
  std::vector<int> selected;  // indices into the grid
  double radius = 0.0;        // max distance from a grid point to the cover
  int size() const { return static_cast<int>(selected.size()); }
};

/// Greedy farthest-point cover of the grid under rho(.,.,X); every grid point
/// ends up within eps of a selected point.
Cover empirical_cover(const KernelFamily& family, const std::vector<double>& grid,
                      const SampleSet& X, double eps);

/// Same, on a precomputed pairwise distance matrix.
Cover cover_from_rho(const Eigen::MatrixXd& rho, double eps);

}  // namespace fh
