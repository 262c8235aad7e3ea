#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace fh {

/// A set of n points in R^d with provenance metadata.
struct SampleSet {
  Eigen::MatrixXd points;  // n x d
  std::uint64_t seed = 0;
  std::string source;       // e.g. "csv:file.csv" or a distribution tag

  SampleSet() = default;
  explicit SampleSet(Eigen::MatrixXd pts, std::uint64_t s = 0, std::string src = {})
      : points(std::move(pts)), seed(s), source(std::move(src)) {}

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// CSV format: header "x1,...,xd", one row per point.
SampleSet load_csv(const std::string& path);
void save_csv(const SampleSet& X, const std::string& path);

// Pairwise squared Euclidean distances, n x n.
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace fh
