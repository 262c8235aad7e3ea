#pragma once

#include <cstdint>
#include <string>

#include "fh/sample_set.hpp"

namespace fh {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
  double alpha = 0.05;
  bool reject = false;
  std::uint64_t seed = 0;
  bool degenerate = false;  // pooled sample collapsed to a single point
  std::string to_json_string() const;
};

/// Permutation two-sample test with the smoothed statistic
/// ||P_n*K_h - Q_m*K_g||_{F_H} (Gaussian family sigma in (0,a], order-2
/// Gaussian-base kernel). The null distribution comes from B random
/// relabelings of the pooled sample with group sizes (and h/g roles) kept.
TestResult two_sample_test(const SampleSet& X, const SampleSet& Y, double h, double g,
                           double a, int B, double alpha, std::uint64_t seed,
                           int sigma_grid = 32);

}  // namespace fh
