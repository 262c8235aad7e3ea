#pragma once

#include <string>
#include <vector>

#include "fh/kernels.hpp"
#include "fh/sample_set.hpp"
#include "fh/smoothing.hpp"

namespace fh {

struct LepskiConfig {
  double rho = 1.3;        // geometric grid ratio, > 1
  double A = 1.0;          // Lepski constant in sqrt(A/(n g^d))
  double gamma = 1.0;      // moment parameters of the assumed class (> d/2)
  double L = 1.0;
  double grid_floor_constant = 1.0;  // grid keeps rho^{-k} > const * (log n)^2 / n
  bool use_fh_cap = true;  // the ||P_n*K_h - P_n||_{F_H} <= n^{-1/2}/log n condition
  double family_a = 1.0;   // gaussian-family upper endpoint for the cap
  int sigma_grid = 16;
  double l1_tol = 1e-4;
};

struct CandidateRecord {
  double h = 0.0;
  double max_l1_excess = 0.0;  // max over g<h of l1(h,g) - sqrt(A/(n g^d))
  bool l1_pass = false;
  bool fh_evaluated = false;
  double fh_value = 0.0;
  double fh_cap = 0.0;
  bool fh_pass = false;
};

struct BandwidthSelection {
  double chosen_h = 0.0;
  std::vector<double> grid;  // largest to smallest
  std::vector<CandidateRecord> records;
  bool fallback = false;  // no candidate passed; smallest grid element returned
  std::string to_json_string() const;
};

/// ||P_n*K_h - P_n*K_g||_{L^1} over [min(X) - 8 max(h,g), max(X) + 8 max(h,g)]
/// per coordinate. Deterministic grid quadrature for d <= 2 (trapezoid with
/// node doubling to `tol`); Halton quasi-random integration for d >= 3.
double l1_distance_kde(const SampleSet& X, const SmoothingKernel& K, double h, double g,
                       double tol = 1e-4);

/// Data-driven bandwidth: largest grid h whose KDE is L1-close to every less
/// smoothed one at the noise level sqrt(A/(n g^d)), subject to the smoothed
/// F_H gap staying below n^{-1/2}/log n. Grid is {rho^{-k} > (log n)^2/n}.
BandwidthSelection lepski_bandwidth(const SampleSet& X, const SmoothingKernel& K,
                                    const KernelFamily& family, const LepskiConfig& cfg);

/// Calibration helper: 95th percentile of n g^d l1(h,g)^2 over grid pairs h > g
/// on pilot data.
double calibrate_A(const SampleSet& pilot, const SmoothingKernel& K,
                   const LepskiConfig& cfg);

}  // namespace fh
