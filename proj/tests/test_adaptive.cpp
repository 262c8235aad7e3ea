#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fh/adaptive.hpp"
#include "fh/harness.hpp"
#include "fh/quadrature.hpp"

using namespace fh;

namespace {

SampleSet normal_sample(int n, std::uint64_t seed) {
  return sample_distribution(DistributionSpec::std_normal(1), n, seed);
}

}  // namespace

TEST_CASE("l1_distance_kde pins") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  SampleSet X = normal_sample(20, 3);
  CHECK(l1_distance_kde(X, K, 0.3, 0.3) == 0.0);
  CHECK_THROWS_AS(l1_distance_kde(X, K, 0.0, 0.3), std::invalid_argument);

  // n = 1: || K_h - K_g ||_1 against a dense-quadrature oracle
  SampleSet one(Eigen::MatrixXd::Zero(1, 1));
  double h = 0.2, g = 0.6;
  QuadResult oracle = integrate_simpson(
      [&](double u) { return std::abs(K.eval1d(u / h) / h - K.eval1d(u / g) / g); },
      -10, 10, 1e-9, 10, 4096);
  CHECK(l1_distance_kde(one, K, h, g) == doctest::Approx(oracle.value).epsilon(1e-4));
}

TEST_CASE("l1_distance_kde triangle property") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  SampleSet X = normal_sample(15, 5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.05, 1.0);
  for (int t = 0; t < 5; ++t) {
    double h = U(rng), m = U(rng), g = U(rng);
    double hg = l1_distance_kde(X, K, h, g);
    double hm = l1_distance_kde(X, K, h, m);
    double mg = l1_distance_kde(X, K, m, g);
    CHECK(hg <= hm + mg + 1e-3);
  }
}

TEST_CASE("l1_distance_kde d = 2 sanity") {
  SmoothingKernel K = build_order_kernel(2, 2, BaseTag::GaussianBase);
  SampleSet X = sample_distribution(DistributionSpec::std_normal(2), 10, 11);
  double v = l1_distance_kde(X, K, 0.3, 0.6, 1e-3);
  CHECK(v > 0.0);
  CHECK(v < 2.0);  // L1 distance between densities is at most 2
}

TEST_CASE("lepski: degenerate and vacuous configurations") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  KernelFamily fam(FamilyTag::Gaussian, 0.0, 1.0, 1);
  SampleSet X = normal_sample(200, 13);
  const int n = X.n();
  const double logn = std::log(static_cast<double>(n));

  // grid floor just below 1 leaves a single grid element
  LepskiConfig single;
  single.grid_floor_constant = 0.9 / (logn * logn / n);
  single.use_fh_cap = false;
  BandwidthSelection s1 = lepski_bandwidth(X, K, fam, single);
  REQUIRE(s1.grid.size() == 1);
  CHECK(s1.chosen_h == doctest::Approx(1.0));
  CHECK_FALSE(s1.fallback);

  // A huge and no cap: constraints vacuous, largest element wins
  LepskiConfig vac;
  vac.A = 1e12;
  vac.use_fh_cap = false;
  BandwidthSelection s2 = lepski_bandwidth(X, K, fam, vac);
  CHECK(s2.chosen_h == doctest::Approx(s2.grid.front()));
  CHECK_FALSE(s2.fallback);
}

TEST_CASE("lepski: selected bandwidth is monotone in A") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  KernelFamily fam(FamilyTag::Gaussian, 0.0, 1.0, 1);
  SampleSet X = normal_sample(400, 17);
  double prev = 0.0;
  for (double A : {0.01, 0.1, 1.0, 100.0}) {
    LepskiConfig cfg;
    cfg.A = A;
    cfg.use_fh_cap = false;
    double h = lepski_bandwidth(X, K, fam, cfg).chosen_h;
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("lepski: reproducibility and record structure") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  KernelFamily fam(FamilyTag::Gaussian, 0.0, 1.0, 1);
  SampleSet X = normal_sample(300, 19);
  LepskiConfig cfg;
  cfg.A = 0.5;
  BandwidthSelection a = lepski_bandwidth(X, K, fam, cfg);
  BandwidthSelection b = lepski_bandwidth(X, K, fam, cfg);
  CHECK(a.to_json_string() == b.to_json_string());

  // chosen h is on the grid; grid is geometric with ratio rho
  bool on_grid = false;
  for (double h : a.grid) on_grid = on_grid || h == a.chosen_h;
  CHECK((on_grid || a.fallback));
  for (size_t i = 0; i + 1 < a.grid.size(); ++i)
    CHECK(a.grid[i] / a.grid[i + 1] == doctest::Approx(cfg.rho));
  // every record that passed the L1 stage compared only against smaller g
  for (auto& r : a.records)
    if (r.l1_pass) CHECK(r.max_l1_excess <= 0.0);
}

TEST_CASE("calibrate_A produces a usable constant") {
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  SampleSet pilot = normal_sample(500, 23);
  LepskiConfig cfg;
  double A = calibrate_A(pilot, K, cfg);
  CHECK(A > 0.0);

  // with the calibrated A the selection does not collapse to the fallback
  KernelFamily fam(FamilyTag::Gaussian, 0.0, 1.0, 1);
  LepskiConfig use;
  use.A = A;
  BandwidthSelection sel = lepski_bandwidth(pilot, K, fam, use);
  CHECK_FALSE(sel.fallback);
  CHECK(sel.chosen_h > sel.grid.back());
}
