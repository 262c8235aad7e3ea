#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fh/harness.hpp"
#include "fh/inference.hpp"
#include "fh/smoothing.hpp"

using namespace fh;

TEST_CASE("identical samples give statistic 0 and p = 1") {
  SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 30, 3);
  SampleSet Y = X;
  Y.points.row(0).swap(Y.points.row(12));  // a permutation of the same points
  TestResult r = two_sample_test(X, Y, 0.3, 0.3, 1.0, 99, 0.05, 7);
  // sqrt of a clamped squared statistic: noise floor ~ sqrt(eps)
  CHECK(r.statistic == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK_FALSE(r.reject);
}

TEST_CASE("separated samples reach the minimal p-value 1/(B+1)") {
  DistributionSpec far = DistributionSpec::std_normal(1);
  far.components[0].mean(0) = 50.0;
  SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 40, 11);
  SampleSet Y = sample_distribution(far, 40, 13);
  TestResult r = two_sample_test(X, Y, 0.3, 0.3, 1.0, 99, 0.05, 17);
  CHECK(r.p_value == doctest::Approx(0.01));
  CHECK(r.reject);
  CHECK(r.statistic > 0.5);
}

TEST_CASE("degenerate pooled sample is flagged") {
  SampleSet X(Eigen::MatrixXd::Zero(5, 1)), Y(Eigen::MatrixXd::Zero(5, 1));
  TestResult r = two_sample_test(X, Y, 0.1, 0.1, 1.0, 99, 0.05, 1);
  CHECK(r.degenerate);
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("input validation") {
  SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 10, 1);
  SampleSet Y = sample_distribution(DistributionSpec::std_normal(1), 10, 2);
  CHECK_THROWS_AS(two_sample_test(X, Y, 0.1, 0.1, 1.0, 50, 0.05, 1), std::invalid_argument);
  CHECK_THROWS_AS(two_sample_test(X, Y, 0.1, 0.1, 1.0, 99, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(two_sample_test(X, Y, -0.1, 0.1, 1.0, 99, 0.05, 1), std::invalid_argument);
}

TEST_CASE("p-value is invariant under swapping the samples (n = m, h = g)") {
  SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 25, 17);
  DistributionSpec q = DistributionSpec::std_normal(1);
  q.components[0].mean(0) = 0.4;
  SampleSet Y = sample_distribution(q, 25, 19);
  TestResult xy = two_sample_test(X, Y, 0.25, 0.25, 1.0, 199, 0.05, 23);
  TestResult yx = two_sample_test(Y, X, 0.25, 0.25, 1.0, 199, 0.05, 23);
  CHECK(xy.statistic == doctest::Approx(yx.statistic).epsilon(1e-12));
  CHECK(xy.p_value == doctest::Approx(yx.p_value));
}

TEST_CASE("level holds approximately under the null (small MC)") {
  int rejects = 0;
  const int reps = 200;
  const double h = bandwidth_rule(50, 1, 1, BandwidthMode::L1Optimal);
  for (int t = 0; t < reps; ++t) {
    SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 50,
                                      derive_seed(100, 2 * t));
    SampleSet Y = sample_distribution(DistributionSpec::std_normal(1), 50,
                                      derive_seed(100, 2 * t + 1));
    TestResult r = two_sample_test(X, Y, h, h, 1.0, 99, 0.05, derive_seed(200, t), 8);
    if (r.reject) ++rejects;
  }
  double rate = static_cast<double>(rejects) / reps;
  CHECK(rate >= 0.0);
  CHECK(rate <= 0.11);  // 0.05 plus ~4 binomial sd at 200 reps
}

TEST_CASE("clear alternatives are detected") {
  DistributionSpec shifted = DistributionSpec::std_normal(1);
  shifted.components[0].mean(0) = 1.5;
  const double h = bandwidth_rule(100, 1, 1, BandwidthMode::L1Optimal);
  int rejects = 0;
  for (int t = 0; t < 20; ++t) {
    SampleSet X = sample_distribution(DistributionSpec::std_normal(1), 100,
                                      derive_seed(300, 2 * t));
    SampleSet Y = sample_distribution(shifted, 100, derive_seed(300, 2 * t + 1));
    TestResult r = two_sample_test(X, Y, h, h, 1.0, 99, 0.05, derive_seed(400, t), 8);
    if (r.reject) ++rejects;
  }
  CHECK(rejects >= 18);
}
