#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fh/harness.hpp"
#include "fh/kernels.hpp"

using namespace fh;

namespace {

SampleSet random_sample(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> Z(0.0, 1.0);
  Eigen::MatrixXd P(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) P(i, c) = Z(rng);
  return SampleSet(std::move(P), seed);
}

std::vector<KernelFamily> all_families(int d) {
  return {
      KernelFamily(FamilyTag::Gaussian, 0.0, 1.0, d),
      KernelFamily(FamilyTag::Laplacian, 0.0, 1.0, d),
      KernelFamily(FamilyTag::Matern, 0.0, 2.0, d, d / 2.0 + 1.0),
      KernelFamily(FamilyTag::InverseMultiquadric, 1.0, 0.0, d, 1.5),
      KernelFamily(FamilyTag::ProductCauchy, 1.0, 0.0, d),
      KernelFamily(FamilyTag::Spline, 0.5, 4.0, d),
      KernelFamily(FamilyTag::RbfMixture, 0.1, 2.0, d, 0.0, {0.25, 0.75}, {0.5, 3.0}),
  };
}

}  // namespace

TEST_CASE("kernel evaluation pins") {
  Eigen::VectorXd z1 = Eigen::VectorXd::Zero(1), u1(1);
  u1 << 1.0;

  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  CHECK(gauss.eval_diff(1.0, z1) == doctest::Approx(1.0));
  KernelFamily gauss2(FamilyTag::Gaussian, 0.0, 2.0, 1);
  CHECK(gauss2.eval_diff(std::log(2.0), u1) == doctest::Approx(0.5));

  KernelFamily cauchy(FamilyTag::ProductCauchy, 1.0, 0.0, 1);
  CHECK(cauchy.eval_diff(1.0, u1) == doctest::Approx(0.5));

  // matern with beta = d/2 + 3/2 (nu = 3/2) has the closed form (1 + cr) e^{-cr}
  KernelFamily mat(FamilyTag::Matern, 0.0, 2.0, 1, 1.0 / 2.0 + 1.5);
  Eigen::VectorXd tiny(1);
  tiny << 1e-6;
  CHECK(mat.eval_diff(1.0, tiny) == doctest::Approx(1.0).epsilon(1e-6));
  for (double r : {0.3, 1.0, 2.5}) {
    Eigen::VectorXd u(1);
    u << r;
    for (double c : {0.5, 1.5}) {
      CHECK(mat.eval_diff(c, u) == doctest::Approx((1.0 + c * r) * std::exp(-c * r)));
    }
  }
}

TEST_CASE("parameter domain handling") {
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  CHECK(gauss.truncated_lo());
  CHECK(gauss.lo() == doctest::Approx(1e-6));
  KernelFamily imq(FamilyTag::InverseMultiquadric, 2.0, 0.0, 1, 1.0);
  CHECK(imq.truncated_hi());
  CHECK(imq.hi() == doctest::Approx(2000.0));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(gauss.eval_diff(2.0, z), std::invalid_argument);
  CHECK_THROWS_AS(gauss.eval_diff(0.0, z), std::invalid_argument);
  CHECK_THROWS_AS(KernelFamily(FamilyTag::Matern, 0.1, 1.0, 2, 0.9), std::invalid_argument);
}

TEST_CASE("gram matrix equals the elementwise loop and pins") {
  SampleSet one = random_sample(1, 2, 7);
  for (auto& fam : all_families(2)) {
    double p = 0.5 * (fam.lo() + fam.hi());
    Eigen::MatrixXd G = fam.gram(p, one.points, one.points);
    CHECK(G.rows() == 1);
    CHECK(G(0, 0) == doctest::Approx(1.0));
  }

  Eigen::MatrixXd twin(2, 1);
  twin << 0.7, 0.7;
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  Eigen::MatrixXd G2 = gauss.gram(1.0, twin, twin);
  CHECK((G2 - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

  SampleSet X = random_sample(3, 2, 11), Y = random_sample(4, 2, 13);
  for (auto& fam : all_families(2)) {
    double p = 0.5 * (fam.lo() + fam.hi());
    Eigen::MatrixXd G = fam.gram(p, X.points, Y.points);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(G(i, j) == doctest::Approx(fam.eval(
                             p, X.points.row(i).transpose(), Y.points.row(j).transpose())));
  }
}

TEST_CASE("normalization and boundedness on random pairs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> Z(0.0, 1.0);
  for (auto& fam : all_families(2)) {
    for (double frac : {0.0, 0.5, 1.0}) {
      double p = fam.lo() * std::pow(fam.hi() / fam.lo(), frac);
      for (int t = 0; t < 10000 / 3; ++t) {
        Eigen::VectorXd u(2);
        u << Z(rng), Z(rng);
        double v = fam.eval_diff(p, u);
        CHECK(v <= 1.0 + 1e-15);
        CHECK(v >= 0.0);  // spline may hit 0 outside its support
      }
    }
  }
}

TEST_CASE("gram matrices are positive semi-definite") {
  for (auto& fam : all_families(2)) {
    SampleSet X = random_sample(50, 2, 101 + static_cast<int>(fam.tag()));
    double p = 0.5 * (fam.lo() + fam.hi());
    Eigen::MatrixXd G = fam.gram(p, X.points, X.points);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * X.n());
  }
}

TEST_CASE("rho distance pins and oracle") {
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 2.0, 1);
  SampleSet X2 = random_sample(2, 1, 17);
  double norm2 = std::pow(X2.points(0, 0) - X2.points(1, 0), 2.0);
  // rescale so the single pair is at distance 1
  X2.points /= std::sqrt(norm2);
  double s1 = 0.4, s2 = 1.3;
  CHECK(rho_distance(gauss, s1, s1, X2) == doctest::Approx(0.0));
  CHECK(rho_distance(gauss, s1, s2, X2) ==
        doctest::Approx(std::sqrt(2.0) / 2.0 * std::abs(std::exp(-s1) - std::exp(-s2))));

  SampleSet X5 = random_sample(5, 1, 19);
  double brute = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      Eigen::VectorXd u = (X5.points.row(i) - X5.points.row(j)).transpose();
      double dlt = gauss.eval_diff(s1, u) - gauss.eval_diff(s2, u);
      brute += dlt * dlt;
    }
  CHECK(rho_distance(gauss, s1, s2, X5) == doctest::Approx(std::sqrt(2.0 * brute / 25.0)));

  SampleSet X1 = random_sample(1, 1, 23);
  CHECK_THROWS_AS(rho_distance(gauss, s1, s2, X1), std::invalid_argument);
}

TEST_CASE("rho is a pseudo-metric and rho_matrix matches it") {
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 2.0, 1);
  SampleSet X = random_sample(20, 1, 29);
  std::vector<double> grid = gauss.param_grid(12);
  Eigen::MatrixXd R = rho_matrix(gauss, grid, X);
  for (size_t a = 0; a < grid.size(); ++a)
    for (size_t b = 0; b < grid.size(); ++b) {
      CHECK(R(a, b) == doctest::Approx(R(b, a)).epsilon(1e-14));
      CHECK(R(a, b) == doctest::Approx(rho_distance(gauss, grid[a], grid[b], X)).epsilon(1e-9));
    }
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    int a = rng() % grid.size(), b = rng() % grid.size(), c = rng() % grid.size();
    CHECK(R(a, b) <= R(a, c) + R(c, b) + 1e-12);
  }
}

TEST_CASE("empirical cover: pins and monotonicity") {
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  SampleSet X = random_sample(40, 1, 31);
  std::vector<double> grid = gauss.param_grid(50);
  Eigen::MatrixXd R = rho_matrix(gauss, grid, X);
  double diam = R.maxCoeff();

  Cover c1 = cover_from_rho(R, diam + 1e-12);
  CHECK(c1.size() == 1);
  Cover single = empirical_cover(gauss, {0.5}, X, 1e-9);
  CHECK(single.size() == 1);

  int prev = 0;
  for (double eps = diam; eps > diam / 64.0; eps /= 2.0) {
    Cover c = cover_from_rho(R, eps);
    CHECK(c.radius <= eps);
    if (prev > 0) CHECK(c.size() >= prev);  // size non-increasing in eps
    prev = c.size();
  }
}

TEST_CASE("cover size scales like 1/eps for a one-parameter family") {
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  SampleSet X = random_sample(100, 1, 37);
  std::vector<double> grid = gauss.param_grid(400);
  Eigen::MatrixXd R = rho_matrix(gauss, grid, X);
  double diam = R.maxCoeff();
  std::vector<double> lx, ly;
  for (double f = 0.3; f > 0.03; f *= 0.75) {
    Cover c = cover_from_rho(R, f * diam);
    lx.push_back(std::log(f * diam));
    ly.push_back(std::log(static_cast<double>(c.size())));
  }
  auto [slope, se] = ols_slope(lx, ly);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.4));
}

TEST_CASE("family JSON round trip") {
  for (auto& fam : all_families(2)) {
    KernelFamily back = KernelFamily::from_json_string(fam.to_json_string());
    CHECK(back.tag() == fam.tag());
    CHECK(back.lo() == doctest::Approx(fam.lo()));
    CHECK(back.hi() == doctest::Approx(fam.hi()));
    CHECK(back.dim() == fam.dim());
    Eigen::VectorXd u(2);
    u << 0.4, -0.2;
    double p = 0.5 * (fam.lo() + fam.hi());
    CHECK(back.eval_diff(p, u) == doctest::Approx(fam.eval_diff(p, u)));
  }
}
