#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "fh/distances.hpp"
#include "fh/harness.hpp"
#include "fh/quadrature.hpp"

using namespace fh;

TEST_CASE("seed derivation is deterministic and well-spread") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(fnv1a_hash("abc") == fnv1a_hash("abc"));
  CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
}

TEST_CASE("distribution spec validation and JSON round trip") {
  DistributionSpec s = DistributionSpec::std_normal(2);
  DistributionSpec back = DistributionSpec::from_json_string(s.to_json_string());
  CHECK(back.dim == 2);
  CHECK(back.components.size() == 1);
  CHECK(back.components[0].var(1) == doctest::Approx(1.0));

  DistributionSpec bad = s;
  bad.components[0].weight = 0.7;  // weights no longer sum to 1
  CHECK_THROWS_AS(sample_distribution(bad, 5, 1), std::invalid_argument);
  DistributionSpec neg = s;
  neg.components[0].var(0) = -1.0;
  CHECK_THROWS_AS(sample_distribution(neg, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_distribution(s, 0, 1), std::invalid_argument);
}

TEST_CASE("sampling pins") {
  // point mass
  DistributionSpec pm = DistributionSpec::std_normal(2);
  pm.components[0].mean << 1.5, -2.0;
  pm.components[0].var.setZero();
  SampleSet X = sample_distribution(pm, 10, 3);
  for (int i = 0; i < 10; ++i) {
    CHECK(X.points(i, 0) == 1.5);
    CHECK(X.points(i, 1) == -2.0);
  }

  // a zero-weight component never fires
  DistributionSpec mix = DistributionSpec::std_normal(1);
  MixtureComponent far;
  far.weight = 0.0;
  far.mean = Eigen::VectorXd::Constant(1, 1000.0);
  far.var = Eigen::VectorXd::Ones(1);
  mix.components[0].weight = 1.0;
  mix.components.push_back(far);
  SampleSet Y = sample_distribution(mix, 2000, 5);
  CHECK(Y.points.cwiseAbs().maxCoeff() < 100.0);

  // CLT-width check on the standard normal
  SampleSet big = sample_distribution(DistributionSpec::std_normal(1), 1000000, 7);
  CHECK(std::abs(big.points.col(0).mean()) < 3e-3);
  double var = big.points.col(0).array().square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("densities integrate to one") {
  DistributionSpec mix = DistributionSpec::std_normal(1);
  mix.components[0].weight = 0.4;
  MixtureComponent c2;
  c2.weight = 0.6;
  c2.mean = Eigen::VectorXd::Constant(1, 2.0);
  c2.var = Eigen::VectorXd::Constant(1, 0.25);
  mix.components.push_back(c2);
  QuadResult q = integrate_simpson(
      [&](double x) { return density(mix, Eigen::VectorXd::Constant(1, x)); }, -12, 12, 1e-10);
  CHECK(q.value == doctest::Approx(1.0).epsilon(1e-8));

  DistributionSpec u;
  u.kind = DistKind::Uniform;
  u.dim = 1;
  u.uniform_lo = Eigen::VectorXd::Constant(1, -1.0);
  u.uniform_hi = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(density(u, Eigen::VectorXd::Constant(1, 0.0)) == doctest::Approx(0.25));
  CHECK(density(u, Eigen::VectorXd::Constant(1, 5.0)) == 0.0);

  DistributionSpec cm;
  cm.kind = DistKind::CauchyMixture;
  cm.dim = 1;
  MixtureComponent cc;
  cc.weight = 1.0;
  cc.mean = Eigen::VectorXd::Zero(1);
  cc.var = Eigen::VectorXd::Constant(1, 2.0);
  cm.components.push_back(cc);
  CHECK(density(cm, Eigen::VectorXd::Zero(1)) == doctest::Approx(1.0 / (2.0 * M_PI)));
}

TEST_CASE("population embedding terms match quadrature") {
  DistributionSpec mix = DistributionSpec::std_normal(1);
  mix.components[0].weight = 0.3;
  MixtureComponent c2;
  c2.weight = 0.7;
  c2.mean = Eigen::VectorXd::Constant(1, 1.2);
  c2.var = Eigen::VectorXd::Constant(1, 0.5);
  mix.components.push_back(c2);

  const double sigma = 0.8;
  SampleSet X = sample_distribution(mix, 10, 11);
  // oracle: D^2 = (1/n^2) sum psi + self - (2/n) sum E psi(x - Y), each E by quadrature
  const int n = X.n();
  Eigen::MatrixXd D2 = pairwise_sq_dists(X.points, X.points);
  double xx = (-sigma * D2.array()).exp().sum() / (n * n);
  double xp = 0.0;
  for (int i = 0; i < n; ++i) {
    double xi = X.points(i, 0);
    QuadResult q = integrate_simpson(
        [&](double y) {
          return std::exp(-sigma * (xi - y) * (xi - y)) *
                 density(mix, Eigen::VectorXd::Constant(1, y));
        },
        -15, 15, 1e-11);
    xp += q.value;
  }
  xp /= n;
  // E psi(Y - Y') by 2-D tensor quadrature
  QuadResult pp = integrate_simpson(
      [&](double y) {
        QuadResult inner = integrate_simpson(
            [&](double z) {
              return std::exp(-sigma * (y - z) * (y - z)) *
                     density(mix, Eigen::VectorXd::Constant(1, z));
            },
            -15, 15, 1e-10);
        return inner.value * density(mix, Eigen::VectorXd::Constant(1, y));
      },
      -15, 15, 1e-8);
  double oracle = xx - 2.0 * xp + pp.value;
  CHECK(population_mmd_sq_gauss(sigma, X, mix) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("emp_fh_gauss approximates sup_mmd against a large reference draw") {
  DistributionSpec spec = DistributionSpec::std_normal(1);
  SampleSet X = sample_distribution(spec, 80, 13);
  double exact = emp_fh_gauss(X, spec, 1.0);
  SampleSet ref = sample_distribution(spec, 5000, 15);
  KernelFamily gauss(FamilyTag::Gaussian, 0.0, 1.0, 1);
  double mc = sup_mmd(gauss, X, ref).value;
  CHECK(exact == doctest::Approx(mc).epsilon(0.25));
  CHECK(std::abs(exact - mc) < 0.03);
}

TEST_CASE("kde_fh_gauss: h = 0 recovers the empirical distance") {
  DistributionSpec spec = DistributionSpec::std_normal(1);
  SampleSet X = sample_distribution(spec, 50, 17);
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  double a = emp_fh_gauss(X, spec, 1.0);
  double b = kde_fh_gauss(X, spec, K, 0.0, 1.0);
  CHECK(b == doctest::Approx(a).epsilon(1e-9));

  // triangle inequality against the smoothed-empirical gap
  double h = 0.3;
  double kde = kde_fh_gauss(X, spec, K, h, 1.0);
  double gap = smoothed_empirical_gauss(1.0, h, X).value;
  CHECK(kde <= a + gap + 1e-6);
  CHECK(kde >= a - gap - 1e-6);
}

TEST_CASE("kde_fh_gauss supports the order-4 kernel (d = 1)") {
  DistributionSpec spec = DistributionSpec::std_normal(1);
  SampleSet X = sample_distribution(spec, 50, 19);
  SmoothingKernel K4 = build_order_kernel(4, 1, BaseTag::GaussianBase);
  double v = kde_fh_gauss(X, spec, K4, 0.25, 1.0);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  SmoothingKernel K42 = build_order_kernel(4, 2, BaseTag::GaussianBase);
  SampleSet X2 = sample_distribution(DistributionSpec::std_normal(2), 20, 21);
  CHECK_THROWS_AS(kde_fh_gauss(X2, DistributionSpec::std_normal(2), K42, 0.25, 1.0),
                  std::invalid_argument);
}

TEST_CASE("kde_l1_risk decreases with n") {
  DistributionSpec spec = DistributionSpec::std_normal(1);
  SmoothingKernel K = build_order_kernel(2, 1, BaseTag::GaussianBase);
  SampleSet small = sample_distribution(spec, 50, 23);
  SampleSet large = sample_distribution(spec, 3000, 25);
  double rs = kde_l1_risk(small, spec, K, bandwidth_rule(50, 1, 1, BandwidthMode::L1Optimal));
  double rl = kde_l1_risk(large, spec, K, bandwidth_rule(3000, 1, 1, BandwidthMode::L1Optimal));
  CHECK(rs > 0.0);
  CHECK(rl < rs);
}

TEST_CASE("csv round trip preserves the sample") {
  SampleSet X = sample_distribution(DistributionSpec::std_normal(3), 17, 27);
  const char* path = "harness_roundtrip_tmp.csv";
  save_csv(X, path);
  SampleSet back = load_csv(path);
  std::remove(path);
  REQUIRE(back.n() == X.n());
  REQUIRE(back.dim() == X.dim());
  CHECK((back.points - X.points).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ks helpers") {
  std::vector<double> a{1, 2, 3, 4}, b{10, 11, 12, 13};
  CHECK(ks_distance(a, b) == doctest::Approx(1.0));
  CHECK(ks_distance(a, a) <= 0.25 + 1e-12);
  CHECK(ks_critical(100, 100, 0.05) ==
        doctest::Approx(std::sqrt(-0.5 * std::log(0.025)) * std::sqrt(0.02)));

  std::vector<double> x{1, 2, 3, 4, 5}, y{3, 5, 7, 9, 11};
  auto [slope, se] = ols_slope(x, y);
  CHECK(slope == doctest::Approx(2.0));
  CHECK(se == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("rate_experiment reproduces the n^{-1/2} law at small scale") {
  RateConfig cfg;
  cfg.quantity = RateQuantity::EmpFh;
  cfg.spec = DistributionSpec::std_normal(1);
  cfg.n_list = {50, 100, 200, 400, 800};
  cfg.reps = 20;
  cfg.sigma_grid = 16;
  cfg.seed = 29;
  ExperimentReport rep = rate_experiment(cfg);
  CHECK(rep.slope == doctest::Approx(-0.5).epsilon(0.3));
  CHECK(rep.config_hash == rate_experiment(cfg).config_hash);
  CHECK(rep.to_tidy_csv().substr(0, 14) == "n,mean,stderr\n");

  RateConfig bad = cfg;
  bad.reps = 5;
  CHECK_THROWS_AS(rate_experiment(bad), std::invalid_argument);
}

TEST_CASE("clt_spread_experiment flags insufficient replication") {
  CltConfig cfg;
  cfg.spec = DistributionSpec::std_normal(1);
  cfg.n_list = {50, 100};
  cfg.reps = 1;
  ExperimentReport rep = clt_spread_experiment(cfg);
  CHECK(rep.note == "insufficient replication");

  cfg.reps = 60;
  cfg.sigma_grid = 8;
  ExperimentReport ok = clt_spread_experiment(cfg);
  REQUIRE(ok.extra.size() == 1);
  CHECK(ok.extra[0] >= 0.0);
  CHECK(ok.extra[0] <= 1.0);
}
