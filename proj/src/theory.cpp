#include "fh/theory.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>
#include <stdexcept>

#include "fh/distances.hpp"

namespace fh {

namespace {

void lhs_summary(std::vector<double> v, BoundReport& rep) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  rep.lhs_mean = 0.0;
  for (double x : v) rep.lhs_mean += x;
  rep.lhs_mean /= n;
  rep.lhs_median = v[n / 2];
  rep.lhs_q90 = v[static_cast<size_t>(0.9 * (n - 1))];
  rep.lhs_max = v.back();
}

}  // namespace

std::string BoundReport::to_json_string() const {
  nlohmann::json j;
  j["lhs_mean"] = lhs_mean;
  j["lhs_median"] = lhs_median;
  j["lhs_q90"] = lhs_q90;
  j["lhs_max"] = lhs_max;
  j["rhs"] = rhs;
  j["rhs_alt"] = rhs_alt;
  j["violation_fraction"] = violation_fraction;
  j["mc_stderr"] = mc_stderr;
  j["pass"] = pass;
  if (!config.empty()) j["config"] = nlohmann::json::parse(config);
  return j.dump();
}

double chaos_sup(const KernelFamily& family, const std::vector<double>& param_grid,
                 const SampleSet& X, int n_eps, std::uint64_t seed, double* stderr_out) {
  if (n_eps < 100) throw std::invalid_argument("chaos_sup: n_eps >= 100 required");
  if (param_grid.empty()) throw std::invalid_argument("chaos_sup: empty grid");
  const int n = X.n();

  Eigen::MatrixXd E(n, n_eps);
  std::mt19937_64 rng(seed);
  for (int b = 0; b < n_eps; ++b)
    for (int i = 0; i < n; ++i) E(i, b) = (rng() & 1) ? 1.0 : -1.0;

  // sum_{i<j} eps_i eps_j G_ij = (eps' G eps - tr G) / 2, batched over draws
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n_eps);
  for (double p : param_grid) {
    Eigen::MatrixXd G = family.gram(p, X.points, X.points);
    const double tr = G.trace();
    Eigen::MatrixXd GE = G * E;
    for (int b = 0; b < n_eps; ++b) {
      double q = std::abs((E.col(b).dot(GE.col(b)) - tr) * 0.5);
      best(b) = std::max(best(b), q);
    }
  }
  double mean = best.mean();
  if (stderr_out) {
    double ss = (best.array() - mean).square().sum() / std::max(1, n_eps - 1);
    *stderr_out = std::sqrt(ss / n_eps);
  }
  return mean;
}

BoundReport massart_check(const std::vector<Eigen::MatrixXd>& A_set, double theta,
                          int n_eps, std::uint64_t seed, bool exhaustive) {
  if (A_set.empty()) throw std::invalid_argument("massart_check: empty A_set");
  if (theta <= 0.0 || theta >= 1.0) throw std::invalid_argument("massart_check: theta in (0,1)");
  const int l = static_cast<int>(A_set.front().rows());
  for (auto& a : A_set)
    if (a.rows() != l || a.cols() != l)
      throw std::invalid_argument("massart_check: ragged A_set");
  if (exhaustive && l > 24) throw std::invalid_argument("massart_check: exhaustive needs l <= 24");

  double R = 0.0;
  for (auto& a : A_set) {
    double s2 = 0.0;
    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j) s2 += a(i, j) * a(i, j);
    R = std::max(R, std::sqrt(s2));
  }
  const double cardA = static_cast<double>(A_set.size());
  const double e = std::exp(1.0);

  auto sup_at = [&](const Eigen::VectorXd& eps) {
    double best = 0.0;
    for (auto& a : A_set) {
      double s = 0.0;
      for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j) s += eps(i) * eps(j) * a(i, j);
      best = std::max(best, std::abs(s));
    }
    return best;
  };

  std::vector<double> draws;
  if (exhaustive) {
    Eigen::VectorXd eps(l);
    const std::uint32_t total = 1u << l;
    draws.reserve(total);
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      for (int i = 0; i < l; ++i) eps(i) = (mask >> i) & 1 ? 1.0 : -1.0;
      draws.push_back(sup_at(eps));
    }
  } else {
    if (n_eps < 100) throw std::invalid_argument("massart_check: n_eps >= 100 required");
    std::mt19937_64 rng(seed);
    Eigen::VectorXd eps(l);
    draws.reserve(n_eps);
    for (int b = 0; b < n_eps; ++b) {
      for (int i = 0; i < l; ++i) eps(i) = (rng() & 1) ? 1.0 : -1.0;
      draws.push_back(sup_at(eps));
    }
  }

  BoundReport rep;
  lhs_summary(draws, rep);
  if (!exhaustive) {
    double ss = 0.0;
    for (double x : draws) ss += (x - rep.lhs_mean) * (x - rep.lhs_mean);
    rep.mc_stderr = std::sqrt(ss / (draws.size() * std::max<size_t>(1, draws.size() - 1)));
  }
  double srl = std::sqrt(std::log(cardA));
  rep.rhs = e * R * (1.0 + srl) * (1.0 + srl);
  rep.rhs_alt = (e * R / theta) * std::log(cardA / (1.0 - theta));
  rep.violation_fraction =
      rep.lhs_mean > std::min(rep.rhs, rep.rhs_alt) + 3.0 * rep.mc_stderr ? 1.0 : 0.0;
  rep.pass = rep.lhs_mean <= rep.rhs + 3.0 * rep.mc_stderr;

  nlohmann::json cfg;
  cfg["card_A"] = A_set.size();
  cfg["l"] = l;
  cfg["R"] = R;
  cfg["theta"] = theta;
  cfg["n_eps"] = exhaustive ? static_cast<int>(draws.size()) : n_eps;
  cfg["exhaustive"] = exhaustive;
  cfg["seed"] = seed;
  rep.config = cfg.dump();
  return rep;
}

BoundReport concentration_check(const KernelFamily& family, const DistributionSpec& spec,
                                int n, double tau, int trials, std::uint64_t seed,
                                int param_grid_size, int eps_levels) {
  if (trials < 200) throw std::invalid_argument("concentration_check: trials >= 200 required");
  if (n < 2) throw std::invalid_argument("concentration_check: n >= 2 required");
  if (tau <= 0.0) throw std::invalid_argument("concentration_check: tau must be positive");

  const double nu = 1.0;  // normalized kernels: sup_k sup_x k(x,x) = 1
  const bool exact_lhs = family.tag() == FamilyTag::Gaussian &&
                         spec.kind == DistKind::GaussianMixture;
  SampleSet ref;
  if (!exact_lhs) ref = sample_distribution(spec, 100000, derive_seed(seed, 1u << 20));

  std::vector<double> grid = family.param_grid(param_grid_size);
  const double tail = 3.0 * std::sqrt(2.0 * nu) * (std::sqrt(2.0) + std::sqrt(tau)) /
                      std::sqrt(static_cast<double>(n));

  int violations = 0;
  std::vector<double> lhs_vals;
  lhs_vals.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    SampleSet X = sample_distribution(spec, n, derive_seed(seed, t));

    double lhs;
    if (exact_lhs) {
      lhs = emp_fh_gauss(X, spec, family.hi());
    } else {
      OptimizerConfig oc;
      oc.grid_size = 32;
      oc.xtol = 1e-6;
      lhs = sup_mmd(family, X, ref, oc).value;
    }
    lhs_vals.push_back(lhs);

    // entropy integral on log-spaced eps levels from the trial's own cover
    Eigen::MatrixXd rho = rho_matrix(family, grid, X);
    const double eps_hi = 2.0 * nu;
    const double eps_lo = eps_hi * 1e-4;
    std::vector<double> levels(eps_levels), logN(eps_levels);
    for (int i = 0; i < eps_levels; ++i) {
      levels[i] = eps_lo * std::pow(eps_hi / eps_lo, static_cast<double>(i) / (eps_levels - 1));
      logN[i] = std::log(2.0 * cover_from_rho(rho, levels[i]).size());
    }
    // J(alpha) = int_alpha^{eps_hi} log 2N deps by trapezoid on the level grid,
    // accumulated right to left; then inf over alpha of alpha + (4e/n) J(alpha)
    std::vector<double> J(eps_levels, 0.0);
    for (int i = eps_levels - 2; i >= 0; --i)
      J[i] = J[i + 1] + 0.5 * (logN[i] + logN[i + 1]) * (levels[i + 1] - levels[i]);
    double inner = levels[0] + (4.0 * std::exp(1.0) / n) * J[0];
    for (int i = 1; i < eps_levels; ++i)
      inner = std::min(inner, levels[i] + (4.0 * std::exp(1.0) / n) * J[i]);
    double rhs = 4.0 * std::sqrt(2.0) * std::sqrt(inner) + tail;

    if (lhs > rhs) ++violations;
  }

  BoundReport rep;
  lhs_summary(lhs_vals, rep);
  rep.violation_fraction = static_cast<double>(violations) / trials;
  rep.mc_stderr = std::sqrt(std::max(rep.violation_fraction * (1.0 - rep.violation_fraction),
                                     1.0 / trials) /
                            trials);
  rep.rhs = 2.0 * std::exp(-tau);  // allowed violation level
  rep.pass = rep.violation_fraction <= rep.rhs + 3.0 * rep.mc_stderr;

  nlohmann::json cfg;
  cfg["family"] = nlohmann::json::parse(family.to_json_string());
  cfg["dist"] = nlohmann::json::parse(spec.to_json_string());
  cfg["n"] = n;
  cfg["tau"] = tau;
  cfg["trials"] = trials;
  cfg["seed"] = seed;
  cfg["param_grid_size"] = param_grid_size;
  cfg["eps_levels"] = eps_levels;
  cfg["exact_lhs"] = exact_lhs;
  rep.config = cfg.dump();
  return rep;
}

}  // namespace fh
