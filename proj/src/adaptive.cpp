#include "fh/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "fh/distances.hpp"
#include "fh/quadrature.hpp"

namespace fh {

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

double l1_distance_kde(const SampleSet& X, const SmoothingKernel& K, double h, double g,
                       double tol) {
  if (h <= 0.0 || g <= 0.0) throw std::invalid_argument("l1_distance_kde: non-positive bandwidth");
  if (h == g) return 0.0;
  const int d = X.dim();
  const double pad = 8.0 * std::max(h, g);
  Eigen::VectorXd lo(d), hi(d);
  for (int c = 0; c < d; ++c) {
    lo(c) = X.points.col(c).minCoeff() - pad;
    hi(c) = X.points.col(c).maxCoeff() + pad;
  }
  if (d == 1) {
    int nodes = 512;
    double prev = -1.0;
    for (int it = 0; it < 12; ++it) {
      Eigen::MatrixXd grid(nodes + 1, 1);
      double step = (hi(0) - lo(0)) / nodes;
      for (int i = 0; i <= nodes; ++i) grid(i, 0) = lo(0) + i * step;
      Eigen::VectorXd fh = kde_on_grid(K, h, X, grid);
      Eigen::VectorXd fg = kde_on_grid(K, g, X, grid);
      std::vector<double> av(nodes + 1);
      for (int i = 0; i <= nodes; ++i) av[i] = std::abs(fh(i) - fg(i));
      double cur = integrate_trapezoid(av, step);
      if (prev >= 0.0 && std::abs(cur - prev) < tol) return cur;
      prev = cur;
      nodes *= 2;
    }
    return prev;
  }
  if (d == 2) {
    int nodes = 64;
    double prev = -1.0;
    for (int it = 0; it < 6; ++it) {
      double sx = (hi(0) - lo(0)) / nodes, sy = (hi(1) - lo(1)) / nodes;
      double acc = 0.0;
      Eigen::VectorXd x(2);
      for (int i = 0; i <= nodes; ++i)
        for (int j = 0; j <= nodes; ++j) {
          x << lo(0) + i * sx, lo(1) + j * sy;
          double w = ((i == 0 || i == nodes) ? 0.5 : 1.0) * ((j == 0 || j == nodes) ? 0.5 : 1.0);
          acc += w * std::abs(kde_eval(K, h, X, x) - kde_eval(K, g, X, x));
        }
      double cur = acc * sx * sy;
      if (prev >= 0.0 && std::abs(cur - prev) < tol) return cur;
      prev = cur;
      nodes *= 2;
    }
    return prev;
  }
  // d >= 3: Halton quasi-random integration over the box
  const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (d > 8) throw std::invalid_argument("l1_distance_kde: d > 8 unsupported");
  const int N = 1 << 15;
  double vol = 1.0;
  for (int c = 0; c < d; ++c) vol *= hi(c) - lo(c);
  double acc = 0.0;
  Eigen::VectorXd x(d);
  for (int i = 1; i <= N; ++i) {
    for (int c = 0; c < d; ++c) x(c) = lo(c) + (hi(c) - lo(c)) * halton(i, primes[c]);
    acc += std::abs(kde_eval(K, h, X, x) - kde_eval(K, g, X, x));
  }
  return vol * acc / N;
}

std::string BandwidthSelection::to_json_string() const {
  nlohmann::json j;
  j["chosen_h"] = chosen_h;
  j["grid"] = grid;
  j["fallback"] = fallback;
  nlohmann::json recs = nlohmann::json::array();
  for (auto& r : records) {
    nlohmann::json o;
    o["h"] = r.h;
    o["max_l1_excess"] = r.max_l1_excess;
    o["l1_pass"] = r.l1_pass;
    o["fh_evaluated"] = r.fh_evaluated;
    if (r.fh_evaluated) {
      o["fh_value"] = r.fh_value;
      o["fh_cap"] = r.fh_cap;
      o["fh_pass"] = r.fh_pass;
    }
    recs.push_back(o);
  }
  j["records"] = recs;
  return j.dump();
}

BandwidthSelection lepski_bandwidth(const SampleSet& X, const SmoothingKernel& K,
                                    const KernelFamily& family, const LepskiConfig& cfg) {
  const int n = X.n(), d = X.dim();
  if (n < 8) throw std::invalid_argument("lepski_bandwidth: n >= 8 required");
  if (cfg.rho <= 1.0) throw std::invalid_argument("lepski_bandwidth: rho must exceed 1");
  if (cfg.A <= 0.0) throw std::invalid_argument("lepski_bandwidth: A must be positive");
  const double logn = std::log(static_cast<double>(n));
  const double floor = cfg.grid_floor_constant * logn * logn / n;

  BandwidthSelection sel;
  for (int k = 0;; ++k) {
    double hk = std::pow(cfg.rho, -k);
    if (hk <= floor) break;
    sel.grid.push_back(hk);
  }
  if (sel.grid.empty()) throw std::invalid_argument("lepski_bandwidth: empty grid");
  const int m = static_cast<int>(sel.grid.size());

  // shared evaluation grid for the L1 comparisons (d = 1 hot path); otherwise
  // fall back to pairwise l1_distance_kde
  const bool fast = d == 1;
  std::vector<Eigen::VectorXd> kde_cache(m);
  std::vector<bool> cached(m, false);
  Eigen::MatrixXd eval_grid;
  double step = 0.0;
  if (fast) {
    double hmin = sel.grid.back(), hmax = sel.grid.front();
    double lo = X.points.col(0).minCoeff() - 8.0 * hmax;
    double hi = X.points.col(0).maxCoeff() + 8.0 * hmax;
    int nodes = std::clamp(static_cast<int>((hi - lo) / (hmin / 4.0)), 1024, 65536);
    step = (hi - lo) / nodes;
    eval_grid.resize(nodes + 1, 1);
    for (int i = 0; i <= nodes; ++i) eval_grid(i, 0) = lo + i * step;
  }
  auto kde_of = [&](int idx) -> const Eigen::VectorXd& {
    if (!cached[idx]) {
      kde_cache[idx] = kde_on_grid(K, sel.grid[idx], X, eval_grid);
      cached[idx] = true;
    }
    return kde_cache[idx];
  };
  auto l1 = [&](int ih, int ig) {
    if (!fast) return l1_distance_kde(X, K, sel.grid[ih], sel.grid[ig], cfg.l1_tol);
    const Eigen::VectorXd& a = kde_of(ih);
    const Eigen::VectorXd& b = kde_of(ig);
    return (a - b).cwiseAbs().sum() * step;  // trapezoid endpoints negligible here
  };

  const double fh_cap = 1.0 / (std::sqrt(static_cast<double>(n)) * logn);
  auto fh_gap = [&](double h, double bail) -> double {
    switch (family.tag()) {
      case FamilyTag::Gaussian:
        return std::sqrt(std::max(
            0.0, smoothed_gap_gauss_sq_max(family.hi(), K, h, X, cfg.sigma_grid, bail)));
      case FamilyTag::ProductCauchy: {
        OptimizerConfig oc;
        oc.grid_size = cfg.sigma_grid;
        oc.xtol = 1e-4;
        return smoothed_empirical_cauchy(family.lo(), h, X, oc, family.hi()).value;
      }
      default: {
        OptimizerConfig oc;
        oc.grid_size = cfg.sigma_grid;
        oc.xtol = 1e-4;
        return smoothed_distance_generic(family, K, h, X, oc).value;
      }
    }
  };

  for (int i = 0; i < m; ++i) {  // largest first; the max in the rule is the
                                 // first passing candidate on a geometric grid
    CandidateRecord rec;
    rec.h = sel.grid[i];
    rec.max_l1_excess = -std::numeric_limits<double>::infinity();
    bool l1_ok = true;
    for (int j = i + 1; j < m; ++j) {
      double g = sel.grid[j];
      double thresh = std::sqrt(cfg.A / (n * std::pow(g, d)));
      double excess = l1(i, j) - thresh;
      rec.max_l1_excess = std::max(rec.max_l1_excess, excess);
      if (excess > 0.0) {
        l1_ok = false;
        break;
      }
    }
    if (i == m - 1) rec.max_l1_excess = 0.0;  // no smaller g to compare against
    rec.l1_pass = l1_ok;
    bool pass = l1_ok;
    if (pass && cfg.use_fh_cap) {
      rec.fh_evaluated = true;
      rec.fh_cap = fh_cap;
      rec.fh_value = fh_gap(rec.h, fh_cap * fh_cap);
      rec.fh_pass = rec.fh_value <= fh_cap;
      pass = rec.fh_pass;
    }
    sel.records.push_back(rec);
    if (pass) {
      sel.chosen_h = rec.h;
      return sel;
    }
  }
  sel.chosen_h = sel.grid.back();
  sel.fallback = true;
  return sel;
}

double calibrate_A(const SampleSet& pilot, const SmoothingKernel& K,
                   const LepskiConfig& cfg) {
  const int n = pilot.n(), d = pilot.dim();
  const double logn = std::log(static_cast<double>(n));
  const double floor = cfg.grid_floor_constant * logn * logn / n;
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double hk = std::pow(cfg.rho, -k);
    if (hk <= floor) break;
    grid.push_back(hk);
  }
  std::vector<double> vals;
  for (size_t i = 0; i < grid.size(); ++i)
    for (size_t j = i + 1; j < grid.size(); ++j) {
      double v = l1_distance_kde(pilot, K, grid[i], grid[j], cfg.l1_tol);
      vals.push_back(n * std::pow(grid[j], d) * v * v);
    }
  if (vals.empty()) throw std::invalid_argument("calibrate_A: grid too small");
  std::sort(vals.begin(), vals.end());
  size_t idx = static_cast<size_t>(0.95 * (vals.size() - 1));
  return vals[idx];
}

}  // namespace fh
