#include "fh/harness.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>
#include <stdexcept>

#include "fh/adaptive.hpp"
#include "fh/distances.hpp"
#include "fh/gauss_poly.hpp"
#include "fh/optimize.hpp"
#include "fh/quadrature.hpp"

namespace fh {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

const char* kind_name(DistKind k) {
  switch (k) {
    case DistKind::GaussianMixture: return "gaussian_mixture";
    case DistKind::Uniform: return "uniform";
    case DistKind::CauchyMixture: return "cauchy_mixture";
  }
  return "?";
}

DistKind kind_from_name(const std::string& s) {
  if (s == "gaussian_mixture") return DistKind::GaussianMixture;
  if (s == "uniform") return DistKind::Uniform;
  if (s == "cauchy_mixture") return DistKind::CauchyMixture;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

void validate(const DistributionSpec& spec) {
  if (spec.dim < 1) throw std::invalid_argument("DistributionSpec: dim >= 1 required");
  if (spec.kind == DistKind::Uniform) {
    if (spec.uniform_lo.size() != spec.dim || spec.uniform_hi.size() != spec.dim)
      throw std::invalid_argument("DistributionSpec: uniform box dim mismatch");
    for (int c = 0; c < spec.dim; ++c)
      if (!(spec.uniform_lo(c) < spec.uniform_hi(c)))
        throw std::invalid_argument("DistributionSpec: empty uniform box");
    return;
  }
  if (spec.components.empty())
    throw std::invalid_argument("DistributionSpec: mixture needs components");
  double wsum = 0.0;
  for (auto& c : spec.components) {
    if (c.weight < 0.0) throw std::invalid_argument("DistributionSpec: negative weight");
    if (c.mean.size() != spec.dim || c.var.size() != spec.dim)
      throw std::invalid_argument("DistributionSpec: component dim mismatch");
    if ((c.var.array() < 0.0).any())
      throw std::invalid_argument("DistributionSpec: negative variance");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("DistributionSpec: weights must sum to 1");
}

// evaluate a GaussPoly entrywise on a matrix of squared arguments
Eigen::ArrayXXd gp_on_sq(const GaussPoly& g, const Eigen::ArrayXXd& X2) {
  Eigen::ArrayXXd v = Eigen::ArrayXXd::Constant(X2.rows(), X2.cols(), 0.0);
  for (auto it = g.coeffs.rbegin(); it != g.coeffs.rend(); ++it) v = v * X2 + *it;
  return v * (-g.rate * X2).exp();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

DistributionSpec DistributionSpec::std_normal(int dim) {
  DistributionSpec s;
  s.kind = DistKind::GaussianMixture;
  s.dim = dim;
  s.smoothness = 10;  // C-infinity density; any declared order is admissible
  MixtureComponent c;
  c.weight = 1.0;
  c.mean = Eigen::VectorXd::Zero(dim);
  c.var = Eigen::VectorXd::Ones(dim);
  s.components.push_back(std::move(c));
  return s;
}

std::string DistributionSpec::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = kind_name(kind);
  j["dim"] = dim;
  j["smoothness"] = smoothness;
  if (kind == DistKind::Uniform) {
    j["lo"] = std::vector<double>(uniform_lo.data(), uniform_lo.data() + uniform_lo.size());
    j["hi"] = std::vector<double>(uniform_hi.data(), uniform_hi.data() + uniform_hi.size());
  } else {
    nlohmann::json comps = nlohmann::json::array();
    for (auto& c : components) {
      nlohmann::json o;
      o["weight"] = c.weight;
      o["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
      o["var"] = std::vector<double>(c.var.data(), c.var.data() + c.var.size());
      comps.push_back(o);
    }
    j["components"] = comps;
  }
  return j.dump();
}

DistributionSpec DistributionSpec::from_json_string(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DistributionSpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  s.dim = j.at("dim").get<int>();
  s.smoothness = j.value("smoothness", 1);
  if (s.kind == DistKind::Uniform) {
    auto lo = j.at("lo").get<std::vector<double>>();
    auto hi = j.at("hi").get<std::vector<double>>();
    s.uniform_lo = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
    s.uniform_hi = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());
  } else {
    for (auto& o : j.at("components")) {
      MixtureComponent c;
      c.weight = o.at("weight").get<double>();
      auto mu = o.at("mean").get<std::vector<double>>();
      auto v = o.at("var").get<std::vector<double>>();
      c.mean = Eigen::Map<Eigen::VectorXd>(mu.data(), mu.size());
      c.var = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
      s.components.push_back(std::move(c));
    }
  }
  validate(s);
  return s;
}

SampleSet sample_distribution(const DistributionSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_distribution: n >= 1 required");
  validate(spec);
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd pts(n, spec.dim);
  if (spec.kind == DistKind::Uniform) {
    for (int c = 0; c < spec.dim; ++c) {
      std::uniform_real_distribution<double> U(spec.uniform_lo(c), spec.uniform_hi(c));
      for (int i = 0; i < n; ++i) pts(i, c) = U(rng);
    }
  } else {
    std::vector<double> w;
    for (auto& c : spec.components) w.push_back(c.weight);
    std::discrete_distribution<int> pick(w.begin(), w.end());
    std::normal_distribution<double> Z(0.0, 1.0);
    std::cauchy_distribution<double> C(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const MixtureComponent& comp = spec.components[pick(rng)];
      for (int c = 0; c < spec.dim; ++c) {
        double z = spec.kind == DistKind::GaussianMixture
                       ? std::sqrt(comp.var(c)) * Z(rng)
                       : comp.var(c) * C(rng);
        pts(i, c) = comp.mean(c) + z;
      }
    }
  }
  SampleSet out(std::move(pts), seed, std::string("dist:") + kind_name(spec.kind));
  return out;
}

double density(const DistributionSpec& spec, const Eigen::VectorXd& x) {
  validate(spec);
  if (x.size() != spec.dim) throw std::invalid_argument("density: dim mismatch");
  if (spec.kind == DistKind::Uniform) {
    double vol = 1.0;
    for (int c = 0; c < spec.dim; ++c) {
      if (x(c) < spec.uniform_lo(c) || x(c) > spec.uniform_hi(c)) return 0.0;
      vol *= spec.uniform_hi(c) - spec.uniform_lo(c);
    }
    return 1.0 / vol;
  }
  double acc = 0.0;
  for (auto& comp : spec.components) {
    double p = 1.0;
    for (int c = 0; c < spec.dim; ++c) {
      double d = x(c) - comp.mean(c);
      if (spec.kind == DistKind::GaussianMixture) {
        double v = comp.var(c);
        if (v <= 0.0) return d == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        p *= std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
      } else {
        double g = comp.var(c);
        p *= g / (M_PI * (d * d + g * g));
      }
    }
    acc += comp.weight * p;
  }
  return acc;
}

// E_Y psi_sigma(x - Y): per coordinate (1+2 sigma v)^{-1/2} exp(-sigma d^2/(1+2 sigma v))
static double mean_embed_gauss(double sigma, const Eigen::VectorXd& x,
                               const DistributionSpec& spec) {
  double acc = 0.0;
  for (auto& comp : spec.components) {
    double p = comp.weight;
    for (int c = 0; c < x.size(); ++c) {
      double A = 1.0 + 2.0 * sigma * comp.var(c);
      double d = x(c) - comp.mean(c);
      p *= std::exp(-sigma * d * d / A) / std::sqrt(A);
    }
    acc += p;
  }
  return acc;
}

// E psi_sigma(Y - Y'), Y, Y' independent draws from the mixture
static double self_embed_gauss(double sigma, const DistributionSpec& spec) {
  double acc = 0.0;
  for (auto& cj : spec.components)
    for (auto& ck : spec.components) {
      double p = cj.weight * ck.weight;
      for (int c = 0; c < cj.mean.size(); ++c) {
        double A = 1.0 + 2.0 * sigma * (cj.var(c) + ck.var(c));
        double d = cj.mean(c) - ck.mean(c);
        p *= std::exp(-sigma * d * d / A) / std::sqrt(A);
      }
      acc += p;
    }
  return acc;
}

double population_mmd_sq_gauss(double sigma, const SampleSet& X,
                               const DistributionSpec& spec) {
  if (spec.kind != DistKind::GaussianMixture)
    throw std::invalid_argument("population_mmd_sq_gauss: gaussian mixture required");
  validate(spec);
  const int n = X.n();
  Eigen::MatrixXd D2 = pairwise_sq_dists(X.points, X.points);
  double xx = (-sigma * D2.array()).exp().sum() / (static_cast<double>(n) * n);
  double xp = 0.0;
  for (int i = 0; i < n; ++i) xp += mean_embed_gauss(sigma, X.points.row(i), spec);
  xp /= n;
  return xx - 2.0 * xp + self_embed_gauss(sigma, spec);
}

double emp_fh_gauss(const SampleSet& X, const DistributionSpec& spec, double a,
                    int sigma_grid) {
  if (spec.kind != DistKind::GaussianMixture)
    throw std::invalid_argument("emp_fh_gauss: gaussian mixture required");
  validate(spec);
  const int n = X.n();
  Eigen::ArrayXXd D2 = pairwise_sq_dists(X.points, X.points).array();
  auto f = [&](double sigma) {
    double xx = (-sigma * D2).exp().sum() / (static_cast<double>(n) * n);
    double xp = 0.0;
    for (int i = 0; i < n; ++i) xp += mean_embed_gauss(sigma, X.points.row(i), spec);
    xp /= n;
    return xx - 2.0 * xp + self_embed_gauss(sigma, spec);
  };
  ScalarMax m = grid_golden_max(f, KernelFamily::kDefaultSigmaMinFrac * a, a, sigma_grid,
                                1e-4 * a);
  return std::sqrt(std::max(0.0, m.fx));
}

double kde_fh_gauss(const SampleSet& X, const DistributionSpec& spec,
                    const SmoothingKernel& K, double h, double a, int sigma_grid) {
  if (spec.kind != DistKind::GaussianMixture)
    throw std::invalid_argument("kde_fh_gauss: gaussian mixture required");
  if (K.base != BaseTag::GaussianBase)
    throw std::invalid_argument("kde_fh_gauss: gaussian base required");
  validate(spec);
  const int n = X.n(), d = X.dim();
  const bool order2 = K.poly.size() == 1;
  if (!order2 && d != 1)
    throw std::invalid_argument("kde_fh_gauss: order > 2 needs d = 1");
  if (h < 0.0) throw std::invalid_argument("kde_fh_gauss: negative bandwidth");

  Eigen::ArrayXXd D2 = pairwise_sq_dists(X.points, X.points).array();
  const std::vector<double> gauss_density_poly{1.0 / std::sqrt(M_PI)};

  auto f = [&](double sigma) {
    GaussPoly psi{sigma, {1.0}};
    GaussPoly g1 = smooth_gauss_poly(K.poly, h, psi);   // K_h * psi, per coordinate
    GaussPoly g2 = smooth_gauss_poly(K.poly, h, g1);    // K_h * K_h * psi

    // (1/n^2) sum_ij prod_c g2(X_ic - X_jc)
    double xx;
    if (order2) {
      double coef = std::pow(g2.coeffs[0], d);
      xx = coef * (-g2.rate * D2).exp().sum() / (static_cast<double>(n) * n);
    } else {
      xx = gp_on_sq(g2, D2).sum() / (static_cast<double>(n) * n);
    }

    // (2/n) sum_i E_Y (K_h * psi)(X_i - Y): convolve g1 with each component's
    // per-coordinate centered normal density (bandwidth sqrt(2 v) trick)
    double xp = 0.0;
    for (auto& comp : spec.components) {
      std::vector<GaussPoly> gv(d);
      for (int c = 0; c < d; ++c)
        gv[c] = smooth_gauss_poly(gauss_density_poly, std::sqrt(2.0 * comp.var(c)), g1);
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int c = 0; c < d; ++c) p *= gv[c](X.points(i, c) - comp.mean(c));
        s += p;
      }
      xp += comp.weight * s;
    }
    xp /= n;

    return xx - 2.0 * xp + self_embed_gauss(sigma, spec);
  };
  ScalarMax m = grid_golden_max(f, KernelFamily::kDefaultSigmaMinFrac * a, a, sigma_grid,
                                1e-4 * a);
  return std::sqrt(std::max(0.0, m.fx));
}

double kde_l1_risk(const SampleSet& X, const DistributionSpec& spec,
                   const SmoothingKernel& K, double h) {
  if (X.dim() != 1) throw std::invalid_argument("kde_l1_risk: d = 1 only");
  validate(spec);
  double spread = 0.0, lo_c = 0.0, hi_c = 0.0;
  if (spec.kind == DistKind::Uniform) {
    lo_c = spec.uniform_lo(0);
    hi_c = spec.uniform_hi(0);
  } else {
    lo_c = hi_c = spec.components.front().mean(0);
    for (auto& c : spec.components) {
      lo_c = std::min(lo_c, c.mean(0));
      hi_c = std::max(hi_c, c.mean(0));
      spread = std::max(spread, std::sqrt(c.var(0)));
    }
  }
  double lo = std::min(X.points.col(0).minCoeff() - 8.0 * h, lo_c - 10.0 * spread - 1.0);
  double hi = std::max(X.points.col(0).maxCoeff() + 8.0 * h, hi_c + 10.0 * spread + 1.0);

  int nodes = 2048;
  double prev = -1.0;
  for (int it = 0; it < 6; ++it) {
    double step = (hi - lo) / nodes;
    Eigen::MatrixXd grid(nodes + 1, 1);
    for (int i = 0; i <= nodes; ++i) grid(i, 0) = lo + i * step;
    Eigen::VectorXd f = kde_on_grid(K, h, X, grid);
    std::vector<double> av(nodes + 1);
    Eigen::VectorXd x(1);
    for (int i = 0; i <= nodes; ++i) {
      x(0) = grid(i, 0);
      av[i] = std::abs(f(i) - density(spec, x));
    }
    double cur = integrate_trapezoid(av, step);
    if (prev >= 0.0 && std::abs(cur - prev) < 1e-4) return cur;
    prev = cur;
    nodes *= 2;
  }
  return prev;
}

std::string ExperimentReport::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["sweep"] = sweep;
  j["means"] = means;
  j["stderrs"] = stderrs;
  j["slope"] = slope;
  j["slope_stderr"] = slope_stderr;
  j["extra"] = extra;
  j["note"] = note;
  j["config_hash"] = config_hash;
  return j.dump();
}

std::string ExperimentReport::to_tidy_csv() const {
  std::string out = "n,mean,stderr\n";
  for (size_t i = 0; i < sweep.size(); ++i) {
    out += std::to_string(sweep[i]) + "," + std::to_string(means[i]) + "," +
           std::to_string(stderrs[i]) + "\n";
  }
  return out;
}

std::pair<double, double> ols_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const size_t n = x.size();
  if (n != y.size() || n < 3) throw std::invalid_argument("ols_slope: need >= 3 points");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double b = sxy / sxx;
  double a = my - b * mx;
  double sse = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - a - b * x[i];
    sse += r * r;
  }
  double se = std::sqrt(sse / (n - 2) / sxx);
  return {b, se};
}

ExperimentReport rate_experiment(const RateConfig& cfg) {
  if (cfg.n_list.size() < 5) throw std::invalid_argument("rate_experiment: >= 5 n values");
  if (cfg.reps < 20) throw std::invalid_argument("rate_experiment: reps >= 20");
  validate(cfg.spec);
  const int d = cfg.spec.dim;

  SmoothingKernel K;
  if (cfg.quantity != RateQuantity::EmpFh)
    K = build_order_kernel(cfg.order, d, BaseTag::GaussianBase);

  ExperimentReport rep;
  {
    nlohmann::json c;
    c["quantity"] = static_cast<int>(cfg.quantity);
    c["spec"] = nlohmann::json::parse(cfg.spec.to_json_string());
    c["family_a"] = cfg.family_a;
    c["n_list"] = cfg.n_list;
    c["reps"] = cfg.reps;
    c["order"] = cfg.order;
    c["s"] = cfg.s;
    c["use_lepski"] = cfg.use_lepski;
    c["lepski_A"] = cfg.lepski_A;
    c["bandwidth_constant"] = cfg.bandwidth_constant;
    c["sigma_grid"] = cfg.sigma_grid;
    c["seed"] = cfg.seed;
    rep.config_hash = fnv1a_hash(c.dump());
  }

  for (size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    const double hn = bandwidth_rule(n, cfg.s, d, BandwidthMode::L1Optimal,
                                     cfg.bandwidth_constant);
    std::vector<double> vals(cfg.reps);
    for (int r = 0; r < cfg.reps; ++r) {
      std::uint64_t sd = derive_seed(cfg.seed, ni * 1000003ull + r);
      SampleSet X = sample_distribution(cfg.spec, n, sd);
      switch (cfg.quantity) {
        case RateQuantity::EmpFh:
          vals[r] = emp_fh_gauss(X, cfg.spec, cfg.family_a, cfg.sigma_grid);
          break;
        case RateQuantity::KdeFh:
          vals[r] = kde_fh_gauss(X, cfg.spec, K, hn, cfg.family_a, cfg.sigma_grid);
          break;
        case RateQuantity::KdeL1: {
          double h = hn;
          if (cfg.use_lepski) {
            LepskiConfig lc;
            lc.A = cfg.lepski_A;
            lc.family_a = cfg.family_a;
            lc.sigma_grid = cfg.sigma_grid;
            KernelFamily fam(FamilyTag::Gaussian, 0.0, cfg.family_a, d);
            h = lepski_bandwidth(X, K, fam, lc).chosen_h;
          }
          vals[r] = kde_l1_risk(X, cfg.spec, K, h);
          break;
        }
        case RateQuantity::SmoothedGap:
          vals[r] = std::sqrt(std::max(
              0.0, smoothed_gap_gauss_sq_max(cfg.family_a, K, hn, X, cfg.sigma_grid)));
          break;
      }
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= cfg.reps;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    rep.sweep.push_back(n);
    rep.means.push_back(mean);
    rep.stderrs.push_back(std::sqrt(ss / (cfg.reps * (cfg.reps - 1.0))));
    if (cfg.quantity == RateQuantity::SmoothedGap)
      rep.extra.push_back(std::sqrt(static_cast<double>(n)) * mean);
  }

  std::vector<double> lx, ly;
  for (size_t i = 0; i < rep.sweep.size(); ++i) {
    if (rep.means[i] <= 0.0) continue;
    lx.push_back(std::log(rep.sweep[i]));
    ly.push_back(std::log(rep.means[i]));
  }
  auto [b, se] = ols_slope(lx, ly);
  rep.slope = b;
  rep.slope_stderr = se;
  return rep;
}

ExperimentReport clt_spread_experiment(const CltConfig& cfg) {
  if (cfg.n_list.size() < 2) throw std::invalid_argument("clt_spread_experiment: >= 2 n values");
  validate(cfg.spec);
  ExperimentReport rep;
  {
    nlohmann::json c;
    c["spec"] = nlohmann::json::parse(cfg.spec.to_json_string());
    c["family_a"] = cfg.family_a;
    c["n_list"] = cfg.n_list;
    c["reps"] = cfg.reps;
    c["sigma_grid"] = cfg.sigma_grid;
    c["seed"] = cfg.seed;
    rep.config_hash = fnv1a_hash(c.dump());
  }
  if (cfg.reps < 2) {
    rep.note = "insufficient replication";
    for (int n : cfg.n_list) {
      rep.sweep.push_back(n);
      rep.means.push_back(0.0);
      rep.stderrs.push_back(0.0);
    }
    return rep;
  }

  std::vector<std::vector<double>> samples;
  for (size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    std::vector<double> vals(cfg.reps);
    for (int r = 0; r < cfg.reps; ++r) {
      std::uint64_t sd = derive_seed(cfg.seed, ni * 1000003ull + r);
      SampleSet X = sample_distribution(cfg.spec, n, sd);
      vals[r] = std::sqrt(static_cast<double>(n)) *
                emp_fh_gauss(X, cfg.spec, cfg.family_a, cfg.sigma_grid);
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= cfg.reps;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    rep.sweep.push_back(n);
    rep.means.push_back(mean);
    rep.stderrs.push_back(std::sqrt(ss / (cfg.reps * (cfg.reps - 1.0))));
    samples.push_back(std::move(vals));
  }
  for (size_t i = 0; i + 1 < samples.size(); ++i)
    rep.extra.push_back(ks_distance(samples[i], samples[i + 1]));
  rep.note = "extra = KS distances between consecutive-n sqrt(n)*distance samples";
  return rep;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    sup = std::max(sup, std::abs(fa - fb));
  }
  return sup;
}

double ks_critical(int n, int m, double alpha) {
  double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((n + m) / (static_cast<double>(n) * m));
}

}  // namespace fh
