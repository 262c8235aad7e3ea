#include "fh/distances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <stdexcept>
#include <vector>

#include "fh/gauss_poly.hpp"
#include "fh/optimize.hpp"
#include "fh/quadrature.hpp"

namespace fh {

namespace {

constexpr double kNegClamp = -1e-12;

double clamp0(double v) {
  if (v < kNegClamp) return v;  // genuinely negative, let callers see it
  return std::max(v, 0.0);
}

DistanceEstimate from_scalar_max(const ScalarMax& m, const std::string& method) {
  DistanceEstimate e;
  e.value = std::sqrt(std::max(0.0, m.fx));
  e.arg_sup = m.x;
  e.method = method;
  e.evaluations = m.evaluations;
  e.bracket_lo = m.bracket_lo;
  e.bracket_hi = m.bracket_hi;
  e.tol_achieved = m.tol_achieved;
  e.budget_exhausted = m.budget_exhausted;
  return e;
}

// Pairwise differences of X rows, one row per ordered pair (i, j), i < j.
Eigen::MatrixXd pair_diffs(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd D(n * (n - 1) / 2, X.cols());
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) D.row(c++) = X.row(i) - X.row(j);
  return D;
}

}  // namespace

std::string DistanceEstimate::to_json_string() const {
  nlohmann::json j;
  j["value"] = value;
  j["arg_sup"] = arg_sup;
  if (arg_point.size() > 0)
    j["arg_point"] = std::vector<double>(arg_point.data(), arg_point.data() + arg_point.size());
  j["method"] = method;
  nlohmann::json d;
  d["evaluations"] = evaluations;
  d["bracket"] = {bracket_lo, bracket_hi};
  d["tol_achieved"] = tol_achieved;
  if (quadrature_error > 0.0) d["quadrature_error"] = quadrature_error;
  d["budget_exhausted"] = budget_exhausted;
  j["diagnostics"] = d;
  return j.dump();
}

double mmd_squared(const KernelFamily& family, double param, const SampleSet& X,
                   const SampleSet& Y, bool u_statistic) {
  const int n = X.n(), m = Y.n();
  if (n < 1 || m < 1) throw std::invalid_argument("mmd_squared: empty sample set");
  Eigen::MatrixXd Gxx = family.gram(param, X.points, X.points);
  Eigen::MatrixXd Gyy = family.gram(param, Y.points, Y.points);
  Eigen::MatrixXd Gxy = family.gram(param, X.points, Y.points);
  if (!u_statistic) {
    double v = Gxx.sum() / (static_cast<double>(n) * n) +
               Gyy.sum() / (static_cast<double>(m) * m) -
               2.0 * Gxy.sum() / (static_cast<double>(n) * m);
    return clamp0(v);
  }
  if (n < 2 || m < 2) throw std::invalid_argument("u-statistic mmd needs n,m >= 2");
  double xx = (Gxx.sum() - Gxx.trace()) / (static_cast<double>(n) * (n - 1));
  double yy = (Gyy.sum() - Gyy.trace()) / (static_cast<double>(m) * (m - 1));
  return xx + yy - 2.0 * Gxy.sum() / (static_cast<double>(n) * m);
}

DistanceEstimate sup_mmd(const KernelFamily& family, const SampleSet& X,
                         const SampleSet& Y, const OptimizerConfig& cfg) {
  auto obj = [&](double p) { return mmd_squared(family, p, X, Y); };
  ScalarMax m = grid_golden_max(obj, family.lo(), family.hi(), cfg.grid_size, cfg.xtol,
                                cfg.max_evals);
  return from_scalar_max(m, "v_statistic");
}

DistanceEstimate smoothed_empirical_gauss(double a, double h, const SampleSet& X,
                                          const OptimizerConfig& cfg) {
  return smoothed_empirical_gauss_kernel(
      a, build_order_kernel(2, X.dim(), BaseTag::GaussianBase), h, X, cfg);
}

DistanceEstimate smoothed_empirical_gauss_kernel(double a, const SmoothingKernel& K,
                                                 double h, const SampleSet& X,
                                                 const OptimizerConfig& cfg) {
  if (h < 0.0) throw std::invalid_argument("smoothed_empirical_gauss: h < 0");
  if (K.base != BaseTag::GaussianBase)
    throw std::invalid_argument("smoothed_empirical_gauss: gaussian base required");
  if (K.dim != X.dim()) throw std::invalid_argument("kernel/sample dimension mismatch");
  const double lo = KernelFamily::kDefaultSigmaMinFrac * a;
  if (h == 0.0) {  // K_0 = delta, all three terms cancel
    DistanceEstimate e;
    e.method = "closed_form";
    e.arg_sup = lo;
    return e;
  }
  const int n = X.n(), d = X.dim();
  const Eigen::MatrixXd U = pair_diffs(X.points);
  const long npairs = U.rows();

  auto objective = [&](double sigma) {
    GaussPoly g1 = smooth_gauss_poly(K.poly, h, GaussPoly{sigma, {1.0}});
    GaussPoly g2 = smooth_gauss_poly(K.poly, h, g1);
    // diagonal (u = 0) terms
    double diag = 1.0, d1 = 1.0, d2 = 1.0;
    for (int c = 0; c < d; ++c) {
      d2 *= g2.coeffs[0];
      d1 *= g1.coeffs[0];
    }
    double s = n * (d2 - 2.0 * d1 + diag);
    for (long p = 0; p < npairs; ++p) {
      double t2 = 1.0, t1 = 1.0, t0 = 1.0;
      for (int c = 0; c < d; ++c) {
        double u = U(p, c);
        t2 *= g2(u);
        t1 *= g1(u);
        t0 *= std::exp(-sigma * u * u);
      }
      s += 2.0 * (t2 - 2.0 * t1 + t0);
    }
    return s / (static_cast<double>(n) * n);
  };
  ScalarMax m = grid_golden_max(objective, lo, a, cfg.grid_size, cfg.xtol, cfg.max_evals);
  return from_scalar_max(m, "closed_form");
}

DistanceEstimate smoothed_empirical_cauchy(double c, double h, const SampleSet& X,
                                           const OptimizerConfig& cfg, double c_max) {
  if (h < 0.0) throw std::invalid_argument("smoothed_empirical_cauchy: h < 0");
  if (c <= 0.0) throw std::invalid_argument("smoothed_empirical_cauchy: c must be positive");
  if (c_max <= 0.0) c_max = KernelFamily::kDefaultCMaxFrac * c;
  if (h == 0.0) {
    DistanceEstimate e;
    e.method = "closed_form";
    e.arg_sup = c;
    return e;
  }
  const int n = X.n(), d = X.dim();
  const Eigen::MatrixXd U = pair_diffs(X.points);
  const long npairs = U.rows();

  // K_h * phi_a = (a/(a+h))^d phi_{a+h} per the Cauchy scale-addition identity.
  auto phi = [&](double alpha, long p) {
    double v = 1.0;
    const double a2 = alpha * alpha;
    for (int cc = 0; cc < d; ++cc) {
      double u = U(p, cc);
      v *= a2 / (a2 + u * u);
    }
    return v;
  };
  auto objective = [&](double alpha) {
    const double c2 = std::pow(alpha / (alpha + 2.0 * h), d);
    const double c1 = std::pow(alpha / (alpha + h), d);
    double s = n * (c2 - 2.0 * c1 + 1.0);  // u = 0 diagonal
    for (long p = 0; p < npairs; ++p)
      s += 2.0 * (c2 * phi(alpha + 2.0 * h, p) - 2.0 * c1 * phi(alpha + h, p) + phi(alpha, p));
    return s / (static_cast<double>(n) * n);
  };
  ScalarMax m = grid_golden_max(objective, c, c_max, cfg.grid_size, cfg.xtol, cfg.max_evals);
  return from_scalar_max(m, "closed_form");
}

DistanceEstimate smoothed_cross_gauss(const SampleSet& X, double h, const SampleSet& Y,
                                      double g, double a, const OptimizerConfig& cfg) {
  if (h < 0.0 || g < 0.0) throw std::invalid_argument("smoothed_cross_gauss: negative bandwidth");
  if (X.dim() != Y.dim()) throw std::invalid_argument("smoothed_cross_gauss: dim mismatch");
  const int n = X.n(), m = Y.n(), d = X.dim();
  const Eigen::ArrayXXd Dxx = pairwise_sq_dists(X.points, X.points).array();
  const Eigen::ArrayXXd Dyy = pairwise_sq_dists(Y.points, Y.points).array();
  const Eigen::ArrayXXd Dxy = pairwise_sq_dists(X.points, Y.points).array();

  // K_s * K_t * psi_sigma = (sigma (s^2 + t^2) + 1)^{-d/2} psi_{sigma / (...)}
  auto block = [&](double sigma, double s, double t, const Eigen::ArrayXXd& D) {
    const double A = sigma * (s * s + t * t) + 1.0;
    return std::pow(A, -d / 2.0) * (-(sigma / A) * D).exp().sum();
  };
  auto objective = [&](double sigma) {
    double v = block(sigma, h, h, Dxx) / (static_cast<double>(n) * n) +
               block(sigma, g, g, Dyy) / (static_cast<double>(m) * m) -
               2.0 * block(sigma, h, g, Dxy) / (static_cast<double>(n) * m);
    return v;
  };
  const double lo = KernelFamily::kDefaultSigmaMinFrac * a;
  ScalarMax sm = grid_golden_max(objective, lo, a, cfg.grid_size, cfg.xtol, cfg.max_evals);
  return from_scalar_max(sm, "closed_form");
}

namespace {

struct ConvRule {
  // (K_h * psi)(u) ~ sum_k weight[k] * psi(u - offset[k]); offsets are d-dim.
  std::vector<Eigen::VectorXd> offsets;
  std::vector<double> weights;
};

// Multiscale rule for int weight(z) g(z) dz with a heavy-tailed weight:
// Gauss-Legendre on the core [-1, 1] plus log-spaced Gauss-Legendre tails out
// to |z| = 3000, dense enough to resolve integrand features at any scale.
// The tail truncation error cancels in the double-minus-single combination.
template <class F>
void cauchy_weighted_nodes(int q, F weight, std::vector<double>& z, std::vector<double>& w) {
  LegendreRule core = gauss_legendre(std::max(2, q));
  for (size_t i = 0; i < core.nodes.size(); ++i) {
    z.push_back(core.nodes[i]);
    w.push_back(core.weights[i] * weight(core.nodes[i]));
  }
  const double W = std::log(3000.0);
  LegendreRule tail = gauss_legendre(std::max(2, 3 * q));
  for (size_t i = 0; i < tail.nodes.size(); ++i) {
    double v = 0.5 * W * (tail.nodes[i] + 1.0);
    double zz = std::exp(v);
    double wt = 0.5 * W * tail.weights[i] * zz * weight(zz);
    z.push_back(zz);
    w.push_back(wt);
    z.push_back(-zz);
    w.push_back(wt);
  }
}

// (kappa * kappa)(s) for the standard Cauchy base density, by quadrature:
// z = tan(theta) and the symmetry about s/2 keep the integrand smooth.
double cauchy_selfconv(double s) {
  s = std::abs(s);
  double theta_half = std::atan(s / 2.0);
  QuadResult q = integrate_simpson(
      [s](double th) {
        double r = s - std::tan(th);
        return 1.0 / (M_PI * (1.0 + r * r));
      },
      -M_PI / 2.0 + 1e-12, theta_half, 1e-11, 18, 256);
  return 2.0 / M_PI * q.value;
}

// 1-D node/factor list for the scaled smoothing kernel K_h.
void kernel_nodes_1d(const SmoothingKernel& K, int q, std::vector<double>& z,
                     std::vector<double>& w) {
  z.clear();
  w.clear();
  if (K.base == BaseTag::GaussianBase) {
    HermiteRule rule = gauss_hermite(q);
    for (int i = 0; i < q; ++i) {
      double p = 0.0, z2 = rule.nodes[i] * rule.nodes[i];
      for (auto it = K.poly.rbegin(); it != K.poly.rend(); ++it) p = p * z2 + *it;
      z.push_back(rule.nodes[i]);
      w.push_back(rule.weights[i] * p);
    }
  } else {
    cauchy_weighted_nodes(q, [](double t) { return 1.0 / (M_PI * (1.0 + t * t)); }, z, w);
  }
}

ConvRule single_conv_rule(const SmoothingKernel& K, double h, int q) {
  std::vector<double> z, w;
  kernel_nodes_1d(K, q, z, w);
  const int d = K.dim;
  const int m = static_cast<int>(z.size());
  ConvRule rule;
  std::vector<int> idx(d, 0);
  while (true) {
    Eigen::VectorXd off(d);
    double wt = 1.0;
    for (int c = 0; c < d; ++c) {
      off(c) = h * z[idx[c]];
      wt *= w[idx[c]];
    }
    rule.offsets.push_back(off);
    rule.weights.push_back(wt);
    int c = 0;
    while (c < d && ++idx[c] == m) idx[c++] = 0;
    if (c == d) break;
  }
  return rule;
}

ConvRule double_conv_rule(const SmoothingKernel& K, double h, int q) {
  // per-coordinate list of (offset, weight) for K_h * K_h; tensor over d
  std::vector<double> zz, ww;
  const int d = K.dim;
  if (K.base == BaseTag::CauchyBase) {
    // represent the self-convolved kernel directly: linear (not quadratic)
    // node count keeps the multiscale tails affordable
    std::vector<double> s, sw;
    cauchy_weighted_nodes(q, cauchy_selfconv, s, sw);
    for (size_t i = 0; i < s.size(); ++i) {
      zz.push_back(h * s[i]);
      ww.push_back(sw[i]);
    }
  } else {
    std::vector<double> z, w;
    kernel_nodes_1d(K, q, z, w);
    const int m = static_cast<int>(z.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        zz.push_back(h * (z[i] - z[j]));
        ww.push_back(w[i] * w[j]);
      }
  }
  const int qq = static_cast<int>(zz.size());
  ConvRule rule;
  std::vector<int> idx(d, 0);
  while (true) {
    Eigen::VectorXd off(d);
    double wt = 1.0;
    for (int c = 0; c < d; ++c) {
      off(c) = zz[idx[c]];
      wt *= ww[idx[c]];
    }
    rule.offsets.push_back(off);
    rule.weights.push_back(wt);
    int c = 0;
    while (c < d && ++idx[c] == qq) idx[c++] = 0;
    if (c == d) break;
  }
  return rule;
}

double apply_rule(const ConvRule& rule, const KernelFamily& family, double param,
                  const Eigen::VectorXd& u) {
  double s = 0.0;
  for (size_t k = 0; k < rule.offsets.size(); ++k)
    s += rule.weights[k] * family.eval_diff(param, u - rule.offsets[k]);
  return s;
}

}  // namespace

DistanceEstimate smoothed_distance_generic(const KernelFamily& family,
                                           const SmoothingKernel& K, double h,
                                           const SampleSet& X, const OptimizerConfig& cfg,
                                           int quad_nodes) {
  if (h < 0.0) throw std::invalid_argument("smoothed_distance_generic: h < 0");
  if (X.dim() > 2)
    throw std::invalid_argument("smoothed_distance_generic: d <= 2 (quadrature budget)");
  if (K.dim != X.dim() || family.dim() != X.dim())
    throw std::invalid_argument("smoothed_distance_generic: dimension mismatch");
  if (h == 0.0) {
    DistanceEstimate e;
    e.method = "quadrature";
    e.arg_sup = family.lo();
    return e;
  }
  const int n = X.n();
  const Eigen::MatrixXd U = pair_diffs(X.points);
  const long npairs = U.rows();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(X.dim());

  auto make_objective = [&](int q) {
    ConvRule r1 = single_conv_rule(K, h, q);
    ConvRule r2 = double_conv_rule(K, h, q);
    return [&family, &U, &zero, npairs, n, r1 = std::move(r1),
            r2 = std::move(r2)](double param) {
      double s = n * (apply_rule(r2, family, param, zero) -
                      2.0 * apply_rule(r1, family, param, zero) + 1.0);
      for (long p = 0; p < npairs; ++p) {
        Eigen::VectorXd u = U.row(p).transpose();
        s += 2.0 * (apply_rule(r2, family, param, u) - 2.0 * apply_rule(r1, family, param, u) +
                    family.eval_diff(param, u));
      }
      return s / (static_cast<double>(n) * n);
    };
  };
  auto obj = make_objective(quad_nodes);
  ScalarMax m = grid_golden_max(obj, family.lo(), family.hi(), cfg.grid_size, cfg.xtol,
                                cfg.max_evals);
  DistanceEstimate e = from_scalar_max(m, "quadrature");
  // error estimate: re-evaluate the optimum with a finer rule
  auto obj_fine = make_objective(quad_nodes + quad_nodes / 2);
  double fine = obj_fine(m.x);
  e.quadrature_error = std::abs(std::sqrt(std::max(0.0, fine)) - e.value);
  return e;
}

double smoothed_gap_gauss_sq_max(double a, const SmoothingKernel& K, double h,
                                 const SampleSet& X, int sigma_grid, double bail_above) {
  if (h < 0.0) throw std::invalid_argument("smoothed_gap: h < 0");
  if (K.base != BaseTag::GaussianBase)
    throw std::invalid_argument("smoothed_gap: gaussian base required");
  if (h == 0.0) return 0.0;
  const int n = X.n(), d = X.dim();
  const bool order2 = K.poly.size() == 1;
  if (!order2 && d != 1)
    throw std::invalid_argument("smoothed_gap fast path: r > 2 needs d = 1");
  const double lo = KernelFamily::kDefaultSigmaMinFrac * a;
  const int block = 512;

  auto eval_poly = [](const GaussPoly& gp, const Eigen::ArrayXXd& u2) {
    Eigen::ArrayXXd p = Eigen::ArrayXXd::Constant(u2.rows(), u2.cols(), gp.coeffs.back());
    for (int l = static_cast<int>(gp.coeffs.size()) - 2; l >= 0; --l) p = p * u2 + gp.coeffs[l];
    return (p * (-gp.rate * u2).exp()).eval();
  };

  double best = 0.0;
  // scan large sigma first: the gap peaks there, so a bail threshold triggers
  // on the first few evaluations
  for (int s = sigma_grid - 1; s >= 0; --s) {
    double sigma = sigma_grid == 1
                       ? a
                       : lo * std::pow(a / lo, static_cast<double>(s) / (sigma_grid - 1));
    GaussPoly g1 = smooth_gauss_poly(K.poly, h, GaussPoly{sigma, {1.0}});
    GaussPoly g2 = smooth_gauss_poly(K.poly, h, g1);
    double acc = 0.0;
    for (int r0 = 0; r0 < n; r0 += block) {
      int b = std::min(block, n - r0);
      Eigen::ArrayXXd D2 =
          pairwise_sq_dists(X.points.middleRows(r0, b), X.points).array();
      if (order2) {
        // product over coordinates collapses onto the squared distance
        double c1 = std::pow(g1.coeffs[0], d), c2 = std::pow(g2.coeffs[0], d);
        acc += c2 * (-g2.rate * D2).exp().sum() - 2.0 * c1 * (-g1.rate * D2).exp().sum() +
               (-sigma * D2).exp().sum();
      } else {
        acc += eval_poly(g2, D2).sum() - 2.0 * eval_poly(g1, D2).sum() +
               (-sigma * D2).exp().sum();
      }
    }
    double v = acc / (static_cast<double>(n) * n);
    best = std::max(best, v);
    if (bail_above >= 0.0 && best > bail_above) return best;
  }
  return best;
}

DistanceEstimate kx_distance(const KernelFamily& family, const SampleSet& X,
                             const SampleSet& Y, const OptimizerConfig& cfg) {
  if (X.n() < 1 || Y.n() < 1) throw std::invalid_argument("kx_distance: empty sample set");
  if (X.dim() != Y.dim()) throw std::invalid_argument("kx_distance: dim mismatch");
  const int d = X.dim();
  int evals = 0;

  auto value_at = [&](double param, const Eigen::VectorXd& y) {
    ++evals;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < X.n(); ++i)
      sx += family.eval_diff(param, y - X.points.row(i).transpose());
    for (int j = 0; j < Y.n(); ++j)
      sy += family.eval_diff(param, y - Y.points.row(j).transpose());
    return std::abs(sx / X.n() - sy / Y.n());
  };

  // seeds: all data points plus cross midpoints (capped)
  std::vector<Eigen::VectorXd> seeds;
  for (int i = 0; i < X.n(); ++i) seeds.push_back(X.points.row(i).transpose());
  for (int j = 0; j < Y.n(); ++j) seeds.push_back(Y.points.row(j).transpose());
  const int cap = 256;
  for (int i = 0; i < X.n() && static_cast<int>(seeds.size()) < cap; ++i)
    for (int j = 0; j < Y.n() && static_cast<int>(seeds.size()) < cap; ++j)
      seeds.push_back(0.5 * (X.points.row(i) + Y.points.row(j)).transpose());

  // search box for y
  Eigen::VectorXd lo(d), hi(d);
  for (int c = 0; c < d; ++c) {
    double mn = std::min(X.points.col(c).minCoeff(), Y.points.col(c).minCoeff());
    double mx = std::max(X.points.col(c).maxCoeff(), Y.points.col(c).maxCoeff());
    double pad = 0.5 * (mx - mn) + 1.0;
    lo(c) = mn - pad;
    hi(c) = mx + pad;
  }

  std::vector<double> params = family.param_grid(std::max(8, cfg.grid_size / 2));
  struct Cand {
    double value;
    double param;
    Eigen::VectorXd y;
  };
  std::vector<Cand> cands;
  for (double p : params)
    for (const auto& s : seeds) cands.push_back({value_at(p, s), p, s});
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.value > b.value; });

  // coordinate-wise golden refinement of y alternated with a parameter refine;
  // the landscape is multimodal, so refine several leading candidates and
  // never accept a step that lowers the value
  auto refine_y = [&](double param, Eigen::VectorXd y, double cur) {
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (int c = 0; c < d; ++c) {
        auto f = [&](double t) {
          Eigen::VectorXd yy = y;
          yy(c) = t;
          return value_at(param, yy);
        };
        ScalarMax m = golden_section_max(f, lo(c), hi(c), 1e-7 * (hi(c) - lo(c)), 80);
        if (m.fx > cur) {
          y(c) = m.x;
          cur = m.fx;
        }
      }
    }
    return std::make_pair(y, cur);
  };
  double best = cands.front().value;
  double best_param = cands.front().param;
  Eigen::VectorXd best_y = cands.front().y;
  const int top = std::min<int>(6, static_cast<int>(cands.size()));
  for (int t = 0; t < top; ++t) {
    double param = cands[t].param;
    auto [y, cur] = refine_y(param, cands[t].y, cands[t].value);
    auto fparam = [&](double p) { return value_at(p, y); };
    ScalarMax pm = grid_golden_max(fparam, family.lo(), family.hi(), 16, cfg.xtol, 2000);
    if (pm.fx > cur) {
      param = pm.x;
      cur = pm.fx;
    }
    std::tie(y, cur) = refine_y(param, y, cur);
    if (cur > best) {
      best = cur;
      best_param = param;
      best_y = y;
    }
  }

  DistanceEstimate e;
  e.value = best;
  e.arg_sup = best_param;
  e.arg_point = best_y;
  e.method = "multi_start";
  e.evaluations = evals;
  e.bracket_lo = family.lo();
  e.bracket_hi = family.hi();
  e.tol_achieved = cfg.xtol;
  return e;
}

}  // namespace fh
