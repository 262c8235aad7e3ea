#include "fh/smoothing.hpp"

#include <cmath>
#include <functional>
#include <json.hpp>
#include <limits>
#include <stdexcept>

#include "fh/quadrature.hpp"

namespace fh {

std::string to_string(BaseTag base) {
  return base == BaseTag::GaussianBase ? "gaussian_base" : "cauchy_base";
}

BaseTag base_tag_from_string(const std::string& s) {
  if (s == "gaussian_base") return BaseTag::GaussianBase;
  if (s == "cauchy_base") return BaseTag::CauchyBase;
  throw std::invalid_argument("unknown smoothing base: " + s);
}

double SmoothingKernel::eval1d(double u) const {
  if (base == BaseTag::CauchyBase) return 1.0 / (M_PI * (1.0 + u * u));
  double u2 = u * u, p = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * u2 + *it;
  return u2 > 700.0 ? 0.0 : p * std::exp(-u2);
}

double SmoothingKernel::eval(const Eigen::VectorXd& u) const {
  if (u.size() != dim) throw std::invalid_argument("smoothing kernel: dimension mismatch");
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= eval1d(u(i));
  return v;
}

SmoothingKernel build_order_kernel(int r, int d, BaseTag base) {
  if (r < 2 || r % 2) throw std::invalid_argument("kernel order must be even and >= 2");
  if (d < 1) throw std::invalid_argument("kernel dim must be >= 1");
  SmoothingKernel K;
  K.base = base;
  K.order = r;
  K.dim = d;
  if (base == BaseTag::CauchyBase) {
    if (r != 2) throw std::invalid_argument("cauchy base only supports order 2");
    return K;
  }
  // Moment system for kappa(u) = sum_l c_l u^{2l} e^{-u^2}:
  //   sum_l c_l Gamma(j + l + 1/2) = delta_{j0},  j = 0..r/2-1
  const int L = r / 2;
  Eigen::MatrixXd M(L, L);
  for (int j = 0; j < L; ++j)
    for (int l = 0; l < L; ++l) M(j, l) = std::tgamma(j + l + 0.5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
  rhs(0) = 1.0;
  Eigen::VectorXd c = M.fullPivLu().solve(rhs);
  K.poly.assign(c.data(), c.data() + L);
  return K;
}

SmoothingKernel kernel_from_json_string(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  return build_order_kernel(j.at("order").get<int>(), j.at("dim").get<int>(),
                            base_tag_from_string(j.at("base").get<std::string>()));
}

std::string kernel_to_json_string(const SmoothingKernel& K) {
  nlohmann::json j;
  j["base"] = to_string(K.base);
  j["order"] = K.order;
  j["dim"] = K.dim;
  return j.dump();
}

namespace {

struct Moment1d {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
  bool converged = true;
};

// int u^a kappa(u) du (signed) or int |u|^a |kappa(u)| du (absolute).
Moment1d coordinate_moment(const SmoothingKernel& K, int a, bool absolute) {
  if (K.base == BaseTag::CauchyBase && absolute && a >= 1)
    return {0.0, 0.0, false, true};  // |u|^a/(1+u^2) is not integrable
  if (!absolute && a % 2) return {0.0, 0.0, true, true};  // odd integrand
  const double lim = K.base == BaseTag::CauchyBase ? 1e6 : 14.0;
  auto f = [&](double u) {
    double k = K.eval1d(u);
    double m = std::pow(std::abs(u), a);
    return absolute ? m * std::abs(k) : m * k;
  };
  QuadResult q = integrate_simpson(f, -lim, lim, 1e-10, 24, 512);
  return {q.value, q.error, true, q.converged};
}

void enumerate_alphas(int dim, int remaining, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == dim - 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur.push_back(v);
    enumerate_alphas(dim, remaining - v, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> alphas_of_weight(int dim, int w) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_alphas(dim, w, cur, out);
  return out;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

MomentReport check_order(const SmoothingKernel& K, int r, double tol) {
  MomentReport rep;
  // per-coordinate moments; the product structure makes multivariate moments
  // products of these
  std::vector<Moment1d> sig(r + 1), abs(r + 1);
  for (int a = 0; a <= r; ++a) {
    sig[a] = coordinate_moment(K, a, false);
    abs[a] = coordinate_moment(K, a, true);
    if (!sig[a].converged || !abs[a].converged) rep.quadrature_ok = false;
  }
  double integral = 1.0, ierr = 0.0;
  for (int i = 0; i < K.dim; ++i) {
    integral *= sig[0].value;
    ierr += sig[0].error;
  }
  rep.integral = integral;
  rep.integral_error = ierr;

  bool ok = std::abs(integral - 1.0) <= tol;
  for (int w = 1; w <= r - 1; ++w) {
    for (auto& alpha : alphas_of_weight(K.dim, w)) {
      MomentEntry e;
      e.alpha = alpha;
      double v = 1.0, err = 0.0;
      for (int ai : alpha) {
        v *= sig[ai].value;
        err += sig[ai].error;
      }
      e.value = v;
      e.error = err;
      if (std::abs(v) > tol) ok = false;
      rep.vanishing.push_back(std::move(e));
    }
  }
  for (auto& alpha : alphas_of_weight(K.dim, r)) {
    MomentEntry e;
    e.alpha = alpha;
    double v = 1.0;
    bool finite = true;
    for (int ai : alpha) {
      if (!abs[ai].finite) finite = false;
      v *= abs[ai].value / factorial(ai);
    }
    e.finite = finite;
    e.value = finite ? v : std::numeric_limits<double>::infinity();
    if (!finite) ok = false;  // vanishing moments may hold but Theta(alpha) is infinite
    rep.theta.push_back(std::move(e));
  }
  rep.order_ok = ok;
  return rep;
}

std::string MomentReport::to_json_string() const {
  nlohmann::json j;
  j["integral"] = integral;
  j["integral_error"] = integral_error;
  auto dump = [](const std::vector<MomentEntry>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& e : v) {
      nlohmann::json o;
      o["alpha"] = e.alpha;
      o["value"] = e.finite ? nlohmann::json(e.value) : nlohmann::json("inf");
      o["error"] = e.error;
      a.push_back(o);
    }
    return a;
  };
  j["vanishing_moments"] = dump(vanishing);
  j["theta"] = dump(theta);
  j["order_ok"] = order_ok;
  j["quadrature_ok"] = quadrature_ok;
  return j.dump();
}

double kde_eval(const SmoothingKernel& K, double h, const SampleSet& X,
                const Eigen::VectorXd& x) {
  if (h <= 0.0) throw std::invalid_argument("kde_eval: bandwidth must be positive");
  if (x.size() != X.dim() || K.dim != X.dim())
    throw std::invalid_argument("kde_eval: dimension mismatch");
  const int n = X.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += K.eval((x - X.points.row(i).transpose()) / h);
  return s / (n * std::pow(h, X.dim()));
}

Eigen::VectorXd kde_on_grid(const SmoothingKernel& K, double h, const SampleSet& X,
                            const Eigen::MatrixXd& grid) {
  if (h <= 0.0) throw std::invalid_argument("kde_on_grid: bandwidth must be positive");
  const int g = static_cast<int>(grid.rows());
  Eigen::VectorXd out(g);
  if (X.dim() == 1 && K.base == BaseTag::GaussianBase) {
    // vectorized over samples per grid point
    const Eigen::ArrayXd xs = X.points.col(0).array();
    const int L = static_cast<int>(K.poly.size());
    out.setZero();
    for (int q = 0; q < g; ++q) {
      Eigen::ArrayXd z = (grid(q, 0) - xs) / h;
      Eigen::ArrayXd z2 = z * z;
      Eigen::ArrayXd p = Eigen::ArrayXd::Constant(xs.size(), K.poly[L - 1]);
      for (int l = L - 2; l >= 0; --l) p = p * z2 + K.poly[l];
      out(q) = (p * (-z2).exp()).sum();
    }
    return out / (X.n() * h);
  }
  for (int q = 0; q < g; ++q) out(q) = kde_eval(K, h, X, grid.row(q).transpose());
  return out;
}

double bandwidth_rule(int n, int s, int d, BandwidthMode mode, double constant) {
  if (n < 2) throw std::invalid_argument("bandwidth_rule: n must be >= 2");
  if (s < 1) throw std::invalid_argument("bandwidth_rule: s must be >= 1");
  double base = mode == BandwidthMode::L1Optimal ? static_cast<double>(n)
                                                 : n / std::log(static_cast<double>(n));
  return constant * std::pow(base, -1.0 / (2.0 * s + d));
}

bool order_condition_ok(int r, int s, int d) { return r > s + d / 2.0; }

}  // namespace fh
