#include "fh/kernels.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fh {

namespace {

bool lower_open(FamilyTag t) {
  return t == FamilyTag::Gaussian || t == FamilyTag::Laplacian || t == FamilyTag::Matern;
}

bool upper_unbounded(FamilyTag t) {
  return t == FamilyTag::InverseMultiquadric || t == FamilyTag::ProductCauchy;
}

// c^{2b-d}/(Gamma(b-d/2) 2^{b-1-d/2}) * (r/c)^{b-d/2} * BesselK_{b-d/2}(c r),
// normalized so the r -> 0 limit is 1.
double matern_eval(double c, double beta, int d, double r) {
  const double nu = beta - d / 2.0;
  if (nu <= 0.0) throw std::invalid_argument("matern: beta must exceed d/2");
  const double z = c * r;
  if (z < 1e-8) return 1.0;  // K_nu(z) ~ Gamma(nu) 2^{nu-1} z^{-nu}
  const double lognorm = -std::lgamma(nu) - (nu - 1.0) * std::log(2.0);
  return std::exp(lognorm + nu * std::log(z)) * std::cyl_bessel_k(nu, z);
}

}  // namespace

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Gaussian: return "gaussian";
    case FamilyTag::Laplacian: return "laplacian";
    case FamilyTag::Matern: return "matern";
    case FamilyTag::InverseMultiquadric: return "inverse_multiquadric";
    case FamilyTag::ProductCauchy: return "product_cauchy";
    case FamilyTag::Spline: return "spline";
    case FamilyTag::RbfMixture: return "rbf_mixture";
  }
  return "?";
}

FamilyTag family_tag_from_string(const std::string& s) {
  if (s == "gaussian") return FamilyTag::Gaussian;
  if (s == "laplacian") return FamilyTag::Laplacian;
  if (s == "matern") return FamilyTag::Matern;
  if (s == "inverse_multiquadric") return FamilyTag::InverseMultiquadric;
  if (s == "product_cauchy") return FamilyTag::ProductCauchy;
  if (s == "spline") return FamilyTag::Spline;
  if (s == "rbf_mixture") return FamilyTag::RbfMixture;
  throw std::invalid_argument("unknown kernel family: " + s);
}

KernelFamily::KernelFamily(FamilyTag tag, double domain_lo, double domain_hi, int dim,
                           double beta, std::vector<double> mix_weights,
                           std::vector<double> mix_rates, double sigma_min_frac,
                           double c_max_frac)
    : tag_(tag),
      lo_(domain_lo),
      hi_(domain_hi),
      dim_(dim),
      beta_(beta),
      mix_weights_(std::move(mix_weights)),
      mix_rates_(std::move(mix_rates)) {
  if (dim_ < 1) throw std::invalid_argument("kernel family: dim < 1");
  if (lower_open(tag_) && lo_ <= 0.0) {
    if (hi_ <= 0.0) throw std::invalid_argument("kernel family: upper endpoint must be > 0");
    lo_ = sigma_min_frac * hi_;
    truncated_lo_ = true;
  }
  if (upper_unbounded(tag_) && (!std::isfinite(hi_) || hi_ <= 0.0)) {
    if (lo_ <= 0.0) throw std::invalid_argument("kernel family: lower endpoint must be > 0");
    hi_ = c_max_frac * lo_;
    truncated_hi_ = true;
  }
  if (!(lo_ > 0.0) || !(hi_ >= lo_))
    throw std::invalid_argument("kernel family: empty or invalid parameter domain");
  if (tag_ == FamilyTag::Matern && beta_ <= dim_ / 2.0)
    throw std::invalid_argument("matern: beta must exceed d/2");
  if (tag_ == FamilyTag::InverseMultiquadric && beta_ <= 0.0)
    throw std::invalid_argument("inverse_multiquadric: beta must be positive");
  if (tag_ == FamilyTag::RbfMixture) {
    if (mix_weights_.empty() || mix_weights_.size() != mix_rates_.size())
      throw std::invalid_argument("rbf_mixture: weights/rates mismatch");
    double s = 0.0;
    for (size_t j = 0; j < mix_weights_.size(); ++j) {
      if (mix_weights_[j] < 0.0 || mix_rates_[j] <= 0.0)
        throw std::invalid_argument("rbf_mixture: weights must be >= 0, rates > 0");
      s += mix_weights_[j];
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("rbf_mixture: weights must sum to 1");
  }
}

void KernelFamily::require_param(double param) const {
  if (!contains(param)) {
    std::ostringstream os;
    os << "parameter " << param << " outside domain [" << lo_ << ", " << hi_ << "]";
    throw std::invalid_argument(os.str());
  }
}

double KernelFamily::eval_diff(double param, const Eigen::VectorXd& u) const {
  require_param(param);
  if (u.size() != dim_) throw std::invalid_argument("eval: dimension mismatch");
  switch (tag_) {
    case FamilyTag::Gaussian:
      return std::exp(-param * u.squaredNorm());
    case FamilyTag::Laplacian:
      return std::exp(-param * u.lpNorm<1>());
    case FamilyTag::Matern:
      return matern_eval(param, beta_, dim_, u.norm());
    case FamilyTag::InverseMultiquadric:
      return std::pow(1.0 + u.squaredNorm() / (param * param), -beta_);
    case FamilyTag::ProductCauchy: {
      double v = 1.0;
      const double c2 = param * param;
      for (int i = 0; i < dim_; ++i) v *= c2 / (c2 + u(i) * u(i));
      return v;
    }
    case FamilyTag::Spline: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) {
        double t = 1.0 - std::abs(u(i)) / param;
        if (t <= 0.0) return 0.0;
        v *= t;
      }
      return v;
    }
    case FamilyTag::RbfMixture: {
      const double r2 = u.squaredNorm();
      double v = 0.0;
      for (size_t j = 0; j < mix_weights_.size(); ++j)
        v += mix_weights_[j] * std::exp(-param * mix_rates_[j] * r2);
      return v;
    }
  }
  return 0.0;
}

double KernelFamily::eval(double param, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) const {
  if (x.size() != y.size()) throw std::invalid_argument("eval: dimension mismatch");
  return eval_diff(param, x - y);
}

Eigen::MatrixXd KernelFamily::gram(double param, const Eigen::MatrixXd& X,
                                   const Eigen::MatrixXd& Y) const {
  require_param(param);
  if (X.cols() != dim_ || Y.cols() != dim_)
    throw std::invalid_argument("gram: dimension mismatch");
  switch (tag_) {
    case FamilyTag::Gaussian:
      return (-param * pairwise_sq_dists(X, Y)).array().exp();
    case FamilyTag::InverseMultiquadric:
      return (1.0 + pairwise_sq_dists(X, Y).array() / (param * param)).pow(-beta_);
    case FamilyTag::RbfMixture: {
      Eigen::MatrixXd D = pairwise_sq_dists(X, Y);
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(D.rows(), D.cols());
      for (size_t j = 0; j < mix_weights_.size(); ++j)
        G.array() += mix_weights_[j] * (-param * mix_rates_[j] * D.array()).exp();
      return G;
    }
    default: {
      Eigen::MatrixXd G(X.rows(), Y.rows());
      for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < Y.rows(); ++j)
          G(i, j) = eval_diff(param, X.row(i).transpose() - Y.row(j).transpose());
      return G;
    }
  }
}

std::vector<double> KernelFamily::param_grid(int size) const {
  std::vector<double> g(size);
  if (size == 1) {
    g[0] = hi_;
    return g;
  }
  for (int i = 0; i < size; ++i)
    g[i] = lo_ * std::pow(hi_ / lo_, static_cast<double>(i) / (size - 1));
  return g;
}

KernelFamily KernelFamily::from_json_string(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  FamilyTag tag = family_tag_from_string(j.at("family").get<std::string>());
  auto dom = j.at("domain");
  double lo = dom.at(0).get<double>();
  double hi = dom.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                  : dom.at(1).get<double>();
  int dim = j.at("dim").get<int>();
  double beta = 0.0;
  std::vector<double> w, r;
  double smf = kDefaultSigmaMinFrac, cmf = kDefaultCMaxFrac;
  if (j.contains("aux")) {
    auto& a = j["aux"];
    if (a.contains("beta")) beta = a["beta"].get<double>();
    if (a.contains("weights")) w = a["weights"].get<std::vector<double>>();
    if (a.contains("rates")) r = a["rates"].get<std::vector<double>>();
    if (a.contains("sigma_min_frac")) smf = a["sigma_min_frac"].get<double>();
    if (a.contains("c_max_frac")) cmf = a["c_max_frac"].get<double>();
  }
  return KernelFamily(tag, lo, hi, dim, beta, std::move(w), std::move(r), smf, cmf);
}

KernelFamily KernelFamily::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

std::string KernelFamily::to_json_string() const {
  nlohmann::json j;
  j["family"] = to_string(tag_);
  j["domain"] = {lo_, hi_};
  j["dim"] = dim_;
  nlohmann::json aux = nlohmann::json::object();
  if (tag_ == FamilyTag::Matern || tag_ == FamilyTag::InverseMultiquadric) aux["beta"] = beta_;
  if (tag_ == FamilyTag::RbfMixture) {
    aux["weights"] = mix_weights_;
    aux["rates"] = mix_rates_;
  }
  if (truncated_lo_) aux["truncated_lo"] = true;
  if (truncated_hi_) aux["truncated_hi"] = true;
  j["aux"] = aux;
  return j.dump();
}

double rho_distance(const KernelFamily& family, double param1, double param2,
                    const SampleSet& X) {
  const int n = X.n();
  if (n < 2) throw std::invalid_argument("rho_distance: need at least 2 samples");
  Eigen::MatrixXd G1 = family.gram(param1, X.points, X.points);
  Eigen::MatrixXd G2 = family.gram(param2, X.points, X.points);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = G1(i, j) - G2(i, j);
      s += d * d;
    }
  return std::sqrt(2.0 * s / (static_cast<double>(n) * n));
}

Eigen::MatrixXd rho_matrix(const KernelFamily& family, const std::vector<double>& grid,
                           const SampleSet& X) {
  const int n = X.n();
  if (n < 2) throw std::invalid_argument("rho_matrix: need at least 2 samples");
  const int m = static_cast<int>(grid.size());
  const int npairs = n * (n - 1) / 2;
  // rows: grid parameters; cols: unordered sample pairs
  Eigen::MatrixXd V(m, npairs);
  for (int g = 0; g < m; ++g) {
    Eigen::MatrixXd G = family.gram(grid[g], X.points, X.points);
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) V(g, c++) = G(i, j);
  }
  Eigen::MatrixXd VVt = V * V.transpose();
  Eigen::MatrixXd R(m, m);
  const double scale = 2.0 / (static_cast<double>(n) * n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double d2 = VVt(a, a) + VVt(b, b) - 2.0 * VVt(a, b);
      R(a, b) = std::sqrt(scale * std::max(0.0, d2));
    }
  return R;
}

Cover cover_from_rho(const Eigen::MatrixXd& rho, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("cover: eps must be positive");
  const int m = static_cast<int>(rho.rows());
  if (m == 0) throw std::invalid_argument("cover: empty grid");
  Cover cover;
  cover.selected.push_back(0);
  Eigen::VectorXd mind = rho.col(0);
  while (true) {
    int far = 0;
    double dmax = mind.maxCoeff(&far);
    cover.radius = dmax;
    if (dmax <= eps) break;
    cover.selected.push_back(far);
    mind = mind.cwiseMin(rho.col(far));
  }
  return cover;
}

Cover empirical_cover(const KernelFamily& family, const std::vector<double>& grid,
                      const SampleSet& X, double eps) {
  return cover_from_rho(rho_matrix(family, grid, X), eps);
}

}  // namespace fh
