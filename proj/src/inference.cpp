#include "fh/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "fh/kernels.hpp"

namespace fh {

std::string TestResult::to_json_string() const {
  nlohmann::json j;
  j["statistic"] = statistic;
  j["p_value"] = p_value;
  j["permutations"] = permutations;
  j["alpha"] = alpha;
  j["reject"] = reject;
  j["seed"] = seed;
  j["degenerate"] = degenerate;
  return j.dump();
}

TestResult two_sample_test(const SampleSet& X, const SampleSet& Y, double h, double g,
                           double a, int B, double alpha, std::uint64_t seed,
                           int sigma_grid) {
  if (B < 99) throw std::invalid_argument("two_sample_test: B >= 99 required");
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("two_sample_test: bad alpha");
  if (h < 0.0 || g < 0.0) throw std::invalid_argument("two_sample_test: negative bandwidth");
  if (X.dim() != Y.dim()) throw std::invalid_argument("two_sample_test: dim mismatch");
  const int n = X.n(), m = Y.n(), N = n + m, d = X.dim();

  Eigen::MatrixXd raw(N, d);
  raw.topRows(n) = X.points;
  raw.bottomRows(m) = Y.points;
  // canonical (lexicographic) pooled order so the permutation draws depend only
  // on the pooled point set: swapping X and Y then gives the same p-value when
  // n = m and h = g
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int c = 0; c < d; ++c) {
      if (raw(a, c) != raw(b, c)) return raw(a, c) < raw(b, c);
    }
    return a < b;
  });
  Eigen::MatrixXd pooled(N, d);
  for (int i = 0; i < N; ++i) pooled.row(i) = raw.row(order[i]);
  Eigen::MatrixXd D2 = pairwise_sq_dists(pooled, pooled);

  TestResult res;
  res.permutations = B;
  res.alpha = alpha;
  res.seed = seed;
  if (D2.maxCoeff() < 1e-24) {  // all points identical
    res.degenerate = true;
    res.p_value = 1.0;
    return res;
  }

  // label matrix: column 0 is the observed assignment, columns 1..B are
  // random relabelings (1 = X group)
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, B + 1);
  for (int i = 0; i < N; ++i)
    if (order[i] < n) S(i, 0) = 1.0;
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  for (int b = 1; b <= B; ++b) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < n; ++i) S(idx[i], b) = 1.0;
  }
  const Eigen::MatrixXd T = Eigen::MatrixXd::Ones(N, B + 1) - S;

  const double lo = KernelFamily::kDefaultSigmaMinFrac * a;
  Eigen::VectorXd stat2 = Eigen::VectorXd::Zero(B + 1);
  const bool same_bw = h == g;
  for (int s = 0; s < sigma_grid; ++s) {
    double sigma = sigma_grid == 1
                       ? a
                       : lo * std::pow(a / lo, static_cast<double>(s) / (sigma_grid - 1));
    auto smoothed = [&](double b1, double b2) -> Eigen::MatrixXd {
      double A = sigma * (b1 * b1 + b2 * b2) + 1.0;
      return std::pow(A, -d / 2.0) * (-(sigma / A) * D2.array()).exp().matrix();
    };
    Eigen::MatrixXd Exx = smoothed(h, h);
    Eigen::MatrixXd Mx = Exx * S;
    Eigen::MatrixXd My, Mc;
    Eigen::VectorXd Erow;
    if (same_bw) {
      Erow = Exx.rowwise().sum();  // S'E(1-S) = S'E1 - S'ES
    } else {
      My = smoothed(g, g) * T;
      Mc = smoothed(h, g) * T;
    }
    for (int b = 0; b <= B; ++b) {
      double xx = S.col(b).dot(Mx.col(b));
      double yy, xy;
      if (same_bw) {
        double e1 = S.col(b).dot(Erow);
        xy = e1 - xx;
        // (1-S)'E(1-S) = 1'E1 - 2 S'E1 + S'ES
        yy = Erow.sum() - 2.0 * e1 + xx;
      } else {
        yy = T.col(b).dot(My.col(b));
        xy = S.col(b).dot(Mc.col(b));
      }
      double v = xx / (static_cast<double>(n) * n) + yy / (static_cast<double>(m) * m) -
                 2.0 * xy / (static_cast<double>(n) * m);
      stat2(b) = std::max(stat2(b), v);
    }
  }

  const double obs = std::sqrt(std::max(0.0, stat2(0)));
  int ge = 0;
  for (int b = 1; b <= B; ++b)
    if (std::sqrt(std::max(0.0, stat2(b))) >= obs - 1e-15) ++ge;
  res.statistic = obs;
  res.p_value = (1.0 + ge) / (B + 1.0);
  res.reject = res.p_value <= alpha;
  return res;
}

}  // namespace fh
