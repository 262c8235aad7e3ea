#include "fh/sample_set.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fh {

SampleSet load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  // header x1,...,xd
  int d = 1;
  for (char c : line)
    if (c == ',') ++d;
  std::vector<double> vals;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int got = 0;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
      ++got;
    }
    if (got != d) throw std::runtime_error("ragged row in " + path);
    ++rows;
  }
  Eigen::MatrixXd pts(rows, d);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = vals[static_cast<size_t>(i) * d + j];
  return SampleSet(std::move(pts), 0, "csv:" + path);
}

void save_csv(const SampleSet& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (int j = 0; j < X.dim(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << "\n";
  for (int i = 0; i < X.n(); ++i) {
    for (int j = 0; j < X.dim(); ++j) {
      if (j) out << ",";
      out << X.points(i, j);
    }
    out << "\n";
  }
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd D = -2.0 * A * B.transpose();
  D.colwise() += a2;
  D.rowwise() += b2.transpose();
  return D.cwiseMax(0.0);
}

}  // namespace fh
