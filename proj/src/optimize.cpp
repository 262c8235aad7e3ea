#include "fh/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fh {

ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double xtol, int max_iter) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  ScalarMax r;
  r.evaluations = 2;
  int it = 0;
  while (b - a > xtol && it < max_iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++r.evaluations;
    ++it;
  }
  r.budget_exhausted = (it >= max_iter) && (b - a > xtol);
  if (fc > fd) {
    r.x = c;
    r.fx = fc;
  } else {
    r.x = d;
    r.fx = fd;
  }
  r.bracket_lo = a;
  r.bracket_hi = b;
  r.tol_achieved = b - a;
  return r;
}

ScalarMax grid_golden_max(const std::function<double(double)>& f, double lo, double hi,
                          int grid_size, double xtol, int max_evals) {
  if (!(hi >= lo)) throw std::invalid_argument("grid_golden_max: empty interval");
  if (grid_size < 2 || hi == lo) {
    ScalarMax r;
    r.x = lo;
    r.fx = f(lo);
    r.evaluations = 1;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    return r;
  }
  const bool log_spaced = lo > 0.0;
  std::vector<double> grid(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    double t = static_cast<double>(i) / (grid_size - 1);
    grid[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  int best = 0;
  double fbest = f(grid[0]);
  for (int i = 1; i < grid_size; ++i) {
    double fi = f(grid[i]);
    if (fi > fbest) {
      fbest = fi;
      best = i;
    }
  }
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[best + 1 < grid_size ? best + 1 : grid_size - 1];
  int budget = max_evals - grid_size;
  ScalarMax r = golden_section_max(f, a, b, xtol, budget > 4 ? budget : 4);
  r.evaluations += grid_size;
  if (fbest > r.fx) {  // refinement never worse than the scan
    r.x = grid[best];
    r.fx = fbest;
  }
  return r;
}

}  // namespace fh
