#pragma once

#include <functional>

namespace fh {

struct ScalarMax {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tol_achieved = 0.0;
  bool budget_exhausted = false;
};

// Golden-section maximization on [lo, hi].
ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double xtol = 1e-9, int max_iter = 200);

// Coarse scan (log-spaced when lo > 0, else linear) followed by golden-section
// refinement around the best grid point.
ScalarMax grid_golden_max(const std::function<double(double)>& f, double lo, double hi,
                          int grid_size = 64, double xtol = 1e-9, int max_evals = 10000);

}  // namespace fh
