#pragma once

#include <cmath>

namespace gdgm {

// One row of training history. `relative_error` is NaN when the problem has
// no closed-form solution.
struct EpochLog {
  long epoch = 0;
  int stage = 0;
  double loss_interior = 0.0;
  double loss_boundary = 0.0;
  double loss_total = 0.0;
  double relative_error = std::nan("");
  double wall_ms = 0.0;
};

}  // namespace gdgm
