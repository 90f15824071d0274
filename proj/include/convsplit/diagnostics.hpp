#pragma once

#include <limits>

namespace convsplit {

/// Per-step observability record: mass balance, extrema, multiplier activity,
/// iteration counts. This is the surface every structure-preservation check
/// reads.
struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double mass_defect = 0.0;  // vs. the per-step balance with the physical source
  double umin = 0.0;
  double umax = 0.0;
  int clipped = 0;
  double lambda_max = 0.0;
  double xi = 0.0;
  int secant_iters = 0;
  double entropy = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct ConvergenceRow {
  int cells = 0;
  int steps = 0;
  double h = 0.0;
  double tau = 0.0;
  double linf_error = 0.0;
  double l2_error = 0.0;
  double order_linf = std::numeric_limits<double>::quiet_NaN();
  double order_l2 = std::numeric_limits<double>::quiet_NaN();
  double cpu_seconds = 0.0;
  bool diverged = false;
};

}  // namespace convsplit
