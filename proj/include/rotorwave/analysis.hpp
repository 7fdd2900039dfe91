#pragma once

#include <utility>
#include <vector>

#include "rotorwave/propagate.hpp"

namespace rotorwave {

// Least-squares line fit. For loglog_fit the slope/intercept/r_squared refer
// to the (ln x, ln y) axes; x and y keep the original data.
struct ScalingFit {
  std::vector<double> x;
  std::vector<double> y;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares on the raw axes. Needs >= 2 points and non-degenerate x.
ScalingFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Ordinary least squares on (ln x, ln y). Needs >= 3 strictly positive points.
ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Time-averaged squared orientation difference,
//   (1/t_rev) * integral_0^{t_rev} (S_a(t) - S_b(t))^2 dt,
// by trapezoidal quadrature on the shared sample grid. Both traces must use
// the same grid and the grid must contain t = 0 and t = t_rev.
double error_epsilon(const ObservableTrace& a, const ObservableTrace& b,
                     double t_rev_ps = 120.0);

struct TimeWindow {
  double t_lo_ps = 0.0;
  double t_hi_ps = 0.0;
};

// Maximum over windows of (max - min) of the orientation inside the window.
// Every window must lie within the trace span and cover at least two samples.
double baseline_flatness(const ObservableTrace& trace,
                         const std::vector<TimeWindow>& windows);

}  // namespace rotorwave
