#include "rotorwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotorwave/errors.hpp"

namespace rotorwave {

namespace {

ScalingFit fit_line(const std::vector<double>& ax, const std::vector<double>& ay) {
  const std::size_t n = ax.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += ax[i];
    my += ay[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (ax[i] - mx) * (ax[i] - mx);
    sxy += (ax[i] - mx) * (ay[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("fit requires at least two distinct x values");

  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ay[i] - (fit.intercept + fit.slope * ax[i]);
    ss_res += r * r;
    ss_tot += (ay[i] - my) * (ay[i] - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  return fit;
}

}  // namespace

ScalingFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit arrays differ in length");
  if (x.size() < 2) throw ConfigError("linear fit needs at least 2 points");
  ScalingFit fit = fit_line(x, y);
  fit.x = x;
  fit.y = y;
  return fit;
}

ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit arrays differ in length");
  if (x.size() < 3) throw ConfigError("log-log fit needs at least 3 points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ConfigError("log-log fit requires strictly positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  ScalingFit fit = fit_line(lx, ly);
  fit.x = x;
  fit.y = y;
  return fit;
}

double error_epsilon(const ObservableTrace& a, const ObservableTrace& b,
                     double t_rev_ps) {
  if (!(t_rev_ps > 0.0)) throw ConfigError("t_rev_ps must be positive");
  if (a.t.size() != b.t.size()) throw ConfigError("traces use different time grids");
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (std::abs(a.t[i] - b.t[i]) > 1e-9)
      throw ConfigError("traces use different time grids");
  }

  const double tol = 1e-6;
  std::size_t i0 = a.t.size(), i1 = a.t.size();
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (i0 == a.t.size() && std::abs(a.t[i]) <= tol) i0 = i;
    if (std::abs(a.t[i] - t_rev_ps) <= tol) i1 = i;
  }
  if (i0 == a.t.size() || i1 == a.t.size() || i1 <= i0)
    throw ConfigError("trace grid must contain t = 0 and t = t_rev");

  double acc = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const double da = a.orientation[i] - b.orientation[i];
    const double db = a.orientation[i + 1] - b.orientation[i + 1];
    acc += 0.5 * (da * da + db * db) * (a.t[i + 1] - a.t[i]);
  }
  return acc / t_rev_ps;
}

double baseline_flatness(const ObservableTrace& trace,
                         const std::vector<TimeWindow>& windows) {
  if (windows.empty()) throw ConfigError("baseline_flatness needs at least one window");
  if (trace.t.empty()) throw ConfigError("baseline_flatness needs a non-empty trace");

  const double slack = 1e-9;
  double worst = 0.0;
  for (const TimeWindow& w : windows) {
    if (!(w.t_lo_ps < w.t_hi_ps))
      throw ConfigError("window bounds must satisfy t_lo < t_hi");
    if (w.t_lo_ps < trace.t.front() - slack || w.t_hi_ps > trace.t.back() + slack)
      throw ConfigError("window [" + std::to_string(w.t_lo_ps) + ", " +
                        std::to_string(w.t_hi_ps) + "] lies outside the trace span");
    double lo = 0.0, hi = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
      if (trace.t[i] < w.t_lo_ps - slack || trace.t[i] > w.t_hi_ps + slack) continue;
      const double v = trace.orientation[i];
      lo = hits == 0 ? v : std::min(lo, v);
      hi = hits == 0 ? v : std::max(hi, v);
      ++hits;
    }
    if (hits < 2)
      throw ConfigError("window [" + std::to_string(w.t_lo_ps) + ", " +
                        std::to_string(w.t_hi_ps) + "] covers fewer than two samples");
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

}  // namespace rotorwave
