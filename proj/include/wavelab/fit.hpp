#pragma once

// Least-squares line fits and grid helpers shared by the exponent/rate
// estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavelab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;  // root mean square of y - (slope*x + intercept)
  std::size_t points = 0;
  bool degenerate = false;  // all y equal or fewer than two distinct x
};

/// Ordinary least squares y ≈ slope*x + intercept. Non-finite pairs are skipped.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  LineFit fit;
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    sx += x[i];
    sy += y[i];
    ++n;
  }
  fit.points = n;
  if (n < 2) {
    fit.degenerate = true;
    return fit;
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) {
    fit.degenerate = true;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / double(n));
  // Relative spread below roundoff: the data carry no trend.
  const double scale = std::max(1.0, std::abs(my));
  if (std::sqrt(syy / double(n)) <= 1e-12 * scale) {
    fit.degenerate = true;
    fit.slope = 0.0;
  }
  return fit;
}

/// Slope of log(y) against log(x); zero or negative y make the fit degenerate.
inline LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  bool nonpositive = false;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      nonpositive = true;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  LineFit fit = fit_line(lx, ly);
  if (nonpositive) fit.degenerate = true;
  return fit;
}

/// n points log-spaced from `first` to `last` inclusive (either order).
inline std::vector<double> log_grid(double first, double last, std::size_t n) {
  if (!(first > 0) || !(last > 0) || n < 2) throw std::invalid_argument("log_grid: need positive ends and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(first), b = std::log(last);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  g.front() = first;
  g.back() = last;
  return g;
}

/// Deterministic pairwise (tree) summation; result independent of thread layout.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace wavelab
