#pragma once

// Least-squares convergence rate from (h, error) pairs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ncdg::harness {

struct ErrorPoint {
  double h = 0.0;
  double error = 0.0;
  bool diverged = false;
};

struct RateFit {
  double rate = std::numeric_limits<double>::quiet_NaN();
  /// Points used, coarse to fine.
  std::vector<ErrorPoint> used;
  bool ok() const { return std::isfinite(rate); }
};

/// Points below this are treated as a round-off plateau.
inline constexpr double kPlateau = 1e-12;

/// Slope of log(error) against log(h) over the finest three usable points.
/// Diverged, non-finite and plateaued points are dropped, as is everything
/// finer than the smallest error (the curve has turned over there). Needs at
/// least two points; otherwise the rate is NaN.
inline RateFit fit_rate(std::vector<ErrorPoint> pts, int max_points = 3) {
  std::sort(pts.begin(), pts.end(), [](const ErrorPoint& a, const ErrorPoint& b) { return a.h > b.h; });
  std::vector<ErrorPoint> good;
  for (const auto& p : pts) {
    if (!p.diverged && std::isfinite(p.error) && p.error >= kPlateau && p.h > 0.0) good.push_back(p);
  }
  if (!good.empty()) {
    const auto best = std::min_element(good.begin(), good.end(),
                                       [](const ErrorPoint& a, const ErrorPoint& b) { return a.error < b.error; });
    good.erase(best + 1, good.end());
  }
  if (static_cast<int>(good.size()) > max_points) good.erase(good.begin(), good.end() - max_points);
  RateFit fit;
  fit.used = good;
  if (good.size() < 2) return fit;
  double sx = 0.0, sy = 0.0;
  for (const auto& p : good) {
    sx += std::log(p.h);
    sy += std::log(p.error);
  }
  const double n = static_cast<double>(good.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : good) {
    const double dx = std::log(p.h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.error) - my);
  }
  if (sxx > 0.0) fit.rate = sxy / sxx;
  return fit;
}

}  // namespace ncdg::harness
