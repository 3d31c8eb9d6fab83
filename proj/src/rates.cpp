#include "laplace/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "laplace/error.hpp"

namespace laplace {

RateFit fit_rate(std::span<const std::pair<long, double>> points, int burn_in, double floor) {
  if (burn_in < 0) fail(ErrorCode::kInvalidArgument, "burn-in must be non-negative");
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto [n, value] = points[i];
    if (!(value > 0.0) || n <= 0) {
      fail(ErrorCode::kInvalidArgument,
           "rate fit needs positive n and values, got value " + std::to_string(value) +
               " at n = " + std::to_string(n));
    }
    if (static_cast<int>(i) < burn_in || value < floor) {
      ++fit.dropped;
      continue;
    }
    fit.n_used.push_back(n);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(value));
  }
  if (xs.size() < 3) {
    fail(ErrorCode::kInsufficientData,
         "rate fit needs at least 3 usable points, have " + std::to_string(xs.size()));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) fail(ErrorCode::kInsufficientData, "rate fit needs distinct n values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A sequence constant up to rounding in log space is fitted perfectly by a
  // zero slope.
  double ymax = 0.0;
  for (double y : ys) ymax = std::max(ymax, std::abs(y));
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(ymax, 1.0);
  fit.r_squared = (syy <= m * noise * noise) ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  std::sort(fit.n_used.begin(), fit.n_used.end());
  return fit;
}

std::optional<RateFit> fit_rate_or_exact(std::span<const std::pair<long, double>> points,
                                         int burn_in, double floor) {
  std::vector<std::pair<long, double>> kept;
  int dropped = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    const double v = points[i].second;
    if (std::isnan(v) || v < 0.0) {
      fail(ErrorCode::kInvalidArgument, "rate fit values must be non-negative");
    }
    if (static_cast<int>(i) < burn_in || v < floor) {
      ++dropped;
    } else {
      kept.push_back(points[i]);
    }
  }
  if (kept.empty()) return std::nullopt;
  RateFit fit = fit_rate(kept, 0, floor);
  fit.dropped += dropped;
  return fit;
}

}  // namespace laplace
