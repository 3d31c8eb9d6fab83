#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace laplace {

// Log-log least-squares fit of value ~ exp(intercept) * n^slope.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<long> n_used;
  int dropped = 0;
};

inline constexpr double kResidualFloor = 1e-14;

/// Drops the first burn_in points and any value below floor, then regresses
/// log(value) on log(n). Throws kInsufficientData with fewer than three usable
/// points and kInvalidArgument on a nonpositive value.
RateFit fit_rate(std::span<const std::pair<long, double>> points, int burn_in = 0,
                 double floor = kResidualFloor);

/// Like fit_rate, but points below floor (zeros included) are dropped
/// instead of rejected, and nullopt means no point cleared the floor.
std::optional<RateFit> fit_rate_or_exact(std::span<const std::pair<long, double>> points,
                                         int burn_in = 0, double floor = kResidualFloor);

}  // namespace laplace
