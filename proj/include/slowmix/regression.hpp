#pragma once

#include <utility>
#include <vector>

namespace slowmix {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x. Requires x > 0, y > 0 and at
/// least two distinct x values; throws Error otherwise. r_squared is 1 when
/// the y values are all equal.
PowerLawFit loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace slowmix
