#include "slowmix/regression.hpp"

#include <algorithm>
#include <cmath>

#include "slowmix/error.hpp"

namespace slowmix {

PowerLawFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw Error("log-log fit needs strictly positive coordinates");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  if (lx.size() < 2 || std::all_of(lx.begin(), lx.end(), [&](double v) { return v == lx.front(); })) {
    throw Error("log-log fit needs at least two distinct x values");
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
  return fit;
}

}  // namespace slowmix
