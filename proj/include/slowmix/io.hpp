#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "slowmix/analysis.hpp"
#include "slowmix/network.hpp"
#include "slowmix/simulate.hpp"

namespace slowmix {

/// Shortest decimal that reads back to exactly `value`.
std::string format_double(double value);

/// Header `t,reaction,<species...>`, one row per event.
void write_trajectory_csv(std::ostream& out, const ReactionNetwork& net, const Trajectory& traj);

/// Header `i,nu,mu,z_<species...>`: row i holds the i-th visit, the exit that
/// ends it (blank if none) and the first d-1 coordinates at the visit.
void write_boundary_csv(std::ostream& out, const ReactionNetwork& net, const BoundaryStats& stats);

/// Header `x_<species...>,mass`, one row per window state, then `TAIL,...,<tail>`.
void write_pmf_csv(std::ostream& out, const ReactionNetwork& net, const Pmf& pmf);

/// Reads what write_pmf_csv writes. The window is the bounding box of the rows,
/// which must cover it exactly once. Throws ParseError on malformed input.
Pmf read_pmf_csv(std::istream& in);

/// Header `t,tv`.
void write_tv_curve_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve);

}  // namespace slowmix
