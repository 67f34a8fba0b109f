#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "slowmix/network.hpp"
#include "slowmix/random.hpp"
#include "slowmix/regression.hpp"
#include "slowmix/simulate.hpp"

namespace slowmix {

/// Inclusive integer box [lower, upper] inside the non-negative orthant.
class Window {
 public:
  Window() = default;
  Window(std::vector<Count> lower, std::vector<Count> upper);

  /// [0, side]^d
  static Window square(std::size_t d, Count side) {
    return Window(std::vector<Count>(d, 0), std::vector<Count>(d, side));
  }

  std::size_t dimension() const noexcept { return lower_.size(); }
  const std::vector<Count>& lower() const noexcept { return lower_; }
  const std::vector<Count>& upper() const noexcept { return upper_; }
  std::size_t volume() const noexcept { return volume_; }

  bool contains(std::span<const Count> x) const noexcept;
  bool contains(const State& x) const noexcept { return contains(x.counts()); }
  /// Row-major offset (last coordinate fastest). Precondition: contains(x).
  std::size_t offset(std::span<const Count> x) const noexcept;
  State state_at(std::size_t offset) const;

  bool operator==(const Window&) const = default;

 private:
  std::vector<Count> lower_;
  std::vector<Count> upper_;
  std::size_t volume_ = 0;
};

/// Probability masses on a window plus the mass that falls outside it.
struct Pmf {
  Window window;
  std::vector<double> mass;  // indexed by window.offset
  double tail_mass = 0.0;

  explicit Pmf(Window w = {}) : window(std::move(w)), mass(window.volume(), 0.0) {}

  double at(const State& x) const { return window.contains(x) ? mass[window.offset(x.counts())] : 0.0; }
  double window_mass() const noexcept;
  /// Throws Error unless masses are non-negative and sum with the tail to 1 within tol.
  void validate(double tol = 1e-9) const;
};

/// prod_i exp(-c_i) c_i^{x_i} / x_i!
double poisson_product_pmf(std::span<const double> c, std::span<const Count> x);

struct ComplexResidual {
  Complex complex;
  double outflow = 0.0;
  double inflow = 0.0;
  double residual() const noexcept { return outflow - inflow; }
};

struct BalanceCheck {
  bool balanced = false;
  double max_abs_residual = 0.0;
  std::vector<ComplexResidual> residuals;
};

/// Deterministic mass-action flux balance at every complex, evaluated at c.
/// Balanced iff every |outflow - inflow| <= tol * max(1, largest flux).
BalanceCheck verify_complex_balanced(const ReactionNetwork& net, std::span<const double> c, double tol = 1e-9);

/// States reachable from init through positive-propensity reactions without
/// leaving the window, in lexicographic order. Throws Error if init is outside.
std::vector<State> reachable_class(const ReactionNetwork& net, const State& init, const Window& window);

enum class StationaryMode { Full, Class };

struct StationaryPmf {
  Pmf pmf;
  BalanceCheck balance;
};

/// Full mode: Poisson product on the window, tail = 1 - window mass.
/// Class mode: Poisson weights on reachable_class(class_seed) only, scaled so the
/// window carries the same total as in full mode; the tail keeps the uncaptured
/// Poisson mass. A failed balance check is reported, not thrown.
StationaryPmf stationary_pmf(const ReactionNetwork& net, std::span<const double> c, const Window& window,
                             StationaryMode mode, const std::optional<State>& class_seed = std::nullopt);

/// P^t(init, .) estimated from M independent trajectories on streams 0..M-1.
Pmf empirical_distribution(const ReactionNetwork& net, const State& init, double t, std::size_t M,
                           const Window& window, const SimConfig& config, unsigned workers = 0);

enum class TvMode {
  /// 1/2 sum_W |p - q| + 1/2 (1 - sum_W p): q's tail is ignored.
  Windowed,
  /// 1/2 sum_W |p - q| + 1/2 |tail_p - tail_q|
  Symmetric,
};

/// Throws Error if the windows differ.
double tv_windowed(const Pmf& p, const Pmf& q, TvMode mode = TvMode::Windowed);

struct MixingConfig {
  double delta = 0.2;
  double grid_step = 100.0;
  std::size_t M = 100;
  Window window;
  double t_max = 1e7;
  TvMode tv_mode = TvMode::Windowed;
};

struct MixingEstimate {
  std::optional<double> t_mix;  // first grid time with TV <= delta
  std::vector<std::pair<double, double>> tv_curve;
  MixingConfig config;
  std::size_t capped = 0;  // trajectories that hit the event cap
};

/// Evaluates the TV distance at t = grid_step, 2 grid_step, ... until it drops
/// to delta or t exceeds t_max. Trajectory i runs on stream i of sim.seed.
MixingEstimate estimate_mixing_time(const ReactionNetwork& net, const State& init, const Pmf& reference,
                                    const MixingConfig& cfg, const SimConfig& sim, unsigned workers = 0);

/// Same, with trajectory i started from inits[i]; cfg.M is ignored.
MixingEstimate estimate_mixing_time(const ReactionNetwork& net, const std::vector<State>& inits, const Pmf& reference,
                                    const MixingConfig& cfg, const SimConfig& sim, unsigned workers = 0);

/// Draws a state from the in-window part of pmf (renormalized).
State sample_state(const Pmf& pmf, Stream& stream);

/// The window shrunk by the largest reaction step on every side not already at 0.
/// Throws Error if nothing is left.
Window balance_interior(const ReactionNetwork& net, const Window& window);

/// max over y in interior of |sum_x pi(x) q(x,y) - pi(y) q(y)| / max(pi(y) q(y), floor),
/// where q(y) is the total rate out of y. Throws Error if interior is empty or
/// reaches states whose in-neighbours fall outside the pmf window.
double generator_balance_residual(const ReactionNetwork& net, const Pmf& pmf, const Window& interior,
                                  double floor = 1e-300);

}  // namespace slowmix
