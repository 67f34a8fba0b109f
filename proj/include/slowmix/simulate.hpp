#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "slowmix/network.hpp"
#include "slowmix/random.hpp"
#include "slowmix/structure.hpp"

namespace slowmix {

struct SimConfig {
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;
  double max_time = 1e7;
};

/// Target set of a first-passage query: {x : x_i <= C} or {x : |x|_inf <= C}.
struct FptQuery {
  enum class Kind { Coordinate, SupNorm };
  Kind kind = Kind::SupNorm;
  std::size_t coordinate = 0;
  Count threshold = 0;

  static FptQuery coordinate_at_most(std::size_t i, Count c) { return {Kind::Coordinate, i, c}; }
  static FptQuery sup_norm_at_most(Count c) { return {Kind::SupNorm, 0, c}; }

  bool satisfied(std::span<const Count> x) const noexcept;
  bool satisfied(const State& x) const noexcept { return satisfied(x.counts()); }
};

struct Horizon {
  double time = 0.0;
};

using StatePredicate = std::function<bool(const State&)>;
using StopCondition = std::variant<Horizon, FptQuery, StatePredicate>;

enum class Termination { Horizon, Target, MaxEvents, MaxTime, Absorbed };

const char* to_string(Termination t) noexcept;

struct Event {
  double time = 0.0;
  std::size_t reaction = 0;
  State state;
};

struct Trajectory {
  State initial;
  std::vector<Event> events;
  /// The sample path is known on [0, end_time].
  double end_time = 0.0;
  Termination termination = Termination::Horizon;
};

struct NextEvent {
  double holding_time = 0.0;
  std::size_t reaction = 0;
};

/// One Gillespie draw at x: holding time ~ Exp(total rate), then the reaction
/// with probability propensity / total rate. Throws AbsorbingStateError if no
/// reaction can fire.
NextEvent next_event(const ReactionNetwork& net, std::span<const Count> x, Stream& stream);

/// Incremental Gillespie sampler. The next event is drawn as soon as the
/// current state is entered, so `next_time()` is known before it fires.
class Walker {
 public:
  Walker(const ReactionNetwork& net, const State& init, Stream stream);

  double time() const noexcept { return time_; }
  double next_time() const noexcept { return next_time_; }
  std::size_t next_reaction() const noexcept { return next_reaction_; }
  bool absorbed() const noexcept { return next_time_ == std::numeric_limits<double>::infinity(); }
  std::span<const Count> counts() const noexcept { return x_; }
  State state() const { return State(x_); }
  std::uint64_t events() const noexcept { return events_; }

  /// Fires the pending event. Precondition: !absorbed().
  void fire();

  /// Fires every event with time <= t (or until `max_events` total events).
  /// Returns false if the event cap was hit first.
  bool advance_to(double t, std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max());

 private:
  struct Term {
    std::size_t species;
    Count coefficient;
  };
  struct CompiledReaction {
    double rate;
    std::vector<Term> reactant;
    std::vector<Term> change;
  };

  void draw_next();

  std::vector<CompiledReaction> reactions_;
  std::vector<double> rates_;
  std::vector<Count> x_;
  Stream stream_;
  double time_ = 0.0;
  double next_time_ = 0.0;
  std::size_t next_reaction_ = 0;
  std::uint64_t events_ = 0;
};

/// Runs one trajectory on stream `stream_index` of config.seed until the stop
/// condition, the event cap or the time cap, whichever comes first. Hitting a
/// cap is reported through `termination`, never thrown.
Trajectory simulate(const ReactionNetwork& net, const State& init, const StopCondition& stop, const SimConfig& config,
                    std::uint64_t stream_index = 0);

/// Right-continuous lookup. Throws Error for t < 0 or t > traj.end_time.
State state_at(const Trajectory& traj, double t);

struct FptOutcome {
  double time = 0.0;
  bool capped = false;
  std::uint64_t events = 0;
};

/// First event time at which the query holds (0 if it holds initially).
/// Trajectories are not stored.
FptOutcome first_passage(const ReactionNetwork& net, const State& init, const FptQuery& q, const SimConfig& config,
                         std::uint64_t stream_index = 0);

struct FptSummary {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t completed = 0;
  std::size_t capped = 0;
  std::vector<FptOutcome> runs;  // by trajectory index
};

/// Mean over M independent streams; capped runs are excluded from the mean and counted.
FptSummary mean_first_passage(const ReactionNetwork& net, const State& init, const FptQuery& q, std::size_t M,
                              const SimConfig& config, unsigned workers = 0);

/// Visits to and exits from the face {x_d = 0}.
struct BoundaryStats {
  bool started_on_boundary = false;
  std::vector<double> nu;             // visit times; nu[0] = 0 when started on the face
  std::vector<double> mu;             // exit times
  std::vector<std::vector<Count>> z;  // first d-1 coordinates at each visit
  double end_time = 0.0;

  /// N(t): number of visits nu_i <= t with i >= 1.
  std::size_t visits_by(double t) const;

  /// mu_i - nu_{i-1} for every completed sojourn on the face.
  std::vector<double> holding_times() const;
};

BoundaryStats boundary_stats(const Trajectory& traj);

struct Proportion {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Fraction of M embedded-chain runs whose first |seq| steps have the increments of seq.
Proportion empirical_path_probability(const ReactionNetwork& net, const State& start, const TransitionSequence& seq,
                                      std::size_t M, const SimConfig& config, unsigned workers = 0);

}  // namespace slowmix
