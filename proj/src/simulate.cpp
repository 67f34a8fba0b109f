#include "slowmix/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "slowmix/error.hpp"
#include "slowmix/parallel.hpp"

namespace slowmix {

namespace {

std::size_t select_reaction(std::span<const double> rates, double total, Stream& stream) {
  const double target = stream.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    if (rates[r] <= 0.0) continue;
    cumulative += rates[r];
    last_positive = r;
    if (target < cumulative) return r;
  }
  // target can land on total through rounding
  return last_positive;
}

bool stop_reached(const StopCondition& stop, const State& x) {
  if (const auto* q = std::get_if<FptQuery>(&stop)) return q->satisfied(x);
  if (const auto* p = std::get_if<StatePredicate>(&stop)) return (*p)(x);
  return false;
}

}  // namespace

bool FptQuery::satisfied(std::span<const Count> x) const noexcept {
  if (kind == Kind::Coordinate) return coordinate < x.size() && x[coordinate] <= threshold;
  for (Count c : x)
    if (c > threshold) return false;
  return true;
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::Target: return "target";
    case Termination::MaxEvents: return "max-events";
    case Termination::MaxTime: return "max-time";
    case Termination::Absorbed: return "absorbed";
  }
  return "unknown";
}

NextEvent next_event(const ReactionNetwork& net, std::span<const Count> x, Stream& stream) {
  std::vector<double> rates(net.reaction_count());
  double total = 0.0;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    rates[r] = propensity(net, r, x);
    total += rates[r];
  }
  if (!(total > 0.0)) throw AbsorbingStateError("no reaction can fire");
  NextEvent ev;
  ev.holding_time = stream.exponential(total);
  ev.reaction = select_reaction(rates, total, stream);
  return ev;
}

Walker::Walker(const ReactionNetwork& net, const State& init, Stream stream)
    : rates_(net.reaction_count()), x_(init.vector()), stream_(stream) {
  if (init.size() != net.dimension()) throw Error("initial state dimension does not match network");
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const Reaction& rx = net.reactions()[r];
    CompiledReaction c{rx.rate_constant, {}, {}};
    for (std::size_t i = 0; i < net.dimension(); ++i) {
      if (rx.reactant.coefficients[i] > 0) c.reactant.push_back({i, rx.reactant.coefficients[i]});
      if (net.change(r)[i] != 0) c.change.push_back({i, net.change(r)[i]});
    }
    reactions_.push_back(std::move(c));
  }
  draw_next();
}

void Walker::draw_next() {
  double total = 0.0;
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const CompiledReaction& c = reactions_[r];
    double a = c.rate;
    for (const Term& t : c.reactant) {
      const Count xi = x_[t.species];
      if (xi < t.coefficient) {
        a = 0.0;
        break;
      }
      for (Count k = 0; k < t.coefficient; ++k) a *= static_cast<double>(xi - k);
    }
    rates_[r] = a;
    total += a;
  }
  if (!(total > 0.0)) {
    next_time_ = std::numeric_limits<double>::infinity();
    return;
  }
  double t = time_ + stream_.exponential(total);
  if (t <= time_) t = std::nextafter(time_, std::numeric_limits<double>::infinity());
  next_time_ = t;
  next_reaction_ = select_reaction(rates_, total, stream_);
}

void Walker::fire() {
  for (const Term& t : reactions_[next_reaction_].change) x_[t.species] += t.coefficient;
  time_ = next_time_;
  ++events_;
  draw_next();
}

bool Walker::advance_to(double t, std::uint64_t max_events) {
  while (next_time_ <= t) {
    if (events_ >= max_events) return false;
    fire();
  }
  return true;
}

Trajectory simulate(const ReactionNetwork& net, const State& init, const StopCondition& stop, const SimConfig& config,
                    std::uint64_t stream_index) {
  Trajectory traj;
  traj.initial = init;
  Walker walker(net, init, Stream(config.seed, stream_index));

  const auto* horizon = std::get_if<Horizon>(&stop);
  const double limit = horizon ? std::min(horizon->time, config.max_time) : config.max_time;
  const Termination at_limit =
      horizon && horizon->time <= config.max_time ? Termination::Horizon : Termination::MaxTime;

  if (!horizon && stop_reached(stop, init)) {
    traj.termination = Termination::Target;
    return traj;
  }
  while (true) {
    if (walker.absorbed()) {
      traj.termination = horizon ? Termination::Horizon : Termination::Absorbed;
      traj.end_time = limit;
      break;
    }
    if (walker.next_time() > limit) {
      traj.termination = at_limit;
      traj.end_time = limit;
      break;
    }
    if (walker.events() >= config.max_events) {
      traj.termination = Termination::MaxEvents;
      traj.end_time = walker.time();
      break;
    }
    const std::size_t r = walker.next_reaction();
    walker.fire();
    traj.events.push_back({walker.time(), r, walker.state()});
    if (!horizon && stop_reached(stop, traj.events.back().state)) {
      traj.termination = Termination::Target;
      traj.end_time = walker.time();
      break;
    }
  }
  return traj;
}

State state_at(const Trajectory& traj, double t) {
  if (t < 0.0 || t > traj.end_time) {
    throw Error("time " + std::to_string(t) + " outside trajectory coverage [0, " + std::to_string(traj.end_time) + "]");
  }
  auto it = std::upper_bound(traj.events.begin(), traj.events.end(), t,
                             [](double value, const Event& e) { return value < e.time; });
  if (it == traj.events.begin()) return traj.initial;
  return std::prev(it)->state;
}

FptOutcome first_passage(const ReactionNetwork& net, const State& init, const FptQuery& q, const SimConfig& config,
                         std::uint64_t stream_index) {
  FptOutcome out;
  if (q.satisfied(init)) return out;
  Walker walker(net, init, Stream(config.seed, stream_index));
  while (true) {
    if (walker.absorbed() || walker.next_time() > config.max_time || walker.events() >= config.max_events) {
      out.capped = true;
      out.time = walker.time();
      break;
    }
    walker.fire();
    if (q.satisfied(walker.counts())) {
      out.time = walker.time();
      break;
    }
  }
  out.events = walker.events();
  return out;
}

FptSummary mean_first_passage(const ReactionNetwork& net, const State& init, const FptQuery& q, std::size_t M,
                              const SimConfig& config, unsigned workers) {
  if (M < 2) throw Error("mean first passage needs at least two trajectories");
  FptSummary summary;
  summary.runs.resize(M);
  parallel_for(M, workers, [&](std::size_t i) { summary.runs[i] = first_passage(net, init, q, config, i); });

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const FptOutcome& run : summary.runs) {
    if (run.capped) {
      ++summary.capped;
      continue;
    }
    ++summary.completed;
    sum += run.time;
    sum_sq += run.time * run.time;
  }
  if (summary.completed > 0) {
    const double k = static_cast<double>(summary.completed);
    summary.mean = sum / k;
    if (summary.completed > 1) {
      const double var = std::max(0.0, (sum_sq - k * summary.mean * summary.mean) / (k - 1.0));
      summary.standard_error = std::sqrt(var / k);
    }
  }
  return summary;
}

std::size_t BoundaryStats::visits_by(double t) const {
  const auto count = static_cast<std::size_t>(std::upper_bound(nu.begin(), nu.end(), t) - nu.begin());
  return started_on_boundary && count > 0 ? count - 1 : count;
}

std::vector<double> BoundaryStats::holding_times() const {
  std::vector<double> out;
  // An exit is only recorded after a visit, so mu[i] always closes the sojourn opened at nu[i].
  for (std::size_t i = 0; i < nu.size() && i < mu.size(); ++i) out.push_back(mu[i] - nu[i]);
  return out;
}

BoundaryStats boundary_stats(const Trajectory& traj) {
  const std::size_t d = traj.initial.size();
  if (d < 2) throw Error("boundary statistics need at least two species");
  BoundaryStats stats;
  stats.end_time = traj.end_time;
  auto face_coordinates = [d](const State& x) { return std::vector<Count>(x.vector().begin(), x.vector().begin() + (d - 1)); };

  bool on = traj.initial.on_boundary();
  stats.started_on_boundary = on;
  if (on) {
    stats.nu.push_back(0.0);
    stats.z.push_back(face_coordinates(traj.initial));
  }
  for (const Event& e : traj.events) {
    const bool now = e.state.on_boundary();
    if (on && !now) stats.mu.push_back(e.time);
    if (!on && now) {
      stats.nu.push_back(e.time);
      stats.z.push_back(face_coordinates(e.state));
    }
    on = now;
  }
  return stats;
}

Proportion empirical_path_probability(const ReactionNetwork& net, const State& start, const TransitionSequence& seq,
                                      std::size_t M, const SimConfig& config, unsigned workers) {
  if (M < 100) throw Error("empirical path probability needs at least 100 runs");
  if (start.size() != net.dimension()) throw Error("start state dimension does not match network");

  std::vector<unsigned char> hit(M, 0);
  parallel_for(M, workers, [&](std::size_t i) {
    Stream stream(config.seed, i);
    std::vector<Count> x = start.vector();
    std::vector<double> rates(net.reaction_count());
    for (const Increment& step : seq.increments) {
      double total = 0.0;
      for (std::size_t r = 0; r < rates.size(); ++r) {
        rates[r] = propensity(net, r, x);
        total += rates[r];
      }
      if (!(total > 0.0)) return;
      const std::size_t r = select_reaction(rates, total, stream);
      if (net.change(r) != step) return;
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += step[k];
    }
    hit[i] = 1;
  });

  const double hits = static_cast<double>(std::count(hit.begin(), hit.end(), 1));
  Proportion p;
  p.estimate = hits / static_cast<double>(M);
  p.standard_error = std::sqrt(p.estimate * (1.0 - p.estimate) / static_cast<double>(M));
  return p;
}

}  // namespace slowmix
