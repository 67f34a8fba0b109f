#include <algorithm>
#include <cmath>
#include <optional>

#include "slowmix/analysis.hpp"
#include "slowmix/error.hpp"
#include "slowmix/parallel.hpp"

namespace slowmix {

namespace {

// Grid points handled per parallel round; bounds wasted work after the crossing.
constexpr std::size_t kBatch = 8;

constexpr std::ptrdiff_t kOutside = -1;

std::ptrdiff_t locate(const Window& window, std::span<const Count> x) {
  return window.contains(x) ? static_cast<std::ptrdiff_t>(window.offset(x)) : kOutside;
}

// TV between the empirical law given by sample offsets and the reference.
double tv_from_samples(std::vector<std::ptrdiff_t> offsets, const Pmf& reference, double reference_window_mass,
                       TvMode mode) {
  const double M = static_cast<double>(offsets.size());
  std::sort(offsets.begin(), offsets.end());
  double l1 = reference_window_mass;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < offsets.size();) {
    std::size_t j = i;
    while (j < offsets.size() && offsets[j] == offsets[i]) ++j;
    if (offsets[i] == kOutside) {
      outside = j - i;
    } else {
      const double q = reference.mass[static_cast<std::size_t>(offsets[i])];
      const double p = static_cast<double>(j - i) / M;
      l1 += std::abs(p - q) - q;
    }
    i = j;
  }
  const double tail_p = static_cast<double>(outside) / M;
  const double tail_term = mode == TvMode::Windowed ? tail_p : std::abs(tail_p - reference.tail_mass);
  return std::clamp(0.5 * std::max(0.0, l1) + 0.5 * tail_term, 0.0, 1.0);
}

}  // namespace

Pmf empirical_distribution(const ReactionNetwork& net, const State& init, double t, std::size_t M,
                           const Window& window, const SimConfig& config, unsigned workers) {
  if (M < 1) throw Error("empirical distribution needs at least one trajectory");
  if (!(t >= 0.0)) throw Error("time must be non-negative");
  if (window.dimension() != net.dimension()) throw Error("window dimension does not match network");

  std::vector<std::ptrdiff_t> where(M, kOutside);
  parallel_for(M, workers, [&](std::size_t i) {
    Walker walker(net, init, Stream(config.seed, i));
    walker.advance_to(t, config.max_events);
    where[i] = locate(window, walker.counts());
  });

  std::vector<std::size_t> hits(window.volume(), 0);
  std::size_t outside = 0;
  for (std::ptrdiff_t off : where) {
    if (off == kOutside) {
      ++outside;
    } else {
      ++hits[static_cast<std::size_t>(off)];
    }
  }
  Pmf pmf(window);
  const double total = static_cast<double>(M);
  for (std::size_t off = 0; off < hits.size(); ++off) pmf.mass[off] = static_cast<double>(hits[off]) / total;
  pmf.tail_mass = static_cast<double>(outside) / total;
  return pmf;
}

double tv_windowed(const Pmf& p, const Pmf& q, TvMode mode) {
  if (!(p.window == q.window)) throw Error("total variation needs identical windows");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) l1 += std::abs(p.mass[i] - q.mass[i]);
  const double tail_term = mode == TvMode::Windowed ? 1.0 - p.window_mass() : std::abs(p.tail_mass - q.tail_mass);
  return std::clamp(0.5 * l1 + 0.5 * tail_term, 0.0, 1.0);
}

MixingEstimate estimate_mixing_time(const ReactionNetwork& net, const State& init, const Pmf& reference,
                                    const MixingConfig& cfg, const SimConfig& sim, unsigned workers) {
  return estimate_mixing_time(net, std::vector<State>(cfg.M, init), reference, cfg, sim, workers);
}

MixingEstimate estimate_mixing_time(const ReactionNetwork& net, const std::vector<State>& inits, const Pmf& reference,
                                    const MixingConfig& cfg, const SimConfig& sim, unsigned workers) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw Error("delta must lie in (0, 1)");
  if (!(cfg.grid_step > 0.0)) throw Error("grid step must be positive");
  if (!(cfg.t_max >= cfg.grid_step)) throw Error("t_max must be at least one grid step");
  if (inits.empty()) throw Error("mixing estimate needs at least one trajectory");
  if (!(reference.window == cfg.window)) throw Error("reference window differs from the mixing window");
  if (cfg.window.dimension() != net.dimension()) throw Error("window dimension does not match network");

  const std::size_t M = inits.size();
  std::vector<std::optional<Walker>> walkers(M);
  std::vector<unsigned char> capped(M, 0);
  const double reference_window_mass = reference.window_mass();

  MixingEstimate est;
  est.config = cfg;
  est.config.M = M;

  const auto points = static_cast<std::size_t>(std::floor(cfg.t_max / cfg.grid_step + 1e-9));
  for (std::size_t first = 1; first <= points && !est.t_mix; first += kBatch) {
    const std::size_t last = std::min(points, first + kBatch - 1);
    const std::size_t width = last - first + 1;
    std::vector<std::ptrdiff_t> where(M * width, kOutside);

    parallel_for(M, workers, [&](std::size_t i) {
      if (!walkers[i]) walkers[i].emplace(net, inits[i], Stream(sim.seed, i));
      Walker& w = *walkers[i];
      for (std::size_t k = 0; k < width; ++k) {
        const double t = static_cast<double>(first + k) * cfg.grid_step;
        if (!capped[i] && !w.advance_to(t, sim.max_events)) capped[i] = 1;
        where[k * M + i] = locate(cfg.window, w.counts());
      }
    });

    for (std::size_t k = 0; k < width; ++k) {
      const double t = static_cast<double>(first + k) * cfg.grid_step;
      std::vector<std::ptrdiff_t> column(where.begin() + static_cast<std::ptrdiff_t>(k * M),
                                         where.begin() + static_cast<std::ptrdiff_t>((k + 1) * M));
      const double tv = tv_from_samples(std::move(column), reference, reference_window_mass, cfg.tv_mode);
      est.tv_curve.emplace_back(t, tv);
      if (tv <= cfg.delta) {
        est.t_mix = t;
        break;
      }
    }
  }
  est.capped = static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1));
  return est;
}

State sample_state(const Pmf& pmf, Stream& stream) {
  const double total = pmf.window_mass();
  if (!(total > 0.0)) throw Error("cannot sample from a pmf with no in-window mass");
  const double target = stream.uniform() * total;
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t off = 0; off < pmf.mass.size(); ++off) {
    if (pmf.mass[off] <= 0.0) continue;
    cumulative += pmf.mass[off];
    last = off;
    if (target < cumulative) return pmf.window.state_at(off);
  }
  return pmf.window.state_at(last);
}

}  // namespace slowmix
