#include "slowmix/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "slowmix/error.hpp"
#include "slowmix/regression.hpp"

namespace slowmix {

namespace {

Increment complex_difference(const CyclicSpec& spec, std::size_t to, std::size_t from) {
  return {spec.alpha[to] - spec.alpha[from], spec.beta[to] - spec.beta[from]};
}

// Step k (1-based) of the dominating cycle: z_k - z_{k-1}, with z_L = z_0.
Increment cycle_step(const CyclicSpec& spec, std::size_t k) { return complex_difference(spec, k % spec.L, k - 1); }

std::size_t cycle_label(const CyclicSpec& spec, std::size_t k) { return spec.step_reaction[k - 1]; }

void append_cycle_step(TransitionSequence& seq, const CyclicSpec& spec, std::size_t k) {
  seq.increments.push_back(cycle_step(spec, k));
  seq.labels.push_back(cycle_label(spec, k));
}

void validate_spec(const CyclicSpec& spec) {
  if (spec.L < 2) throw Error("cyclic spec needs L >= 2");
  if (spec.alpha.size() != spec.L || spec.beta.size() != spec.L || spec.kappa.size() != spec.L ||
      spec.step_reaction.size() != spec.L) {
    throw Error("cyclic spec vectors must all have length L");
  }
  if (spec.alpha[0] != 0 || spec.beta[0] != 0) throw Error("cyclic spec must start at the empty complex");
  std::set<std::pair<Count, Count>> seen;
  for (std::size_t i = 0; i < spec.L; ++i) {
    if (spec.alpha[i] < 0 || spec.beta[i] < 0) throw Error("cyclic spec coefficients must be non-negative");
    if (!(spec.kappa[i] > 0.0)) throw Error("cyclic spec rate constants must be positive");
    if (!seen.emplace(spec.alpha[i], spec.beta[i]).second) throw Error("cyclic spec complexes must be distinct");
  }
}

// Exact rational value of a finite double.
Rational exact_rate(double value) {
  Rational q;
  q = value;
  return q;
}

std::vector<Count> start_state(Count n, std::size_t d) {
  std::vector<Count> x(d, 0);
  if (d > 0) x[0] = n;
  return x;
}

bool feasible_from(const std::vector<Count>& start, const TransitionSequence& seq) {
  std::vector<Count> x = start;
  for (const Increment& step : seq.increments) {
    if (step.size() != x.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += step[i];
      if (x[i] < 0) return false;
    }
  }
  return true;
}

std::size_t path_dimension(const PathSets& paths) {
  for (const auto* set : {&paths.cycles, &paths.excursions})
    for (const TransitionSequence& s : *set)
      if (!s.empty()) return s.increments.front().size();
  return 2;
}

bool is_prefix(const TransitionSequence& a, const TransitionSequence& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.increments.begin(), a.increments.end(), b.increments.begin());
}

}  // namespace

CyclicSpec make_cyclic_spec(std::vector<Count> alpha, std::vector<Count> beta, std::vector<double> kappa) {
  CyclicSpec spec;
  spec.L = alpha.size();
  spec.alpha = std::move(alpha);
  spec.beta = std::move(beta);
  spec.kappa = std::move(kappa);
  spec.step_reaction.resize(spec.L);
  for (std::size_t i = 0; i < spec.L; ++i) spec.step_reaction[i] = i;
  validate_spec(spec);
  return spec;
}

ReactionNetwork cyclic_network(const CyclicSpec& spec) {
  validate_spec(spec);
  std::vector<Species> species{{0, "A"}, {1, "B"}};
  std::vector<Reaction> reactions(spec.L);
  for (std::size_t i = 0; i < spec.L; ++i) {
    const std::size_t j = (i + 1) % spec.L;
    reactions[spec.step_reaction[i]] = Reaction{Complex{{spec.alpha[i], spec.beta[i]}},
                                                Complex{{spec.alpha[j], spec.beta[j]}}, spec.kappa[i]};
  }
  return ReactionNetwork(std::move(species), std::move(reactions));
}

CyclicSpec recognize_cyclic(const ReactionNetwork& net) {
  if (net.dimension() != 2) {
    throw UnsupportedClassError("not-two-species: network has " + std::to_string(net.dimension()) + " species");
  }
  const auto& rs = net.reactions();
  std::map<Complex, std::vector<std::size_t>> outgoing;
  std::map<Complex, std::size_t> incoming;
  std::set<std::pair<Complex, Complex>> pairs;
  for (std::size_t r = 0; r < rs.size(); ++r) {
    if (!pairs.emplace(rs[r].reactant, rs[r].product).second) {
      throw UnsupportedClassError("duplicated-complexes: reaction " + std::to_string(r) + " repeats an earlier one");
    }
    outgoing[rs[r].reactant].push_back(r);
    ++incoming[rs[r].product];
  }

  const Complex empty{{0, 0}};
  if (!outgoing.contains(empty)) throw UnsupportedClassError("not-a-single-cycle: no reaction leaves the empty complex");
  std::set<Complex> all;
  for (const auto& [c, _] : outgoing) all.insert(c);
  for (const auto& [c, _] : incoming) all.insert(c);
  for (const Complex& c : all) {
    const std::size_t out = outgoing.contains(c) ? outgoing.at(c).size() : 0;
    const std::size_t in = incoming.contains(c) ? incoming.at(c) : 0;
    if (out != 1 || in != 1) {
      throw UnsupportedClassError("not-a-single-cycle: a complex has " + std::to_string(out) + " outgoing and " +
                                  std::to_string(in) + " incoming reactions");
    }
  }

  CyclicSpec spec;
  Complex current = empty;
  do {
    const std::size_t r = outgoing.at(current).front();
    spec.alpha.push_back(current.coefficients[0]);
    spec.beta.push_back(current.coefficients[1]);
    spec.kappa.push_back(rs[r].rate_constant);
    spec.step_reaction.push_back(r);
    current = rs[r].product;
  } while (current != empty && spec.step_reaction.size() <= rs.size());

  spec.L = spec.alpha.size();
  if (spec.L != rs.size() || spec.L != all.size()) {
    throw UnsupportedClassError("not-a-single-cycle: reactions split into several cycles");
  }
  return spec;
}

AssumptionReport check_cyclic_assumptions(const CyclicSpec& spec) {
  validate_spec(spec);
  AssumptionReport report;
  auto violate = [&report](std::string why) {
    report.ok = false;
    report.violations.push_back(std::move(why));
  };
  const auto& a = spec.alpha;
  const std::size_t L = spec.L;

  for (std::size_t i = 1; i < L; ++i) {
    if (a[i] <= a[i - 1]) {
      violate("alpha is not strictly increasing at i=" + std::to_string(i) + " (" + std::to_string(a[i - 1]) +
              " -> " + std::to_string(a[i]) + ")");
    }
  }
  for (std::size_t i = 1; i + 1 < L; ++i) {
    const Count second = 2 * a[i] - a[i + 1] - a[i - 1];
    if (second == 0) {
      violate("2*alpha_" + std::to_string(i) + " - alpha_" + std::to_string(i + 1) + " - alpha_" +
              std::to_string(i - 1) + " = 0");
    }
  }
  if (a[L - 1] - a[L - 2] - a[1] == 0) {
    violate("alpha_" + std::to_string(L - 1) + " - alpha_" + std::to_string(L - 2) + " - alpha_1 = 0");
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (spec.beta[i] != static_cast<Count>(i)) {
      violate("beta_" + std::to_string(i) + " = " + std::to_string(spec.beta[i]) + ", expected " + std::to_string(i));
    }
  }
  return report;
}

ThetaBounds theta_bounds(const CyclicSpec& spec) {
  validate_spec(spec);
  for (std::size_t i = 1; i < spec.L; ++i) {
    if (spec.alpha[i] <= spec.alpha[i - 1]) throw Error("theta bounds need strictly increasing alpha");
  }
  ThetaBounds tb;
  std::vector<Count> gaps;
  for (std::size_t i = 2; i <= spec.L; ++i) gaps.push_back(spec.gap(i));
  tb.theta1 = *std::min_element(gaps.begin(), gaps.end());

  const AssumptionReport report = check_cyclic_assumptions(spec);
  tb.assumptions_ok = report.ok;
  tb.violations = report.violations;
  if (report.ok) {
    Count theta2 = 2 * tb.theta1;
    for (Count g : gaps)
      if (g > tb.theta1) theta2 = std::min(theta2, g);
    tb.theta2 = theta2;
    tb.theta = std::min(1 + tb.theta1, tb.theta2);
  } else {
    tb.theta2 = tb.theta1;
    tb.theta = tb.theta1;
  }
  return tb;
}

Increment TransitionSequence::endpoint() const {
  if (increments.empty()) return {};
  Increment sum(increments.front().size(), 0);
  for (const Increment& step : increments)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += step[i];
  return sum;
}

TransitionSequence sequence_from_labels(const ReactionNetwork& net, std::vector<std::size_t> labels) {
  TransitionSequence seq;
  for (std::size_t r : labels) {
    if (r >= net.reaction_count()) throw Error("reaction label " + std::to_string(r) + " out of range");
    seq.increments.push_back(net.change(r));
  }
  seq.labels = std::move(labels);
  return seq;
}

TransitionSequence build_eta0(const CyclicSpec& spec) {
  validate_spec(spec);
  TransitionSequence seq;
  for (std::size_t k = 1; k <= spec.L; ++k) append_cycle_step(seq, spec, k);
  return seq;
}

TransitionSequence build_eta_mid(const CyclicSpec& spec, std::size_t i) {
  validate_spec(spec);
  if (i < 2 || i > spec.L - 1) {
    throw Error("excursion index " + std::to_string(i) + " outside [2, L-1] = [2, " + std::to_string(spec.L - 1) + "]");
  }
  TransitionSequence seq;
  for (std::size_t k = 1; k <= spec.L; ++k) append_cycle_step(seq, spec, k == i ? i - 1 : k);
  return seq;
}

TransitionSequence build_eta_top(const CyclicSpec& spec) {
  validate_spec(spec);
  const std::size_t L = spec.L;
  TransitionSequence seq;
  for (std::size_t k = 1; k <= L - 1; ++k) append_cycle_step(seq, spec, k);
  append_cycle_step(seq, spec, L - 1);
  append_cycle_step(seq, spec, L);
  for (std::size_t k = 2; k <= L - 1; ++k) append_cycle_step(seq, spec, k);
  append_cycle_step(seq, spec, L);
  return seq;
}

TransitionSequence build_eta(const CyclicSpec& spec, std::size_t i) {
  return i == spec.L ? build_eta_top(spec) : build_eta_mid(spec, i);
}

bool is_cycle(const TransitionSequence& seq) {
  const Increment sum = seq.endpoint();
  return !seq.empty() && std::all_of(sum.begin(), sum.end(), [](Count c) { return c == 0; });
}

PathSets dominating_paths(const CyclicSpec& spec) {
  PathSets paths;
  paths.cycles.push_back(build_eta0(spec));
  const ThetaBounds tb = theta_bounds(spec);
  if (!tb.assumptions_ok) return paths;
  for (std::size_t i = 2; i <= spec.L; ++i) {
    if (spec.gap(i) == tb.theta1) paths.excursions.push_back(build_eta(spec, i));
  }
  return paths;
}

Rational exact_propensity(const ReactionNetwork& net, std::size_t r, std::span<const Count> x) {
  const Reaction& rx = net.reactions().at(r);
  mpz_class falling = 1;
  const auto& y = rx.reactant.coefficients;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (x[i] < y[i]) return Rational(0);
    for (Count k = 0; k < y[i]; ++k) falling *= static_cast<long>(x[i] - k);
  }
  Rational value = exact_rate(rx.rate_constant) * Rational(falling);
  value.canonicalize();
  return value;
}

Rational path_probability(const ReactionNetwork& net, const State& start, const TransitionSequence& seq) {
  const std::size_t d = net.dimension();
  if (start.size() != d) throw Error("start state dimension does not match network");
  if (!feasible_from(start.vector(), seq)) {
    throw InfeasiblePathError("path leaves the non-negative orthant from " + to_string(start));
  }

  std::vector<Count> x = start.vector();
  Rational probability = 1;
  for (const Increment& step : seq.increments) {
    Rational matching = 0;
    Rational total = 0;
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
      const Rational rate = exact_propensity(net, r, x);
      total += rate;
      if (net.change(r) == step) matching += rate;
    }
    if (matching == 0) return Rational(0);
    probability *= matching / total;
    for (std::size_t i = 0; i < d; ++i) x[i] += step[i];
  }
  probability.canonicalize();
  return probability;
}

EscapeComplement escape_complement_probability(const ReactionNetwork& net, const PathSets& paths, const State& start) {
  std::vector<const TransitionSequence*> all;
  for (const auto& s : paths.cycles) all.push_back(&s);
  for (const auto& s : paths.excursions) all.push_back(&s);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      if (i != j && is_prefix(*all[i], *all[j])) throw Error("path events overlap: one path is a prefix of another");

  EscapeComplement out;
  Rational cycles = 0;
  for (const auto& s : paths.cycles) cycles += path_probability(net, start, s);
  Rational excursions = 0;
  for (const auto& s : paths.excursions) excursions += path_probability(net, start, s);
  out.cycles_only = 1 - cycles;
  out.with_excursions = 1 - cycles - excursions;
  out.cycles_only.canonicalize();
  out.with_excursions.canonicalize();
  return out;
}

EscapeComplement escape_complement_probability(const ReactionNetwork& net, const CyclicSpec& spec, Count n) {
  return escape_complement_probability(net, dominating_paths(spec), State({n, 0}));
}

bool paths_feasible(const PathSets& paths, Count n) {
  const auto start = start_state(n, path_dimension(paths));
  for (const auto* set : {&paths.cycles, &paths.excursions})
    for (const TransitionSequence& s : *set)
      if (!feasible_from(start, s)) return false;
  return true;
}

Count minimal_feasible_n(const PathSets& paths) {
  Count bound = 0;
  for (const auto* set : {&paths.cycles, &paths.excursions})
    for (const TransitionSequence& s : *set)
      for (const Increment& step : s.increments)
        if (!step.empty()) bound += step[0] < 0 ? -step[0] : step[0];
  for (Count n = 0; n <= bound; ++n)
    if (paths_feasible(paths, n)) return n;
  throw InfeasiblePathError("paths are infeasible from every (n, 0)");
}

AssumptionFit fit_samples(std::vector<std::pair<Count, Rational>> samples) {
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, double>> points;
  for (const auto& [n, p] : samples) {
    if (p < 0 || p > 1) throw Error("complement probability outside [0, 1]");
    if (p > 0 && n > 0) points.emplace_back(static_cast<double>(n), p.get_d());
  }
  if (points.size() < 2) throw Error("degenerate fit: fewer than two positive complement probabilities");
  const PowerLawFit fit = loglog_slope(points);
  AssumptionFit out;
  out.samples = std::move(samples);
  out.fitted_exponent = fit.slope;
  out.fitted_constant = std::exp(fit.intercept);
  return out;
}

AssumptionFits fit_assumption(const ReactionNetwork& net, const PathSets& paths, const std::vector<Count>& n_grid) {
  if (n_grid.size() < 3) throw Error("fit needs at least three grid points");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw Error("n grid must be strictly ascending");
  }
  std::vector<std::pair<Count, Rational>> cycles;
  std::vector<std::pair<Count, Rational>> excursions;
  for (Count n : n_grid) {
    std::vector<Count> x(net.dimension(), 0);
    x[0] = n;
    const EscapeComplement c = escape_complement_probability(net, paths, State(std::move(x)));
    cycles.emplace_back(n, c.cycles_only);
    excursions.emplace_back(n, c.with_excursions);
  }
  AssumptionFits fits{fit_samples(std::move(cycles)), fit_samples(std::move(excursions))};
  const Count n0 = minimal_feasible_n(paths);
  fits.cycles.N0_suggested = n0;
  fits.excursions.N0_suggested = n0;
  return fits;
}

AssumptionFits fit_assumption(const ReactionNetwork& net, const CyclicSpec& spec, const std::vector<Count>& n_grid) {
  return fit_assumption(net, dominating_paths(spec), n_grid);
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

}  // namespace slowmix
