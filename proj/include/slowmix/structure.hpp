#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "slowmix/network.hpp"

namespace slowmix {

using Rational = mpq_class;

/// A two-species network whose reactions form one directed cycle of
/// complexes z_0 = 0 -> z_1 -> ... -> z_{L-1} -> z_0, with z_i = alpha_i A + beta_i B.
/// Coordinate 0 of the source network plays A, coordinate 1 plays B.
struct CyclicSpec {
  std::size_t L = 0;
  std::vector<Count> alpha;
  std::vector<Count> beta;
  /// kappa[i] is the rate constant of z_i -> z_{i+1 mod L}.
  std::vector<double> kappa;
  /// step_reaction[i] is the index, in the source network, of z_i -> z_{i+1 mod L}.
  std::vector<std::size_t> step_reaction;

  Count gap(std::size_t i) const { return alpha[i - 1] - alpha[i - 2]; }  // 2 <= i <= L
};

/// Builds a spec directly from coefficients; step_reaction is the identity.
CyclicSpec make_cyclic_spec(std::vector<Count> alpha, std::vector<Count> beta, std::vector<double> kappa);

/// The network "0 -> z_1 -> ... -> z_{L-1} -> 0" over species (A, B), reaction i being z_i -> z_{i+1}.
ReactionNetwork cyclic_network(const CyclicSpec& spec);

/// Throws UnsupportedClassError unless the reactions form a single cycle through the empty complex.
CyclicSpec recognize_cyclic(const ReactionNetwork& net);

struct AssumptionReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Strictly increasing alpha, non-vanishing second differences, the wrap-around
/// condition alpha_{L-1} - alpha_{L-2} - alpha_1 != 0, and beta_i = i.
AssumptionReport check_cyclic_assumptions(const CyclicSpec& spec);

struct ThetaBounds {
  Count theta1 = 0;
  Count theta2 = 0;
  Count theta = 0;
  bool assumptions_ok = false;
  std::vector<std::string> violations;
};

/// theta1 is the smallest consecutive alpha gap. When the assumptions hold,
/// theta2 = min(smallest gap exceeding theta1, 2 theta1) and theta = 1 + theta1;
/// otherwise theta2 = theta = theta1. Throws Error if alpha is not strictly increasing.
ThetaBounds theta_bounds(const CyclicSpec& spec);

struct TransitionSequence {
  std::vector<Increment> increments;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return increments.size(); }
  bool empty() const noexcept { return increments.empty(); }
  Increment endpoint() const;
};

/// Sequence whose increments are the change vectors of the given reactions.
TransitionSequence sequence_from_labels(const ReactionNetwork& net, std::vector<std::size_t> labels);

/// The dominating cycle: every step follows the most likely reaction.
TransitionSequence build_eta0(const CyclicSpec& spec);
/// Leaves the dominating cycle at step i (2 <= i <= L-1) by repeating step i-1.
TransitionSequence build_eta_mid(const CyclicSpec& spec, std::size_t i);
/// Leaves the dominating cycle at step L, then returns to the axis along the cycle; length 2L.
TransitionSequence build_eta_top(const CyclicSpec& spec);
/// Dispatches to build_eta_mid or build_eta_top.
TransitionSequence build_eta(const CyclicSpec& spec, std::size_t i);

bool is_cycle(const TransitionSequence& seq);

/// Cyclic dominating paths and boundary excursions. Events of distinct members are disjoint.
struct PathSets {
  std::vector<TransitionSequence> cycles;
  std::vector<TransitionSequence> excursions;
};

/// {eta0} and {eta^i : alpha_{i-1} - alpha_{i-2} = theta1}; the excursion set is
/// empty when the assumptions fail.
PathSets dominating_paths(const CyclicSpec& spec);

/// Probability that the embedded chain started at `start` follows `seq`
/// for its first |seq| steps, in exact arithmetic. A step matches any reaction
/// with the same change vector. Throws InfeasiblePathError if the path visits a
/// negative state.
Rational path_probability(const ReactionNetwork& net, const State& start, const TransitionSequence& seq);

/// Exact mass-action intensity with the rate constant taken as the exact value of its double.
Rational exact_propensity(const ReactionNetwork& net, std::size_t r, std::span<const Count> x);

struct EscapeComplement {
  Rational cycles_only;      // 1 - sum over cycles
  Rational with_excursions;  // 1 - sum over cycles and excursions
};

EscapeComplement escape_complement_probability(const ReactionNetwork& net, const PathSets& paths, const State& start);
/// Starting point (n, 0) and the automatically constructed path sets.
EscapeComplement escape_complement_probability(const ReactionNetwork& net, const CyclicSpec& spec, Count n);

/// True if every path in `paths` stays in the orthant from (n, 0).
bool paths_feasible(const PathSets& paths, Count n);
/// Smallest n >= 0 with paths_feasible(paths, n).
Count minimal_feasible_n(const PathSets& paths);

struct AssumptionFit {
  std::vector<std::pair<Count, Rational>> samples;  // (n, complement), sorted by n
  double fitted_exponent = 0.0;                     // slope of log p against log n
  double fitted_constant = 0.0;                     // p ~ constant * n^exponent
  Count N0_suggested = 0;                           // smallest n from which every path is feasible
};

/// Ordinary least squares of log p on log n over the positive samples.
/// Throws Error if fewer than two samples are positive.
AssumptionFit fit_samples(std::vector<std::pair<Count, Rational>> samples);

struct AssumptionFits {
  AssumptionFit cycles;
  AssumptionFit excursions;
};

AssumptionFits fit_assumption(const ReactionNetwork& net, const PathSets& paths, const std::vector<Count>& n_grid);
AssumptionFits fit_assumption(const ReactionNetwork& net, const CyclicSpec& spec, const std::vector<Count>& n_grid);

/// "p/q" (or "p" for integers).
std::string to_string(const Rational& q);

}  // namespace slowmix
