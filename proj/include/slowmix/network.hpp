#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace slowmix {

using Count = std::int64_t;

/// Signed integer vector: a reaction vector or one step of a transition sequence.
using Increment = std::vector<Count>;

/// Copy-number vector. Every coordinate is non-negative; construction enforces it.
class State {
 public:
  State() = default;
  explicit State(std::vector<Count> counts);
  State(std::initializer_list<Count> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  Count operator[](std::size_t i) const { return counts_[i]; }
  std::span<const Count> counts() const noexcept { return counts_; }
  const std::vector<Count>& vector() const noexcept { return counts_; }

  /// Last coordinate is zero, i.e. the state lies on the face {x_d = 0}.
  bool on_boundary() const noexcept { return !counts_.empty() && counts_.back() == 0; }
  Count sup_norm() const noexcept;

  /// Coordinate-wise sum; throws NegativeStateError if the result leaves the orthant.
  State shifted(std::span<const Count> delta) const;

  auto operator<=>(const State&) const = default;

 private:
  std::vector<Count> counts_;
};

std::ostream& operator<<(std::ostream& os, const State& x);
std::string to_string(const State& x);

struct Species {
  std::size_t index = 0;
  std::string name;

  bool operator==(const Species&) const = default;
};

/// Stoichiometric coefficients over the network's species, in species order.
struct Complex {
  std::vector<Count> coefficients;

  bool is_zero() const noexcept;
  auto operator<=>(const Complex&) const = default;
};

struct Reaction {
  Complex reactant;
  Complex product;
  double rate_constant = 1.0;

  /// product - reactant
  Increment change() const;

  bool operator==(const Reaction&) const = default;
};

/// Species plus irreversible mass-action reactions. Immutable once built.
class ReactionNetwork {
 public:
  /// Validates every invariant; throws NetworkError on violation.
  ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions);

  const std::vector<Species>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  std::size_t dimension() const noexcept { return species_.size(); }
  std::size_t reaction_count() const noexcept { return reactions_.size(); }

  const Increment& change(std::size_t r) const { return changes_.at(r); }

  /// Distinct complexes appearing as reactant or product, in first-appearance order.
  std::vector<Complex> complexes() const;

  /// Largest |coordinate| over all reaction vectors.
  Count max_change_magnitude() const noexcept;

  bool operator==(const ReactionNetwork& other) const {
    return species_ == other.species_ && reactions_ == other.reactions_;
  }

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<Increment> changes_;
};

struct StepDistribution {
  struct Entry {
    std::size_t reaction = 0;
    State next;
    double probability = 0.0;
  };
  std::vector<Entry> entries;
  double total_rate = 0.0;

  bool absorbing() const noexcept { return entries.empty(); }
};

/// Mass-action intensity: kappa * prod_i x_i (x_i - 1) ... (x_i - y_i + 1), zero when x_i < y_i.
double propensity(const ReactionNetwork& net, std::size_t r, std::span<const Count> x);
inline double propensity(const ReactionNetwork& net, std::size_t r, const State& x) {
  return propensity(net, r, x.counts());
}

double total_rate(const ReactionNetwork& net, std::span<const Count> x);
inline double total_rate(const ReactionNetwork& net, const State& x) { return total_rate(net, x.counts()); }

/// One-step law of the embedded jump chain at x. Empty iff x is absorbing.
StepDistribution embedded_step_distribution(const ReactionNetwork& net, const State& x);

State apply_reaction(const State& x, const Reaction& r);

}  // namespace slowmix
