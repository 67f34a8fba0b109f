#include "slowmix/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

#include "slowmix/error.hpp"

namespace slowmix {

namespace {

void require_non_negative(const std::vector<Count>& counts) {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      throw NegativeStateError("coordinate " + std::to_string(i) + " is negative (" +
                               std::to_string(counts[i]) + ")");
    }
  }
}

}  // namespace

State::State(std::vector<Count> counts) : counts_(std::move(counts)) { require_non_negative(counts_); }

State::State(std::initializer_list<Count> counts) : counts_(counts) { require_non_negative(counts_); }

Count State::sup_norm() const noexcept {
  Count m = 0;
  for (Count c : counts_) m = std::max(m, c);
  return m;
}

State State::shifted(std::span<const Count> delta) const {
  if (delta.size() != counts_.size()) throw Error("dimension mismatch in State::shifted");
  std::vector<Count> out(counts_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta[i];
  return State(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const State& x) {
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ',';
    os << x[i];
  }
  return os << ')';
}

std::string to_string(const State& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

bool Complex::is_zero() const noexcept {
  return std::all_of(coefficients.begin(), coefficients.end(), [](Count c) { return c == 0; });
}

Increment Reaction::change() const {
  Increment v(product.coefficients.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = product.coefficients[i] - reactant.coefficients[i];
  return v;
}

ReactionNetwork::ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty()) throw NetworkError("network has no species");
  if (reactions_.empty()) throw NetworkError("network has no reactions");

  std::set<std::string> names;
  for (std::size_t i = 0; i < species_.size(); ++i) {
    if (species_[i].index != i) throw NetworkError("species '" + species_[i].name + "' has index out of order");
    if (!names.insert(species_[i].name).second) throw NetworkError("duplicate species '" + species_[i].name + "'");
  }

  const std::size_t d = species_.size();
  changes_.reserve(reactions_.size());
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const Reaction& rx = reactions_[r];
    const std::string where = "reaction " + std::to_string(r);
    if (rx.reactant.coefficients.size() != d || rx.product.coefficients.size() != d) {
      throw NetworkError(where + ": complex dimension does not match species count");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (rx.reactant.coefficients[i] < 0 || rx.product.coefficients[i] < 0) {
        throw NetworkError(where + ": negative stoichiometric coefficient");
      }
    }
    if (rx.reactant == rx.product) throw NetworkError(where + ": reactant equals product");
    if (!(rx.rate_constant > 0.0) || !std::isfinite(rx.rate_constant)) {
      throw NetworkError(where + ": rate constant must be positive and finite");
    }
    changes_.push_back(rx.change());
  }
}

std::vector<Complex> ReactionNetwork::complexes() const {
  std::vector<Complex> out;
  auto add = [&out](const Complex& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (const Reaction& rx : reactions_) {
    add(rx.reactant);
    add(rx.product);
  }
  return out;
}

Count ReactionNetwork::max_change_magnitude() const noexcept {
  Count m = 0;
  for (const Increment& v : changes_)
    for (Count c : v) m = std::max(m, c < 0 ? -c : c);
  return m;
}

double propensity(const ReactionNetwork& net, std::size_t r, std::span<const Count> x) {
  const Reaction& rx = net.reactions().at(r);
  double value = rx.rate_constant;
  const auto& y = rx.reactant.coefficients;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (x[i] < y[i]) return 0.0;
    for (Count k = 0; k < y[i]; ++k) value *= static_cast<double>(x[i] - k);
  }
  return value;
}

double total_rate(const ReactionNetwork& net, std::span<const Count> x) {
  double sum = 0.0;
  for (std::size_t r = 0; r < net.reaction_count(); ++r) sum += propensity(net, r, x);
  return sum;
}

StepDistribution embedded_step_distribution(const ReactionNetwork& net, const State& x) {
  StepDistribution dist;
  std::vector<double> rates(net.reaction_count());
  for (std::size_t r = 0; r < rates.size(); ++r) {
    rates[r] = propensity(net, r, x);
    dist.total_rate += rates[r];
  }
  if (dist.total_rate <= 0.0) return dist;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    if (rates[r] <= 0.0) continue;
    dist.entries.push_back({r, x.shifted(net.change(r)), rates[r] / dist.total_rate});
  }
  return dist;
}

State apply_reaction(const State& x, const Reaction& r) {
  if (r.reactant.coefficients.size() != x.size()) throw Error("reaction dimension does not match state");
  return x.shifted(r.change());
}

}  // namespace slowmix
