#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "slowmix/analysis.hpp"
#include "slowmix/error.hpp"

namespace slowmix {

Window::Window(std::vector<Count> lower, std::vector<Count> upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) throw Error("window bounds must have equal, non-zero length");
  volume_ = 1;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (lower_[i] < 0) throw Error("window lower bound must be non-negative");
    if (lower_[i] > upper_[i]) throw Error("window lower bound exceeds upper bound");
    volume_ *= static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
  }
}

bool Window::contains(std::span<const Count> x) const noexcept {
  if (x.size() != lower_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  return true;
}

std::size_t Window::offset(std::span<const Count> x) const noexcept {
  std::size_t off = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    off = off * static_cast<std::size_t>(upper_[i] - lower_[i] + 1) + static_cast<std::size_t>(x[i] - lower_[i]);
  }
  return off;
}

State Window::state_at(std::size_t offset) const {
  std::vector<Count> x(lower_.size());
  for (std::size_t i = lower_.size(); i-- > 0;) {
    const auto extent = static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
    x[i] = lower_[i] + static_cast<Count>(offset % extent);
    offset /= extent;
  }
  return State(std::move(x));
}

double Pmf::window_mass() const noexcept {
  double sum = 0.0;
  for (double m : mass) sum += m;
  return sum;
}

void Pmf::validate(double tol) const {
  for (double m : mass)
    if (!(m >= 0.0)) throw Error("pmf has a negative or NaN mass");
  if (!(tail_mass >= 0.0) || tail_mass > 1.0 + tol) throw Error("pmf tail mass outside [0, 1]");
  const double total = window_mass() + tail_mass;
  if (std::abs(total - 1.0) > tol) throw Error("pmf masses sum to " + std::to_string(total) + ", expected 1");
}

double poisson_product_pmf(std::span<const double> c, std::span<const Count> x) {
  if (c.size() != x.size()) throw Error("concentration vector and state differ in dimension");
  double log_p = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw Error("Poisson parameters must be positive");
    if (x[i] < 0) return 0.0;
    const double k = static_cast<double>(x[i]);
    log_p += -c[i] + k * std::log(c[i]) - std::lgamma(k + 1.0);
  }
  return std::exp(log_p);
}

BalanceCheck verify_complex_balanced(const ReactionNetwork& net, std::span<const double> c, double tol) {
  if (c.size() != net.dimension()) throw Error("concentration vector dimension does not match network");
  for (double ci : c)
    if (!(ci > 0.0)) throw Error("complex balance needs a positive concentration vector");

  BalanceCheck check;
  for (const Complex& y : net.complexes()) check.residuals.push_back({y, 0.0, 0.0});
  auto slot = [&check](const Complex& y) -> ComplexResidual& {
    return *std::find_if(check.residuals.begin(), check.residuals.end(),
                         [&y](const ComplexResidual& r) { return r.complex == y; });
  };

  double largest = 1.0;
  for (const Reaction& rx : net.reactions()) {
    double flux = rx.rate_constant;
    for (std::size_t i = 0; i < c.size(); ++i) flux *= std::pow(c[i], static_cast<double>(rx.reactant.coefficients[i]));
    slot(rx.reactant).outflow += flux;
    slot(rx.product).inflow += flux;
    largest = std::max(largest, flux);
  }
  check.balanced = true;
  for (const ComplexResidual& r : check.residuals) {
    check.max_abs_residual = std::max(check.max_abs_residual, std::abs(r.residual()));
  }
  check.balanced = check.max_abs_residual <= tol * largest;
  return check;
}

std::vector<State> reachable_class(const ReactionNetwork& net, const State& init, const Window& window) {
  if (!window.contains(init)) throw Error("class seed " + to_string(init) + " lies outside the window");
  std::vector<char> seen(window.volume(), 0);
  std::deque<std::vector<Count>> queue{init.vector()};
  seen[window.offset(init.counts())] = 1;
  while (!queue.empty()) {
    const std::vector<Count> x = std::move(queue.front());
    queue.pop_front();
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
      if (propensity(net, r, x) <= 0.0) continue;
      std::vector<Count> y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += net.change(r)[i];
      if (!window.contains(y)) continue;
      char& mark = seen[window.offset(y)];
      if (mark) continue;
      mark = 1;
      queue.push_back(std::move(y));
    }
  }
  std::vector<State> out;
  for (std::size_t off = 0; off < seen.size(); ++off)
    if (seen[off]) out.push_back(window.state_at(off));
  return out;
}

StationaryPmf stationary_pmf(const ReactionNetwork& net, std::span<const double> c, const Window& window,
                             StationaryMode mode, const std::optional<State>& class_seed) {
  if (window.dimension() != net.dimension()) throw Error("window dimension does not match network");
  StationaryPmf out{Pmf(window), verify_complex_balanced(net, c)};
  Pmf& pmf = out.pmf;
  for (std::size_t off = 0; off < window.volume(); ++off) {
    pmf.mass[off] = poisson_product_pmf(c, window.state_at(off).counts());
  }
  const double window_mass = pmf.window_mass();
  pmf.tail_mass = std::max(0.0, 1.0 - window_mass);
  if (mode == StationaryMode::Full) return out;

  if (!class_seed) throw Error("class mode needs a seed state");
  const std::vector<State> cls = reachable_class(net, *class_seed, window);
  if (cls.empty()) throw Error("empty communication class");
  std::vector<double> restricted(window.volume(), 0.0);
  double class_mass = 0.0;
  for (const State& x : cls) {
    const std::size_t off = window.offset(x.counts());
    restricted[off] = pmf.mass[off];
    class_mass += pmf.mass[off];
  }
  if (!(class_mass > 0.0)) throw Error("communication class carries no Poisson mass");
  const double scale = (1.0 - pmf.tail_mass) / class_mass;
  for (double& m : restricted) m *= scale;
  pmf.mass = std::move(restricted);
  return out;
}

Window balance_interior(const ReactionNetwork& net, const Window& window) {
  const Count r = net.max_change_magnitude();
  std::vector<Count> lo = window.lower();
  std::vector<Count> hi = window.upper();
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > 0) lo[i] += r;
    hi[i] -= r;
    if (hi[i] < lo[i]) throw Error("degenerate window: no interior left after shrinking by " + std::to_string(r));
  }
  return Window(std::move(lo), std::move(hi));
}

double generator_balance_residual(const ReactionNetwork& net, const Pmf& pmf, const Window& interior, double floor) {
  if (interior.volume() == 0) throw Error("empty interior");
  if (interior.dimension() != net.dimension() || pmf.window.dimension() != net.dimension()) {
    throw Error("window dimension does not match network");
  }
  double worst = 0.0;
  std::vector<Count> source(net.dimension());
  for (std::size_t off = 0; off < interior.volume(); ++off) {
    const State y = interior.state_at(off);
    if (!pmf.window.contains(y)) throw Error("interior state " + to_string(y) + " lies outside the pmf window");

    const double outflow = pmf.at(y) * total_rate(net, y);
    double inflow = 0.0;
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
      bool negative = false;
      for (std::size_t i = 0; i < source.size(); ++i) {
        source[i] = y[i] - net.change(r)[i];
        negative = negative || source[i] < 0;
      }
      if (negative) continue;
      if (!pmf.window.contains(source)) {
        throw Error("in-neighbour of " + to_string(y) + " falls outside the pmf window; shrink the interior");
      }
      inflow += pmf.mass[pmf.window.offset(source)] * propensity(net, r, source);
    }
    worst = std::max(worst, std::abs(inflow - outflow) / std::max(outflow, floor));
  }
  return worst;
}

}  // namespace slowmix
