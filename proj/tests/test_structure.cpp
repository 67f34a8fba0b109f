#include <doctest.h>

#include <cmath>

#include "slowmix/error.hpp"
#include "slowmix/network.hpp"
#include "slowmix/path_file.hpp"
#include "slowmix/structure.hpp"
#include "support.hpp"

using namespace slowmix;

namespace {

Rational q(long p, long r) {
  Rational v(p, r);
  v.canonicalize();
  return v;
}

// Floating-point product of embedded step probabilities along the labels.
double float_path_probability(const ReactionNetwork& net, State x, const TransitionSequence& seq) {
  double p = 1.0;
  for (const Increment& inc : seq.increments) {
    const StepDistribution d = embedded_step_distribution(net, x);
    double step = 0.0;
    for (const auto& e : d.entries)
      if (net.change(e.reaction) == inc) step += e.probability;
    if (step == 0.0) return 0.0;
    p *= step;
    x = x.shifted(inc);
  }
  return p;
}

}  // namespace

TEST_CASE("recognize the example cyclic network") {
  const CyclicSpec spec = recognize_cyclic(load_network(fixtures::data("example32_a2.net")));
  CHECK(spec.L == 3);
  CHECK(spec.alpha == std::vector<Count>{0, 2, 3});
  CHECK(spec.beta == std::vector<Count>{0, 1, 2});
  CHECK(spec.kappa == std::vector<double>{1, 1, 1});
}

TEST_CASE("recognize ignores reaction order in the file") {
  const CyclicSpec spec = recognize_cyclic(parse_network("3 A + 2 B -> 0 @ 3\n2 A + B -> 3 A + 2 B @ 2\n0 -> 2 A + B @ 1"));
  CHECK(spec.alpha == std::vector<Count>{0, 2, 3});
  CHECK(spec.kappa == std::vector<double>{1, 2, 3});
  CHECK(spec.step_reaction == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("recognize rejects networks outside the class") {
  CHECK_THROWS_AS(recognize_cyclic(fixtures::model12()), UnsupportedClassError);
  CHECK_THROWS_AS(recognize_cyclic(parse_network("0 -> A @ 1\nA -> 0 @ 1")), UnsupportedClassError);
  CHECK_THROWS_AS(recognize_cyclic(load_network(fixtures::data("not_cyclic.net"))), UnsupportedClassError);
  CHECK_THROWS_AS(recognize_cyclic(parse_network("A -> B @ 1\nB -> A @ 1")), UnsupportedClassError);
  CHECK_THROWS_AS(recognize_cyclic(parse_network("0 -> A + B @ 1\nA + B -> 0 @ 1\nA + B -> 0 @ 2")),
                  UnsupportedClassError);
}

TEST_CASE("L = 2 cycle with a silent second species") {
  // The DSL only declares species that occur, so B is supplied through the constructed network.
  const CyclicSpec spec = make_cyclic_spec({0, 1}, {0, 0}, {1.0, 1.0});
  const CyclicSpec back = recognize_cyclic(cyclic_network(spec));
  CHECK(back.L == 2);
  CHECK(back.alpha == std::vector<Count>{0, 1});
  CHECK(back.beta == std::vector<Count>{0, 0});
}

TEST_CASE("assumption checks") {
  CHECK(check_cyclic_assumptions(fixtures::example32(2)).ok);
  const AssumptionReport flat = check_cyclic_assumptions(make_cyclic_spec({0, 1, 2}, {0, 1, 2}, {1, 1, 1}));
  CHECK_FALSE(flat.ok);
  CHECK(flat.violations.size() >= 1);
  CHECK(check_cyclic_assumptions(make_cyclic_spec({0, 2, 5, 9}, {0, 1, 2, 3}, {1, 1, 1, 1})).ok);
  CHECK_FALSE(check_cyclic_assumptions(make_cyclic_spec({0, 2, 3}, {0, 2, 1}, {1, 1, 1})).ok);
}

TEST_CASE("theta bounds") {
  const ThetaBounds a2 = theta_bounds(fixtures::example32(2));
  CHECK(a2.theta1 == 1);
  CHECK(a2.theta2 == 2);
  CHECK(a2.theta == 2);

  const ThetaBounds b = theta_bounds(make_cyclic_spec({0, 3, 5}, {0, 1, 2}, {1, 1, 1}));
  CHECK(b.theta1 == 2);
  CHECK(b.theta2 == 3);
  CHECK(b.theta == 3);

  const ThetaBounds c = theta_bounds(make_cyclic_spec({0, 2, 5, 9}, {0, 1, 2, 3}, {1, 1, 1, 1}));
  CHECK(c.theta1 == 2);
  CHECK(c.theta2 == 3);
  CHECK(c.theta == 3);

  for (Count a = 2; a <= 6; ++a) CHECK(theta_bounds(fixtures::example32(a)).theta == a);

  const ThetaBounds fallback = theta_bounds(make_cyclic_spec({0, 1, 2}, {0, 1, 2}, {1, 1, 1}));
  CHECK_FALSE(fallback.assumptions_ok);
  CHECK(fallback.theta == fallback.theta1);
  CHECK(fallback.theta2 == fallback.theta1);

  CHECK_THROWS_AS(theta_bounds(make_cyclic_spec({0, 3, 2}, {0, 1, 2}, {1, 1, 1})), Error);
}

TEST_CASE("theta is invariant under a common rate rescaling") {
  for (double s : {0.01, 0.5, 7.0, 1e4}) {
    CyclicSpec spec = make_cyclic_spec({0, 2, 5, 9}, {0, 1, 2, 3}, {1.0, 2.0, 0.5, 3.0});
    const ThetaBounds base = theta_bounds(spec);
    for (double& k : spec.kappa) k *= s;
    const ThetaBounds scaled = theta_bounds(spec);
    CHECK(scaled.theta1 == base.theta1);
    CHECK(scaled.theta2 == base.theta2);
    CHECK(scaled.theta == base.theta);
  }
}

TEST_CASE("eta0") {
  const TransitionSequence eta0 = build_eta0(fixtures::example32(2));
  CHECK(eta0.increments == std::vector<Increment>{{2, 1}, {1, 1}, {-3, -2}});
  CHECK(is_cycle(eta0));
  const TransitionSequence small = build_eta0(make_cyclic_spec({0, 1}, {0, 1}, {1, 1}));
  CHECK(small.increments == std::vector<Increment>{{1, 1}, {-1, -1}});
}

TEST_CASE("excursions leave the cycle with the predicted offsets") {
  const CyclicSpec spec = make_cyclic_spec({0, 2, 5, 9}, {0, 1, 2, 3}, {1, 1, 1, 1});
  CHECK(build_eta_mid(spec, 2).endpoint() == Increment{-1, 0});
  for (std::size_t i = 2; i <= spec.L - 1; ++i) {
    const TransitionSequence eta = build_eta_mid(spec, i);
    CHECK(eta.size() == spec.L);
    CHECK(eta.endpoint() == Increment{2 * spec.alpha[i - 1] - spec.alpha[i - 2] - spec.alpha[i], 0});
    CHECK(eta.increments[i - 1] == eta.increments[i - 2]);
  }
  const TransitionSequence top = build_eta_top(spec);
  CHECK(top.size() == 2 * spec.L);
  CHECK(top.endpoint() == Increment{spec.alpha[3] - spec.alpha[2] - spec.alpha[1], 0});

  const CyclicSpec a2 = fixtures::example32(2);
  const TransitionSequence mid = build_eta_mid(a2, 2);
  CHECK(mid.increments == std::vector<Increment>{{2, 1}, {2, 1}, {-3, -2}});
  CHECK(mid.endpoint() == Increment{1, 0});
  const TransitionSequence top2 = build_eta_top(a2);
  CHECK(top2.increments == std::vector<Increment>{{2, 1}, {1, 1}, {1, 1}, {-3, -2}, {1, 1}, {-3, -2}});
  CHECK(top2.endpoint() == Increment{-1, 0});
  CHECK_FALSE(is_cycle(top2));

  CHECK_THROWS_AS(build_eta_mid(a2, 3), Error);
  CHECK_THROWS_AS(build_eta_mid(a2, 1), Error);
}

TEST_CASE("L = 2 top excursion is degenerate") {
  const CyclicSpec spec = make_cyclic_spec({0, 1}, {0, 1}, {1, 1});
  CHECK_FALSE(theta_bounds(spec).assumptions_ok);
  const TransitionSequence top = build_eta_top(spec);
  CHECK(top.increments == std::vector<Increment>{{1, 1}, {1, 1}, {-1, -1}, {-1, -1}});
  CHECK(dominating_paths(spec).excursions.empty());
}

TEST_CASE("is_cycle") {
  CHECK_FALSE(is_cycle(TransitionSequence{{{0, 1}}, {0}}));
  for (Count a = 2; a <= 5; ++a) CHECK(is_cycle(build_eta0(fixtures::example32(a))));
}

TEST_CASE("exact path probabilities of the two-species model") {
  const ReactionNetwork net = fixtures::model12();
  const State start{10, 0};
  const TransitionSequence eta1 = sequence_from_labels(net, {0, 1});
  const TransitionSequence eta2 = sequence_from_labels(net, {0, 0, 1, 1});
  const TransitionSequence eta3 = sequence_from_labels(net, {0, 2, 1, 1});
  CHECK(path_probability(net, start, eta1) == q(11, 13));
  CHECK(path_probability(net, start, eta2) == q(1, 13) * q(24, 29) * q(11, 13));
  CHECK(path_probability(net, start, eta3) == q(1, 13) * q(22, 27) * q(10, 12));
  CHECK(path_probability(net, start, TransitionSequence{}) == 1);
  CHECK(path_probability(net, State{0, 1}, sequence_from_labels(net, {3})) == 0);
  CHECK_THROWS_AS(path_probability(net, State{0, 0}, TransitionSequence{{{-1, 0}}, {0}}), InfeasiblePathError);
}

TEST_CASE("exact path probabilities agree with floating-point products") {
  const ReactionNetwork net = fixtures::model12();
  const PathSets paths = load_path_file(fixtures::data("model12.paths"), net);
  for (Count n : {3, 10, 57, 400}) {
    for (const auto* set : {&paths.cycles, &paths.excursions}) {
      for (const TransitionSequence& seq : *set) {
        const double exact = path_probability(net, State{n, 0}, seq).get_d();
        const double approx = float_path_probability(net, State{n, 0}, seq);
        CHECK(std::abs(exact - approx) <= 1e-9 * approx);
        CHECK(exact >= 0.0);
        CHECK(exact <= 1.0);
      }
    }
  }
  for (Count a = 2; a <= 4; ++a) {
    const CyclicSpec spec = fixtures::example32(a);
    const ReactionNetwork cyc = cyclic_network(spec);
    const PathSets auto_paths = dominating_paths(spec);
    for (const TransitionSequence& seq : auto_paths.excursions) {
      const double exact = path_probability(cyc, State{50, 0}, seq).get_d();
      CHECK(std::abs(exact - float_path_probability(cyc, State{50, 0}, seq)) <= 1e-9 * exact);
    }
  }
}

TEST_CASE("escape complement for hand-supplied paths") {
  const ReactionNetwork net = fixtures::model12();
  const PathSets paths = parse_path_file("[cycles]\n0,1\n0,0,1,1\n[excursions]\n0,2,1,1\n", net);
  const EscapeComplement c = escape_complement_probability(net, paths, State{10, 0});
  CHECK(c.cycles_only == 1 - q(11, 13) - q(1, 13) * q(24, 29) * q(11, 13));
  CHECK(c.with_excursions == c.cycles_only - q(1, 13) * q(22, 27) * q(10, 12));
}

TEST_CASE("escape complement for the constructed paths") {
  const CyclicSpec spec = fixtures::example32(2);
  const ReactionNetwork net = cyclic_network(spec);
  const EscapeComplement c = escape_complement_probability(net, spec, 100);
  CHECK(c.cycles_only > 0);
  CHECK(c.cycles_only <= Rational(2, 100));
  CHECK(c.with_excursions < c.cycles_only);
  CHECK_THROWS_AS(escape_complement_probability(net, spec, 0), InfeasiblePathError);
  CHECK(minimal_feasible_n(dominating_paths(spec)) == 1);
}

TEST_CASE("assumption fit recovers the exponents") {
  const CyclicSpec spec = fixtures::example32(2);
  const AssumptionFits fit = fit_assumption(cyclic_network(spec), spec, {50, 100, 200, 400, 800});
  CHECK(std::abs(fit.cycles.fitted_exponent + 1.0) <= 0.1);
  CHECK(std::abs(fit.excursions.fitted_exponent + 2.0) <= 0.2);
  CHECK(fit.cycles.samples.size() == 5);
  CHECK(fit.cycles.N0_suggested == 1);
  for (const auto& [n, p] : fit.excursions.samples) {
    CHECK(p >= 0);
    CHECK(p <= 1);
  }
  CHECK_THROWS_AS(fit_assumption(cyclic_network(spec), spec, {50, 100}), Error);
  CHECK_THROWS_AS(fit_assumption(cyclic_network(spec), spec, {100, 50, 200}), Error);
}

TEST_CASE("fit on constant and degenerate samples") {
  const AssumptionFit flat = fit_samples({{10, q(1, 3)}, {20, q(1, 3)}, {40, q(1, 3)}});
  CHECK(std::abs(flat.fitted_exponent) < 1e-12);
  CHECK(flat.fitted_constant == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(fit_samples({{10, 0}, {20, 0}, {40, 0}}), Error);
}

TEST_CASE("path file parsing") {
  const ReactionNetwork net = fixtures::model12();
  const PathSets p = load_path_file(fixtures::data("model12.paths"), net);
  CHECK(p.cycles.size() == 2);
  CHECK(p.excursions.size() == 1);
  CHECK(p.excursions[0].labels == std::vector<std::size_t>{0, 2, 1, 1});
  CHECK(parse_path_file(render_path_file(p), net).cycles[1].labels == p.cycles[1].labels);
  CHECK_THROWS_AS(parse_path_file("[cycles]\n0, 9\n", net), Error);
  CHECK_THROWS_AS(parse_path_file("0, 1\n", net), ParseError);
  CHECK_THROWS_AS(parse_path_file("[loops]\n0\n", net), ParseError);
  CHECK_THROWS_AS(parse_path_file("[cycles]\n0,,1\n", net), ParseError);
}
