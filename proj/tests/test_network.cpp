#include <doctest.h>

#include <cmath>
#include <string>

#include "slowmix/dsl.hpp"
#include "slowmix/error.hpp"
#include "slowmix/network.hpp"
#include "slowmix/random.hpp"
#include "support.hpp"

using namespace slowmix;

namespace {

std::vector<ReactionNetwork> fixture_networks() {
  return {fixtures::model12(),
          load_network(fixtures::data("example32_a2.net")),
          load_network(fixtures::data("example32_a3.net")),
          load_network(fixtures::data("cyclic_2_5_9.net")),
          load_network(fixtures::data("not_cyclic.net"))};
}

// Independent falling factorial: x! / (x - y)! via lgamma, exact for small arguments.
double falling(Count x, Count y) {
  if (x < y) return 0.0;
  return std::round(std::exp(std::lgamma(static_cast<double>(x) + 1) - std::lgamma(static_cast<double>(x - y) + 1)));
}

}  // namespace

TEST_CASE("parse model with reversible pairs") {
  const ReactionNetwork net = fixtures::model12();
  REQUIRE(net.dimension() == 2);
  CHECK(net.species()[0].name == "A");
  CHECK(net.species()[1].name == "B");
  REQUIRE(net.reaction_count() == 4);
  CHECK(net.change(0) == Increment{1, 1});
  CHECK(net.change(1) == Increment{-1, -1});
  CHECK(net.change(2) == Increment{0, 1});
  CHECK(net.change(3) == Increment{0, -1});
}

TEST_CASE("parse single production reaction") {
  const ReactionNetwork net = parse_network("0 -> A @ 2.5");
  CHECK(net.dimension() == 1);
  REQUIRE(net.reaction_count() == 1);
  CHECK(net.reactions()[0].rate_constant == 2.5);
  CHECK(render_network(net) == "0 -> A @ 2.5\n");
}

TEST_CASE("parse accepts comments, blank lines, empty-set glyph and tight spacing") {
  const ReactionNetwork net = parse_network("# header\n\n∅ -> 2A+B @ 1e-1   # trailing\n2A+B->0@3\n");
  CHECK(net.reaction_count() == 2);
  CHECK(net.reactions()[0].product.coefficients == std::vector<Count>{2, 1});
  CHECK(net.reactions()[0].rate_constant == doctest::Approx(0.1));
  CHECK(net.reactions()[1].rate_constant == 3.0);
}

TEST_CASE("parse errors carry line and column") {
  auto error_of = [](const std::string& text) -> ParseError {
    try {
      parse_network(text);
    } catch (const ParseError& e) {
      return e;
    }
    FAIL("no error for: " << text);
    return ParseError("", 0, 0);
  };

  const ParseError same = error_of("A -> A @ 1");
  CHECK(same.line() == 1);
  CHECK(same.message() == "reactant equals product");

  const ParseError dup = error_of("0 -> A @ 1\nA + A -> B @ 1");
  CHECK(dup.line() == 2);
  CHECK(dup.column() == 5);

  CHECK(error_of("0 -> A @ 0").line() == 1);
  CHECK(error_of("0 -> A @ -1").line() == 1);
  CHECK(error_of("0 -> A @ x").line() == 1);
  CHECK(error_of("0 <-> A @ 1").line() == 1);
  CHECK(error_of("0 -> A @ 1, 2").line() == 1);
  CHECK(error_of("0 -> 0 A @ 1").line() == 1);
  CHECK(error_of("0 => A @ 1").column() == 3);
  CHECK(error_of("0 -> A @ 1 junk").line() == 1);
  CHECK(error_of("# nothing\n").line() >= 1);

  const ParseError col = error_of("∅ -> A + @ 1");
  CHECK(col.column() == 10);
}

TEST_CASE("render folds reversible pairs and roundtrips") {
  const ReactionNetwork net = fixtures::model12();
  CHECK(render_network(net) == "0 <-> A + B @ 1, 1\nB <-> 2 B @ 1, 1\n");
  CHECK(parse_network(render_network(net)) == net);
  for (const ReactionNetwork& f : fixture_networks()) CHECK(parse_network(render_network(f)) == f);
}

TEST_CASE("render/parse roundtrip over random networks") {
  const char* names[] = {"A", "B", "C2", "x_1"};
  Stream rng(2024, 0);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int reactions = 1 + static_cast<int>(rng.uniform() * 5);
    for (int r = 0; r < reactions; ++r) {
      auto complex = [&] {
        std::string c;
        for (const char* name : names) {
          const int k = static_cast<int>(rng.uniform() * 4) - 1;
          if (k <= 0) continue;
          if (!c.empty()) c += " + ";
          c += (k == 1 ? std::string() : std::to_string(k) + " ") + name;
        }
        return c.empty() ? std::string("0") : c;
      };
      const std::string lhs = complex();
      std::string rhs = complex();
      if (rhs == lhs) rhs = lhs == "0" ? "A" : "0";
      const double k1 = 1e-3 + rng.uniform() * 50.0;
      if (rng.uniform() < 0.5) {
        text += lhs + " -> " + rhs + " @ " + format_rate(k1) + "\n";
      } else {
        text += lhs + " <-> " + rhs + " @ " + format_rate(k1) + ", " + format_rate(1.0 / k1) + "\n";
      }
    }
    const ReactionNetwork net = parse_network(text);
    const ReactionNetwork again = parse_network(render_network(net));
    REQUIRE_MESSAGE(again == net, text);
  }
}

TEST_CASE("network invariants are enforced") {
  CHECK_THROWS_AS(ReactionNetwork({}, {}), NetworkError);
  const std::vector<Species> ab = {{0, "A"}, {1, "B"}};
  CHECK_THROWS_AS(ReactionNetwork(ab, {}), NetworkError);
  CHECK_THROWS_AS(ReactionNetwork(ab, {Reaction{{{0, 0}}, {{1, 0}}, 0.0}}), NetworkError);
  CHECK_THROWS_AS(ReactionNetwork(ab, {Reaction{{{0, 0}}, {{1}}, 1.0}}), NetworkError);
  CHECK_THROWS_AS(ReactionNetwork(ab, {Reaction{{{1, 0}}, {{1, 0}}, 1.0}}), NetworkError);
  CHECK_THROWS_AS(ReactionNetwork({{0, "A"}, {1, "A"}}, {Reaction{{{0, 0}}, {{1, 0}}, 1.0}}), NetworkError);
}

TEST_CASE("propensity examples") {
  const ReactionNetwork net = fixtures::model12();
  CHECK(propensity(net, 1, State{5, 2}) == 10.0);
  CHECK(propensity(net, 3, State{0, 1}) == 0.0);
  CHECK(propensity(net, 3, State{0, 2}) == 2.0);
  CHECK(propensity(net, 0, State{0, 0}) == 1.0);
  CHECK(propensity(net, 0, State{37, 4}) == 1.0);
}

TEST_CASE("total rate examples") {
  const ReactionNetwork net = fixtures::model12();
  CHECK(total_rate(net, State{10, 0}) == 1.0);
  CHECK(total_rate(net, State{11, 1}) == 13.0);
  CHECK(total_rate(parse_network("A -> 0 @ 1"), State{0}) == 0.0);
}

TEST_CASE("embedded step distribution examples") {
  const ReactionNetwork net = fixtures::model12();
  const StepDistribution at_axis = embedded_step_distribution(net, State{10, 0});
  REQUIRE(at_axis.entries.size() == 1);
  CHECK(at_axis.entries[0].next == State{11, 1});
  CHECK(at_axis.entries[0].probability == 1.0);

  const StepDistribution up = embedded_step_distribution(net, State{11, 1});
  REQUIRE(up.entries.size() == 3);
  CHECK(up.total_rate == 13.0);
  CHECK(up.entries[0].next == State{12, 2});
  CHECK(up.entries[0].probability == doctest::Approx(1.0 / 13));
  CHECK(up.entries[1].next == State{10, 0});
  CHECK(up.entries[1].probability == doctest::Approx(11.0 / 13));
  CHECK(up.entries[2].next == State{11, 2});
  CHECK(up.entries[2].probability == doctest::Approx(1.0 / 13));

  const StepDistribution dead = embedded_step_distribution(parse_network("A -> 0 @ 1"), State{0});
  CHECK(dead.absorbing());
  CHECK(dead.total_rate == 0.0);
}

TEST_CASE("propensity vanishes exactly where a reactant coefficient exceeds the state") {
  for (const ReactionNetwork& net : fixture_networks()) {
    for (Count a = 0; a < 6; ++a) {
      for (Count b = 0; b < 6; ++b) {
        const State x{a, b};
        for (std::size_t r = 0; r < net.reaction_count(); ++r) {
          const Reaction& rx = net.reactions()[r];
          const bool short_of = a < rx.reactant.coefficients[0] || b < rx.reactant.coefficients[1];
          const double expected =
              rx.rate_constant * falling(a, rx.reactant.coefficients[0]) * falling(b, rx.reactant.coefficients[1]);
          CHECK((propensity(net, r, x) == 0.0) == short_of);
          CHECK(propensity(net, r, x) == doctest::Approx(expected));
        }
      }
    }
  }
}

TEST_CASE("embedded probabilities normalize") {
  for (const ReactionNetwork& net : fixture_networks()) {
    for (Count a = 0; a < 30; ++a) {
      for (Count b = 0; b < 30; ++b) {
        const StepDistribution d = embedded_step_distribution(net, State{a, b});
        if (d.total_rate == 0.0) continue;
        double sum = 0.0;
        for (const auto& e : d.entries) sum += e.probability;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("apply_reaction") {
  const ReactionNetwork net = fixtures::model12();
  CHECK(apply_reaction(State{10, 0}, net.reactions()[0]) == State{11, 1});
  CHECK(apply_reaction(State{11, 1}, net.reactions()[1]) == State{10, 0});
  CHECK_THROWS_AS(apply_reaction(State{0, 0}, net.reactions()[1]), NegativeStateError);
  CHECK_THROWS_AS(State({1, -1}), NegativeStateError);
}

TEST_CASE("embedded sampling never leaves the orthant") {
  for (const ReactionNetwork& net : fixture_networks()) {
    Stream rng(99, 0);
    State x{3, 0};
    for (int step = 0; step < 200000; ++step) {
      const StepDistribution d = embedded_step_distribution(net, x);
      REQUIRE_FALSE(d.absorbing());
      double u = rng.uniform();
      std::size_t k = 0;
      while (k + 1 < d.entries.size() && u >= d.entries[k].probability) u -= d.entries[k++].probability;
      x = apply_reaction(x, net.reactions()[d.entries[k].reaction]);
    }
    CHECK(x.size() == 2);
  }
}
