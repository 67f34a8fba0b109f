#pragma once

#include <string>
#include <string_view>

#include "slowmix/network.hpp"

namespace slowmix {

/// Parses the line-oriented network language:
///
///     # comment
///     0 <-> A + B @ 1, 1
///     B -> 2 B @ 1
///
/// Species are indexed in order of first appearance. A reversible arrow
/// yields two consecutive reactions, forward first. "∅" is accepted as "0".
/// Throws ParseError (with line and column) on malformed input.
ReactionNetwork parse_network(std::string_view text);

/// Reads and parses a network file.
ReactionNetwork load_network(const std::string& path);

/// Canonical text for a network. Consecutive mutually-reverse reactions are
/// folded into one "<->" line; rates use the shortest round-trip decimal.
std::string render_network(const ReactionNetwork& net);

/// Shortest decimal that parses back to exactly `value`.
std::string format_rate(double value);

/// "2 A + B" style text for a complex, "0" when empty.
std::string render_complex(const ReactionNetwork& net, const Complex& c);

}  // namespace slowmix
