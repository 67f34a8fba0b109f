#pragma once

#include <string>

#include "slowmix/dsl.hpp"
#include "slowmix/structure.hpp"

namespace fixtures {

inline std::string data(const std::string& name) { return std::string(SLOWMIX_TEST_DATA) + "/" + name; }

/// 0 <-> A + B, B <-> 2B, all rates 1. Reactions: 0 = 0->A+B, 1 = A+B->0, 2 = B->2B, 3 = 2B->B.
inline slowmix::ReactionNetwork model12() { return slowmix::parse_network("0 <-> A + B @ 1, 1\nB <-> 2 B @ 1, 1"); }

/// 0 -> a A + B -> (2a-1) A + 2B -> 0 with unit rates.
inline slowmix::CyclicSpec example32(slowmix::Count a) {
  return slowmix::make_cyclic_spec({0, a, 2 * a - 1}, {0, 1, 2}, {1.0, 1.0, 1.0});
}

}  // namespace fixtures
