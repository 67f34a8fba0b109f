#include <doctest.h>

#include <cmath>
#include <set>

#include "slowmix/random.hpp"

using namespace slowmix;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams replay and do not collide") {
  Stream a(42, 7);
  Stream b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(Stream(42, i).next_u64());
  CHECK(firsts.size() == 1000);
  CHECK(Stream(1, 0).next_u64() != Stream(2, 0).next_u64());
}

TEST_CASE("uniform and exponential moments") {
  Stream s(5, 0);
  const int n = 200000;
  double sum_u = 0.0, sum_e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum_u += u;
    const double e = s.exponential(4.0);
    REQUIRE(e >= 0.0);
    sum_e += e;
  }
  CHECK(std::abs(sum_u / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum_e / n - 0.25) < 4 * 0.25 / std::sqrt(n));
}
