#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace slowmix {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based random stream. Stream `index` under `seed` encrypts the
/// counter (block, index) with key `seed`, so streams never overlap and any
/// stream can be regenerated independently of the others.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, index_(index) {}

  std::uint64_t next_u64() noexcept {
    if (cached_ == 0) refill();
    return buffer_[--cached_];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate, by inversion: -log(1 - U) / rate.
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

  std::uint64_t index() const noexcept { return index_; }

 private:
  void refill() noexcept {
    const auto out = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)},
                                key_);
    ++block_;
    buffer_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    cached_ = 2;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cached_ = 0;
};

}  // namespace slowmix
