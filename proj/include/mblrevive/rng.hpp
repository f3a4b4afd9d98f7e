#pragma once

#include <cstdint>
#include <string_view>

namespace mblrevive::rng {

/// Identifier of the field generator. Bump when the mapping from
/// (seed, index) to values changes; it is written into every disorder file.
inline constexpr std::string_view generator_name = "splitmix64-counter-v1";

/// SplitMix64 output finalizer (Steele, Lea, Flood 2014).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// The index-th output of a SplitMix64 stream seeded with `seed`. Random
/// access, so value i does not depend on how many values are drawn.
[[nodiscard]] constexpr std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed + (index + 1U) * 0x9e3779b97f4a7c15ULL);
}

/// Uniform double in [0, 1) from the top 53 bits.
[[nodiscard]] constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11U) * 0x1.0p-53;
}

/// Sequential generator for tests and random product states. Same stream as
/// counter_u64, consumed in order.
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : seed_(seed) {}
    constexpr std::uint64_t next() noexcept { return counter_u64(seed_, count_++); }
    constexpr double uniform() noexcept { return to_unit(next()); }
    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;

  private:
    std::uint64_t seed_;
    std::uint64_t count_ = 0;
};

} // namespace mblrevive::rng
