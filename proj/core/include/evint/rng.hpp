#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace evint {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A generator is identified by a 64-bit key (the seed) and a 64-bit stream
/// id; the remaining 64 counter bits index blocks of four outputs. Two
/// generators with distinct (seed, stream) pairs produce independent
/// sequences, and no generator state is shared between streams, so work can
/// be scheduled on any thread without changing results.
class Philox4x32
{
public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32() noexcept
    : Philox4x32(0, 0)
  {}
  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  void discard(unsigned long long z) noexcept;

  /// The raw ten-round bijection.
  static Block encrypt(Block counter, Key key) noexcept;

  friend bool operator==(const Philox4x32&, const Philox4x32&) = default;

private:
  void refill() noexcept;

  Key key_{};
  Block counter_{};
  Block buffer_{};
  unsigned position_ = 4;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t
mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a labelled sub-task. Used to build seed hierarchies
/// (run -> trial -> replicate) that do not depend on scheduling.
constexpr std::uint64_t
derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept
{
  return mix64(parent ^ mix64(tag ^ 0x5851f42d4c957f2dULL));
}

constexpr std::uint64_t
derive_seed(std::uint64_t parent, std::uint64_t tag_a, std::uint64_t tag_b) noexcept
{
  return derive_seed(derive_seed(parent, tag_a), tag_b);
}

} // namespace evint
