#include "evint/rng.hpp"

namespace evint {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void
mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
  : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
  , counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)}
{}

Philox4x32::Block
Philox4x32::encrypt(Block c, Key k) noexcept
{
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

void
Philox4x32::refill() noexcept
{
  buffer_ = encrypt(counter_, key_);
  if (++counter_[0] == 0) {
    ++counter_[1];
  }
  position_ = 0;
}

Philox4x32::result_type
Philox4x32::operator()() noexcept
{
  if (position_ == 4) {
    refill();
  }
  return buffer_[position_++];
}

double
Philox4x32::uniform() noexcept
{
  const std::uint64_t hi = (*this)() >> 5; // 27 bits
  const std::uint64_t lo = (*this)() >> 6; // 26 bits
  return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

void
Philox4x32::discard(unsigned long long z) noexcept
{
  while (z > 0 && position_ < 4) {
    ++position_;
    --z;
  }
  if (z == 0) {
    return;
  }
  // Skip whole blocks, then land inside the next one.
  std::uint64_t blocks = z / 4;
  const unsigned rest = static_cast<unsigned>(z % 4);
  std::uint64_t ctr =
    (static_cast<std::uint64_t>(counter_[1]) << 32 | counter_[0]) + blocks;
  counter_[0] = static_cast<std::uint32_t>(ctr);
  counter_[1] = static_cast<std::uint32_t>(ctr >> 32);
  position_ = 4;
  if (rest > 0) {
    refill();
    position_ = rest;
  }
}

} // namespace evint
