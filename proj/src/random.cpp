#include "lookahead/random.hpp"

#include <cmath>

namespace lookahead {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      counter_{0u, 0u, std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

void CounterRng::refill() {
  std::array<std::uint32_t, 4> c = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  block_ = c;
  used_ = 0;
  if (++counter_[0] == 0) ++counter_[1];
}

CounterRng::result_type CounterRng::operator()() {
  if (used_ == 4) refill();
  return block_[used_++];
}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t hi = (*this)();
  return (hi << 32) | (*this)();
}

double CounterRng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::uniform_int(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  std::uint64_t x;
  do x = next_u64();
  while (x >= limit);
  return x % n;
}

double CounterRng::exponential() { return -std::log1p(-uniform()); }

}  // namespace lookahead
