#pragma once

#include <array>
#include <cstdint>

namespace lookahead {

/**
 * Philox4x32-10 counter-based generator. The key is the seed and the high
 * half of the counter is the stream (e.g. episode) index, so every stream is
 * reproducible on its own regardless of how work is split across threads.
 */
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()();

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n - 1}, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);
  /// Exponential with rate 1.
  double exponential();
  /// Index drawn from a probability row.
  template <typename Row>
  int categorical(const Row& p) {
    const double u = uniform();
    double acc = 0.0;
    int last = -1;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
      if (p[i] <= 0.0) continue;
      acc += p[i];
      last = i;
      if (u < acc) return i;
    }
    return last < 0 ? 0 : last;
  }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace lookahead
