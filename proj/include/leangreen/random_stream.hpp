#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace leangreen {

namespace detail {

// SplitMix64 finaliser; used to derive well-separated sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Per-replication random source.
///
/// Each replication draws from its own xoshiro256** sub-stream: the root
/// state is seeded from `base_seed`, then advanced by `replication_index`
/// applications of the 2^128 jump polynomial, so sub-streams never overlap.
/// The generator and all variate transforms are implemented here rather than
/// taken from <random> because the standard distributions are not
/// reproducible across library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t base_seed, std::uint64_t replication_index)
      : base_seed_(base_seed), replication_index_(replication_index) {
    std::uint64_t s = base_seed;
    for (auto& word : state_) {
      s = detail::splitmix64(s);
      word = s;
    }
    for (std::uint64_t i = 0; i < replication_index; ++i) jump();
  }

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t replication_index() const { return replication_index_; }
  std::uint64_t draw_count() const { return draw_count_; }

  std::uint64_t next_u64() {
    ++draw_count_;
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe for logarithms.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Standard normal via Box-Muller; the second variate is discarded so the
  // draw count stays a simple function of the number of samples.
  double standard_normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  void jump() {
    static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                              0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b)) {
          s0 ^= state_[0];
          s1 ^= state_[1];
          s2 ^= state_[2];
          s3 ^= state_[3];
        }
        next_raw();
      }
    }
    state_[0] = s0;
    state_[1] = s1;
    state_[2] = s2;
    state_[3] = s3;
  }

  void next_raw() {
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
  }

  std::uint64_t base_seed_;
  std::uint64_t replication_index_;
  std::uint64_t draw_count_ = 0;
  std::uint64_t state_[4]{};
};

}  // namespace leangreen
