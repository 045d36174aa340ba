#pragma once

#include <cmath>
#include <cstdint>

namespace gemd {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive an independent stream key from a base seed and stream ids.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t s0) noexcept {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (s0 + 1));
}
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t s0,
                                    std::uint64_t s1) noexcept {
  return derive_seed(derive_seed(seed, s0), s1);
}

// Counter-based generator: every draw is a pure function of (key, counter),
// so streams keyed per work item give identical results under any scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed + 0x632be59bd9b4e019ULL)) {}
  CounterRng(std::uint64_t seed, std::uint64_t s0) : CounterRng(derive_seed(seed, s0)) {}
  CounterRng(std::uint64_t seed, std::uint64_t s0, std::uint64_t s1)
      : CounterRng(derive_seed(seed, s0, s1)) {}

  std::uint64_t next_u64() noexcept {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ ^ counter_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n > 0. Lemire multiply-shift.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; draws two uniforms per pair.
  double next_gaussian() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gemd
