#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scpg {

// One splitmix64 step; also used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministically derives a sub-seed for a named stream (population index,
// eval-point stream, ...) so components never share or race on one generator.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull);
  splitmix64(s);
  return splitmix64(s);
}

// Seeded generator with explicit sampling formulas. mt19937_64 output is
// specified by the standard and the transforms below are plain arithmetic,
// so sequences are reproducible across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace scpg
