#pragma once

#include <cmath>
#include <cstdint>

namespace cfocrt::rng {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64 step (Steele/Lea/Flood mixing constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based sub-stream derivation: the stream obtained for (seed, key)
// depends only on the pair, never on how many draws any other stream made.
// Key order matters: derive(derive(s,a),b) != derive(derive(s,b),a).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ull * (key + 1);
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k1,
                                 std::uint64_t k2) {
  return derive_seed(derive_seed(seed, k1), k2);
}

// Stream tags used when splitting a trial seed.
inline constexpr std::uint64_t kNoiseTag = 0x6E6F6973ull;  // noise draws
inline constexpr std::uint64_t kCfoTag = 0x63666Full;      // per-trial CFO draw

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform on [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1]
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // pair of independent standard normals (Box-Muller)
  void next_gaussian_pair(double& z0, double& z1) {
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(kTwoPi * u2);
    z1 = r * std::sin(kTwoPi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace cfocrt::rng
