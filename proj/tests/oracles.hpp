// Test-side reference implementations, written independently of the library
// code they cross-check: plain exhaustive scans and brute-force enumerations.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

// signed wrap of d onto [-m/2, m/2] by explicit fold counting
inline double circ(double d, double m) {
  double k = std::floor(d / m + 0.5);
  // floor(x + 0.5) rounds halves up; nudge to half-away-from-zero
  if (d / m + 0.5 == k && d < 0.0) k = -std::floor(-d / m + 0.5);
  return d - k * m;
}

// exhaustive weighted grid scan of the circular least-squares objective
struct GridScan {
  double argmin = 0.0;
  double objective = 0.0;
};

inline GridScan grid_scan(const std::vector<double>& remainders,
                          const std::vector<double>& weights, double modulus,
                          double step) {
  GridScan best;
  best.objective = 1e300;
  for (double x = 0.0; x < modulus; x += step) {
    double obj = 0.0;
    for (std::size_t i = 0; i < remainders.size(); ++i) {
      const double d = circ(remainders[i] - x, modulus);
      obj += weights[i] * d * d;
    }
    if (obj < best.objective) {
      best.objective = obj;
      best.argmin = x;
    }
  }
  return best;
}

// Brute-force maximum of the subset split penalty over all 2^K subsets.
// Both side sums are accumulated directly; deriving one side as
// total - other cancels catastrophically when one element is tiny.
inline double split_penalty_max(const std::vector<double>& cubes) {
  const std::size_t k = cubes.size();
  double total = 0.0;
  for (double c : cubes) total += c;
  double best = 1.0 / total;  // empty / full split
  for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
    double in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        in += cubes[i];
      } else {
        out += cubes[i];
      }
    }
    const double v = 1.0 / in + 1.0 / out;
    if (v > best) best = v;
  }
  return best;
}

// integer CRT by scanning the full range; moduli need not be co-prime.
// Returns -1 when no integer satisfies every congruence.
inline std::int64_t crt_scan(const std::vector<std::int64_t>& residues,
                             const std::vector<std::int64_t>& moduli,
                             std::int64_t range) {
  for (std::int64_t x = 0; x < range; ++x) {
    bool ok = true;
    for (std::size_t i = 0; i < residues.size(); ++i) {
      if (x % moduli[i] != residues[i]) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
  }
  return -1;
}

// cyclic autocorrelation magnitude of a sequence at a given lag
inline double cyclic_autocorr_mag(const std::vector<std::complex<double>>& s,
                                  std::size_t lag) {
  std::complex<double> acc = 0.0;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::conj(s[i]) * s[(i + lag) % n];
  }
  return std::abs(acc);
}

}  // namespace oracle
