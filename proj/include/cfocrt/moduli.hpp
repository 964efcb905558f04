#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cfocrt {

// Co-prime range system and the constants derived from it.
// sample_intervals[i] * gammas[i] == gamma_prod for every i, and
// inverses[i] * sample_intervals[i] == 1 (mod gammas[i]).
struct ModuliSet {
  std::vector<std::int64_t> gammas;            // ascending, pairwise co-prime
  std::int64_t m_scale = 0;                    // common-remainder modulus M
  std::int64_t gamma_prod = 0;                 // product of all gammas
  std::vector<std::int64_t> sample_intervals;  // gamma_prod / gammas[i], descending
  std::vector<std::int64_t> inverses;          // inverse of sample interval mod gammas[i]
  std::vector<std::int64_t> scaled_moduli;     // m_scale * gammas[i]

  std::size_t size() const { return gammas.size(); }

  // full reconstruction range M * gamma_prod
  double wide_modulus() const {
    return static_cast<double>(m_scale) * static_cast<double>(gamma_prod);
  }
};

ModuliSet build_moduli_set(std::span<const std::int64_t> gammas,
                           std::int64_t m_scale);

// b in [1, n) with (a * b) % n == 1; requires gcd(a, n) == 1 and n >= 2
std::int64_t mod_inverse(std::int64_t a, std::int64_t n);

// representative of v modulo m in [0, m)
double positive_mod(double v, double m);

// signed distance a - x on a circle of circumference m, in [-m/2, m/2];
// the fold count is rounded half away from zero
double circular_distance(double a, double x, double m);

// inverse-variance weights normalized to sum 1
std::vector<double> mle_weights(std::span<const double> variances);

// Noisy remainders of one unknown real, one per scaled modulus of a
// ModuliSet: values[i] estimates the remainder modulo m_scale * gammas[i].
struct RemainderObservation {
  std::vector<double> values;
  std::vector<double> variances;
};

struct CommonRemainderSolution {
  double r_hat = 0.0;              // optimal common remainder in [0, M)
  std::vector<double> candidates;  // candidate set, ascending, deduplicated
  double objective = 0.0;          // weighted squared circular distance at r_hat
};

// Candidate common remainders: the weighted mean of the remainders plus M
// times each prefix sum of the weights taken in ascending-remainder order,
// reduced into [0, M). The minimizer of the weighted circular objective is
// always among them.
std::vector<double> candidate_set(std::span<const double> common_remainders,
                                  std::span<const double> weights,
                                  double modulus);

CommonRemainderSolution solve_common_remainder(std::span<const double> values,
                                               std::span<const double> variances,
                                               double modulus);
CommonRemainderSolution solve_common_remainder(const RemainderObservation& obs,
                                               const ModuliSet& mset);

// Grid minimizer of the common-remainder objective over {0, step, 2*step, ...}
// within [0, modulus). An empty weights span selects the unweighted objective.
// Ties resolve to the smallest grid point.
double grid_search_common_remainder(std::span<const double> common_remainders,
                                    std::span<const double> weights,
                                    double modulus, double step);

// Unweighted search used by the closed-form baseline; step in (0, M/10].
double solve_common_remainder_search(const RemainderObservation& obs,
                                     const ModuliSet& mset, double step);

// Reconstruction of the wide-range value from the observation and a given
// common remainder: fold counts are recovered per interval, combined through
// the co-prime system, and the common remainder re-attached. Result in
// [0, M * gamma_prod).
double reconstruct_with_common(const RemainderObservation& obs,
                               const ModuliSet& mset, double r_common);

// Reconstruction with the MLE common remainder.
double reconstruct_mle(const RemainderObservation& obs, const ModuliSet& mset);

// Baseline reconstruction: every remainder is rounded to an integer, the
// integer part is recovered by integer CRT over the scaled moduli, and the
// fractional part is taken from the largest sample interval. When rounding
// noise makes the integer residues inconsistent, the common integer
// remainder of the largest interval is trusted.
double reconstruct_classic(const RemainderObservation& obs,
                           const ModuliSet& mset);

}  // namespace cfocrt
