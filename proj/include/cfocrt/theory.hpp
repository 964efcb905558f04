#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfocrt/moduli.hpp"

namespace cfocrt {

// Per-interval error variance of the wide-range remainder estimates:
// (M*Gamma)^2 / (4 pi^2 L_i^3 * snr).
std::vector<double> variance_model(const ModuliSet& mset, double snr_linear);

// Variance floor of the combined wide-range estimate: (sum 1/sigma_i^2)^-1.
double delta_mse_m(const ModuliSet& mset, double snr_linear);

// Variance floor in subcarrier units: N^2 / (4 pi^2 * snr * sum L_i^3).
// Independent of the common-remainder scale M.
double delta_mse(const ModuliSet& mset, std::int64_t n_fft, double snr_linear);

// Split penalty of a subset S of the intervals (l_cubes holds L_i^3):
// 1/sum_{i in S} + 1/sum_{i not in S}; empty or full S degenerates to
// 1/sum_all.
double xi_psi_subset(std::span<const double> l_cubes, std::uint32_t subset_mask);

// Maximum of xi_psi_subset over all subsets: 1/min + 1/(total - min).
double xi_psi_max(std::span<const double> l_cubes);
double xi_psi_max(const ModuliSet& mset);

// Gaussian tail probability and its inverse on p in (0, 0.5].
double q_function(double t);
double q_inverse(double p);

struct PerformanceModel {
  ModuliSet mset;
  std::int64_t n_fft = 0;
  double snr_linear = 0.0;
  std::vector<double> sigma_sq;
  std::vector<double> weights;
  double delta_mse_m = 0.0;
  double delta_mse = 0.0;
  double xi_star = 0.0;
  double sigma_l = 0.0;  // sum of L_i^3
};

PerformanceModel performance_model(const ModuliSet& mset, std::int64_t n_fft,
                                   double snr_linear);

struct ThresholdQuery {
  double delta = 0.0;
  double x_delta = 0.0;       // solves 2 Q(x) = delta
  double eta_th_linear = 0.0; // Gamma^2 x^2 xi_star / pi^2
  double eta_th_db = 0.0;
};

// SNR above which the combined estimator stays inside the no-fold-error
// regime with probability at least 1 - delta. Requires delta in (0, 0.5).
ThresholdQuery snr_threshold(const ModuliSet& mset, double delta);

// Coarse closed form for Gamma^2 * xi_star: gamma_K^2 / (gamma_1...gamma_{K-1}).
// Always an underestimate; tight when the smallest interval cube is far
// below the sum of the others.
double approx_gamma_xi(const ModuliSet& mset);

struct ConfigCandidate {
  ModuliSet mset;
  PerformanceModel model;   // evaluated at the candidate's threshold SNR
  ThresholdQuery threshold; // at delta = 1e-6
  bool pareto_optimal = false;
};

// Enumerates ascending pairwise-co-prime range tuples for each requested K
// with the largest sample interval below n_fft, ranked by sum L_i^3
// descending. Both the MSE proxy and the SNR threshold are reported; a
// candidate is flagged Pareto-optimal when no enumerated tuple beats it on
// both. Returns at most max_results entries; empty when nothing is feasible.
std::vector<ConfigCandidate> config_search(std::int64_t n_fft,
                                           std::span<const int> k_targets,
                                           std::size_t max_results = 256);

}  // namespace cfocrt
