#include "cfocrt/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cfocrt/errors.hpp"

namespace cfocrt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

double sum_interval_cubes(const ModuliSet& mset) {
  double s = 0.0;
  for (std::int64_t interval : mset.sample_intervals) {
    const double l = static_cast<double>(interval);
    s += l * l * l;
  }
  return s;
}

}  // namespace

std::vector<double> variance_model(const ModuliSet& mset, double snr_linear) {
  if (!(snr_linear > 0.0)) {
    throw std::invalid_argument("SNR must be positive");
  }
  const double wide = mset.wide_modulus();
  std::vector<double> out(mset.size());
  for (std::size_t i = 0; i < mset.size(); ++i) {
    const double l = static_cast<double>(mset.sample_intervals[i]);
    out[i] = wide * wide / (kFourPiSq * l * l * l * snr_linear);
  }
  return out;
}

double delta_mse_m(const ModuliSet& mset, double snr_linear) {
  const std::vector<double> sigma_sq = variance_model(mset, snr_linear);
  double inv_sum = 0.0;
  for (double v : sigma_sq) inv_sum += 1.0 / v;
  return 1.0 / inv_sum;
}

double delta_mse(const ModuliSet& mset, std::int64_t n_fft, double snr_linear) {
  if (n_fft < 2) {
    throw std::invalid_argument("DFT size must be at least 2");
  }
  if (!(snr_linear > 0.0)) {
    throw std::invalid_argument("SNR must be positive");
  }
  const double n = static_cast<double>(n_fft);
  return n * n / (kFourPiSq * snr_linear * sum_interval_cubes(mset));
}

double xi_psi_subset(std::span<const double> l_cubes,
                     std::uint32_t subset_mask) {
  const std::size_t k = l_cubes.size();
  if (k < 2 || k > 30) {
    throw std::invalid_argument("subset penalty needs 2..30 intervals");
  }
  const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1u);
  subset_mask &= full;
  double in = 0.0, out = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (subset_mask & (1u << i)) {
      in += l_cubes[i];
    } else {
      out += l_cubes[i];
    }
  }
  if (subset_mask == 0 || subset_mask == full) {
    return 1.0 / (in + out);
  }
  return 1.0 / in + 1.0 / out;
}

double xi_psi_max(std::span<const double> l_cubes) {
  if (l_cubes.size() < 2) {
    throw std::invalid_argument("need at least two intervals");
  }
  double smallest = l_cubes[0];
  double total = 0.0;
  for (double c : l_cubes) {
    if (!(c > 0.0)) {
      throw std::invalid_argument("interval cubes must be positive");
    }
    smallest = std::min(smallest, c);
    total += c;
  }
  return 1.0 / smallest + 1.0 / (total - smallest);
}

double xi_psi_max(const ModuliSet& mset) {
  std::vector<double> cubes(mset.size());
  for (std::size_t i = 0; i < mset.size(); ++i) {
    const double l = static_cast<double>(mset.sample_intervals[i]);
    cubes[i] = l * l * l;
  }
  return xi_psi_max(cubes);
}

double q_function(double t) {
  return 0.5 * std::erfc(t / std::sqrt(2.0));
}

double q_inverse(double p) {
  if (!(p > 0.0) || p > 0.5 || !std::isfinite(p)) {
    throw std::invalid_argument("tail probability must lie in (0, 0.5]");
  }
  if (p == 0.5) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (q_function(hi) > p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) {
      throw infeasible_error("tail probability too small to invert");
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double q = q_function(mid);
    if (std::abs(q - p) <= 1e-9 * p) return mid;
    if (q > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PerformanceModel performance_model(const ModuliSet& mset, std::int64_t n_fft,
                                   double snr_linear) {
  PerformanceModel pm;
  pm.mset = mset;
  pm.n_fft = n_fft;
  pm.snr_linear = snr_linear;
  pm.sigma_sq = variance_model(mset, snr_linear);
  pm.weights = mle_weights(pm.sigma_sq);
  pm.delta_mse_m = cfocrt::delta_mse_m(mset, snr_linear);
  pm.delta_mse = cfocrt::delta_mse(mset, n_fft, snr_linear);
  pm.xi_star = xi_psi_max(mset);
  pm.sigma_l = sum_interval_cubes(mset);
  return pm;
}

ThresholdQuery snr_threshold(const ModuliSet& mset, double delta) {
  if (!(delta > 0.0) || !(delta < 0.5)) {
    throw std::invalid_argument("delta must lie in (0, 0.5)");
  }
  ThresholdQuery tq;
  tq.delta = delta;
  tq.x_delta = q_inverse(delta / 2.0);
  const double gamma = static_cast<double>(mset.gamma_prod);
  tq.eta_th_linear =
      gamma * gamma * tq.x_delta * tq.x_delta * xi_psi_max(mset) / (kPi * kPi);
  tq.eta_th_db = 10.0 * std::log10(tq.eta_th_linear);
  return tq;
}

double approx_gamma_xi(const ModuliSet& mset) {
  if (mset.size() < 2) {
    throw std::invalid_argument("need at least two ranges");
  }
  double denom = 1.0;
  for (std::size_t i = 0; i + 1 < mset.size(); ++i) {
    denom *= static_cast<double>(mset.gammas[i]);
  }
  const double last = static_cast<double>(mset.gammas.back());
  return last * last / denom;
}

namespace {

struct RankedTuple {
  std::vector<std::int64_t> gammas;
  double sigma_l = 0.0;
  double eta_th_db = 0.0;
  bool pareto = false;
};

void enumerate_tuples(std::int64_t n_fft, int k, std::int64_t next_min,
                      std::int64_t tail_budget,
                      std::vector<std::int64_t>& current,
                      std::vector<RankedTuple>& out, double x_delta) {
  if (static_cast<int>(current.size()) == k) {
    // feasibility: L_1 = prod(gammas[1..]) < n_fft, checked via tail_budget
    ModuliSet ms;
    try {
      ms = build_moduli_set(current, 2);
    } catch (const std::invalid_argument&) {
      return;  // non-co-prime combination
    }
    RankedTuple rt;
    rt.gammas = current;
    for (std::int64_t interval : ms.sample_intervals) {
      const double l = static_cast<double>(interval);
      rt.sigma_l += l * l * l;
    }
    const double gamma = static_cast<double>(ms.gamma_prod);
    const double eta =
        gamma * gamma * x_delta * x_delta * xi_psi_max(ms) / (kPi * kPi);
    rt.eta_th_db = 10.0 * std::log10(eta);
    out.push_back(std::move(rt));
    return;
  }
  const bool first = current.empty();
  for (std::int64_t g = next_min;; ++g) {
    if (!first && g > tail_budget) break;
    if (first && g >= n_fft) break;  // gamma_1 < gamma_2 <= tail budget < N
    bool coprime = true;
    for (std::int64_t prev : current) {
      if (std::gcd(prev, g) != 1) {
        coprime = false;
        break;
      }
    }
    if (!coprime) continue;
    // remaining slots after this one must still fit under the budget
    const int remaining = k - static_cast<int>(current.size()) - 1;
    const std::int64_t new_budget = first ? tail_budget : tail_budget / g;
    if (remaining > 0) {
      // cheapest possible completion uses strictly ascending values
      std::int64_t min_needed = 1;
      bool fits = true;
      std::int64_t v = g + 1;
      for (int r = 0; r < remaining; ++r, ++v) {
        if (min_needed > new_budget / v) {
          fits = false;
          break;
        }
        min_needed *= v;
      }
      if (!fits) {
        if (first) break;  // larger gamma_1 only raises the tail minimum
        break;
      }
    } else if (!first && new_budget < 1) {
      break;
    }
    current.push_back(g);
    enumerate_tuples(n_fft, k, g + 1, new_budget, current, out, x_delta);
    current.pop_back();
  }
}

}  // namespace

std::vector<ConfigCandidate> config_search(std::int64_t n_fft,
                                           std::span<const int> k_targets,
                                           std::size_t max_results) {
  if (n_fft < 8) {
    throw std::invalid_argument("DFT size must be at least 8");
  }
  const double x_delta = q_inverse(0.5e-6);
  std::vector<RankedTuple> tuples;
  for (int k : k_targets) {
    if (k < 2) {
      throw std::invalid_argument("each K must be at least 2");
    }
    std::vector<std::int64_t> current;
    // prod(gammas[1..K]) == L_1 must stay below n_fft
    enumerate_tuples(n_fft, k, 2, n_fft - 1, current, tuples, x_delta);
  }
  if (tuples.empty()) return {};

  std::sort(tuples.begin(), tuples.end(),
            [](const RankedTuple& a, const RankedTuple& b) {
              if (a.sigma_l != b.sigma_l) return a.sigma_l > b.sigma_l;
              if (a.eta_th_db != b.eta_th_db) return a.eta_th_db < b.eta_th_db;
              return a.gammas < b.gammas;
            });

  // skyline over (sigma_l desc, eta_th asc): dominated iff some tuple with
  // strictly larger sigma_l has eta_th <= ours, or an equal-sigma_l tuple
  // has strictly smaller eta_th
  double best_eta_above = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tuples.size();) {
    std::size_t j = i;
    while (j < tuples.size() && tuples[j].sigma_l == tuples[i].sigma_l) ++j;
    const double group_min_eta = tuples[i].eta_th_db;  // sorted asc within group
    for (std::size_t g = i; g < j; ++g) {
      tuples[g].pareto = tuples[g].eta_th_db < best_eta_above &&
                         tuples[g].eta_th_db == group_min_eta;
    }
    best_eta_above = std::min(best_eta_above, group_min_eta);
    i = j;
  }
  if (tuples.size() > max_results) tuples.resize(max_results);

  std::vector<ConfigCandidate> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) {
    ConfigCandidate cand;
    cand.mset = build_moduli_set(t.gammas, 2);
    cand.threshold = snr_threshold(cand.mset, 1e-6);
    cand.model =
        performance_model(cand.mset, n_fft, cand.threshold.eta_th_linear);
    cand.pareto_optimal = t.pareto;
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace cfocrt
