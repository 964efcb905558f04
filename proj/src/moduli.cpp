#include "cfocrt/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfocrt/errors.hpp"

namespace cfocrt {

namespace {

std::int64_t euclid_mod(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

ModuliSet build_moduli_set(std::span<const std::int64_t> gammas,
                           std::int64_t m_scale) {
  if (gammas.size() < 2) {
    throw std::invalid_argument("moduli set needs at least two ranges");
  }
  if (m_scale < 2) {
    throw std::invalid_argument("common-remainder scale must be at least 2");
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 2) {
      throw std::invalid_argument("range " + std::to_string(gammas[i]) +
                                  " is smaller than 2");
    }
    if (i > 0 && gammas[i] <= gammas[i - 1]) {
      throw std::invalid_argument("ranges must be strictly ascending");
    }
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    for (std::size_t j = i + 1; j < gammas.size(); ++j) {
      const std::int64_t g = std::gcd(gammas[i], gammas[j]);
      if (g != 1) {
        throw std::invalid_argument(
            "ranges " + std::to_string(gammas[i]) + " and " +
            std::to_string(gammas[j]) + " share factor " + std::to_string(g));
      }
    }
  }

  ModuliSet ms;
  ms.gammas.assign(gammas.begin(), gammas.end());
  ms.m_scale = m_scale;
  ms.gamma_prod = 1;
  const std::int64_t limit = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t g : ms.gammas) {
    if (ms.gamma_prod > limit / g) {
      throw std::invalid_argument("range product overflows 64-bit arithmetic");
    }
    ms.gamma_prod *= g;
  }
  ms.sample_intervals.reserve(ms.size());
  ms.inverses.reserve(ms.size());
  ms.scaled_moduli.reserve(ms.size());
  for (std::int64_t g : ms.gammas) {
    const std::int64_t interval = ms.gamma_prod / g;
    ms.sample_intervals.push_back(interval);
    ms.inverses.push_back(mod_inverse(interval % g, g));
    ms.scaled_moduli.push_back(m_scale * g);
  }
  return ms;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t n) {
  if (n < 2) {
    throw std::invalid_argument("modulus must be at least 2");
  }
  a = euclid_mod(a, n);
  if (std::gcd(a, n) != 1) {
    throw std::invalid_argument("no inverse: " + std::to_string(a) + " and " +
                                std::to_string(n) + " are not co-prime");
  }
  // extended Euclid on (a, n), tracking only the coefficient of a
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = n, new_r = a;
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  return euclid_mod(t, n);
}

double positive_mod(double v, double m) {
  if (!(m > 0.0)) {
    throw std::invalid_argument("modulus must be positive");
  }
  double r = std::fmod(v, m);
  if (r < 0.0) r += m;
  if (r >= m) r -= m;
  return r + 0.0;
}

double circular_distance(double a, double x, double m) {
  if (!(m > 0.0)) {
    throw std::invalid_argument("modulus must be positive");
  }
  const double d = a - x;
  return d - std::round(d / m) * m;
}

std::vector<double> mle_weights(std::span<const double> variances) {
  if (variances.empty()) {
    throw std::invalid_argument("no variances given");
  }
  std::vector<double> w(variances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    if (!(variances[i] > 0.0) || !std::isfinite(variances[i])) {
      throw std::invalid_argument("variances must be positive and finite");
    }
    w[i] = 1.0 / variances[i];
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

std::vector<double> candidate_set(std::span<const double> common_remainders,
                                  std::span<const double> weights,
                                  double modulus) {
  const std::size_t k = common_remainders.size();
  if (k == 0 || weights.size() != k) {
    throw std::invalid_argument("remainders and weights must match and be non-empty");
  }
  if (!(modulus > 0.0)) {
    throw std::invalid_argument("modulus must be positive");
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-6) {
    throw std::invalid_argument("weights must sum to 1");
  }

  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return common_remainders[a] < common_remainders[b];
  });

  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mean += weights[i] * common_remainders[i];
  }

  std::vector<double> cands;
  cands.reserve(k);
  double prefix = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    prefix += weights[order[t]];
    cands.push_back(positive_mod(mean + modulus * prefix, modulus));
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

namespace {

double weighted_objective(std::span<const double> remainders,
                          std::span<const double> weights, double x,
                          double modulus) {
  double obj = 0.0;
  for (std::size_t i = 0; i < remainders.size(); ++i) {
    const double d = circular_distance(remainders[i], x, modulus);
    obj += weights[i] * d * d;
  }
  return obj;
}

}  // namespace

CommonRemainderSolution solve_common_remainder(std::span<const double> values,
                                               std::span<const double> variances,
                                               double modulus) {
  if (values.size() != variances.size() || values.empty()) {
    throw std::invalid_argument("values and variances must match and be non-empty");
  }
  std::vector<double> rc(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rc[i] = positive_mod(values[i], modulus);
  }
  const std::vector<double> w = mle_weights(variances);

  CommonRemainderSolution sol;
  sol.candidates = candidate_set(rc, w, modulus);
  sol.r_hat = sol.candidates.front();
  sol.objective = weighted_objective(rc, w, sol.r_hat, modulus);
  // candidates are ascending; strict comparison keeps the smallest on ties
  for (std::size_t c = 1; c < sol.candidates.size(); ++c) {
    const double obj = weighted_objective(rc, w, sol.candidates[c], modulus);
    if (obj < sol.objective) {
      sol.objective = obj;
      sol.r_hat = sol.candidates[c];
    }
  }
  return sol;
}

CommonRemainderSolution solve_common_remainder(const RemainderObservation& obs,
                                               const ModuliSet& mset) {
  if (obs.values.size() != mset.size()) {
    throw std::invalid_argument("observation size does not match moduli set");
  }
  return solve_common_remainder(obs.values, obs.variances,
                                static_cast<double>(mset.m_scale));
}

double grid_search_common_remainder(std::span<const double> common_remainders,
                                    std::span<const double> weights,
                                    double modulus, double step) {
  if (!(modulus > 0.0)) {
    throw std::invalid_argument("modulus must be positive");
  }
  if (!(step > 0.0) || step > modulus / 10.0) {
    throw std::invalid_argument("search step must lie in (0, modulus/10]");
  }
  if (!weights.empty() && weights.size() != common_remainders.size()) {
    throw std::invalid_argument("weights must be empty or match remainders");
  }
  double best_x = 0.0;
  double best_obj = std::numeric_limits<double>::infinity();
  const auto n_steps = static_cast<std::size_t>(std::ceil(modulus / step));
  for (std::size_t j = 0; j < n_steps; ++j) {
    const double x = static_cast<double>(j) * step;
    if (x >= modulus) break;
    double obj = 0.0;
    for (std::size_t i = 0; i < common_remainders.size(); ++i) {
      const double d = circular_distance(common_remainders[i], x, modulus);
      obj += (weights.empty() ? 1.0 : weights[i]) * d * d;
    }
    if (obj < best_obj) {
      best_obj = obj;
      best_x = x;
    }
  }
  return best_x;
}

double solve_common_remainder_search(const RemainderObservation& obs,
                                     const ModuliSet& mset, double step) {
  if (obs.values.size() != mset.size()) {
    throw std::invalid_argument("observation size does not match moduli set");
  }
  const double m = static_cast<double>(mset.m_scale);
  std::vector<double> rc(obs.values.size());
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    rc[i] = positive_mod(obs.values[i], m);
  }
  return grid_search_common_remainder(rc, {}, m, step);
}

double reconstruct_with_common(const RemainderObservation& obs,
                               const ModuliSet& mset, double r_common) {
  const std::size_t k = mset.size();
  if (obs.values.size() != k) {
    throw std::invalid_argument("observation size does not match moduli set");
  }
  const double m = static_cast<double>(mset.m_scale);
  const std::int64_t gamma = mset.gamma_prod;
  __int128 acc = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double q = std::round((obs.values[i] - r_common) / m);
    const auto qi = static_cast<std::int64_t>(q);
    const std::int64_t base =
        (mset.inverses[i] * mset.sample_intervals[i]) % gamma;
    acc += static_cast<__int128>(base) * (qi % gamma);
    acc %= gamma;
  }
  auto folds = static_cast<std::int64_t>(acc);
  if (folds < 0) folds += gamma;
  return positive_mod(m * static_cast<double>(folds) + r_common,
                      mset.wide_modulus());
}

double reconstruct_mle(const RemainderObservation& obs, const ModuliSet& mset) {
  const CommonRemainderSolution sol = solve_common_remainder(obs, mset);
  return reconstruct_with_common(obs, mset, sol.r_hat);
}

double reconstruct_classic(const RemainderObservation& obs,
                           const ModuliSet& mset) {
  const std::size_t k = mset.size();
  if (obs.values.size() != k) {
    throw std::invalid_argument("observation size does not match moduli set");
  }
  const std::int64_t m = mset.m_scale;
  const std::int64_t gamma = mset.gamma_prod;
  __int128 acc = 0;
  std::int64_t common_int = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t rounded =
        euclid_mod(std::llround(obs.values[i]), mset.scaled_moduli[i]);
    const std::int64_t qi = rounded / m;
    if (i == 0) common_int = rounded % m;
    const std::int64_t base =
        (mset.inverses[i] * mset.sample_intervals[i]) % gamma;
    acc += static_cast<__int128>(base) * qi;
    acc %= gamma;
  }
  auto folds = static_cast<std::int64_t>(acc);
  if (folds < 0) folds += gamma;
  const double frac = obs.values[0] - std::round(obs.values[0]);
  return positive_mod(static_cast<double>(m) * static_cast<double>(folds) +
                          static_cast<double>(common_int) + frac,
                      mset.wide_modulus());
}

}  // namespace cfocrt
