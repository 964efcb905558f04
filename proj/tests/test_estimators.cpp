#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"

#include "cfocrt/estimators.hpp"
#include "cfocrt/montecarlo.hpp"
#include "cfocrt/rng.hpp"
#include "cfocrt/theory.hpp"

using namespace cfocrt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EstimatorConfig standard_config(Method m) {
  EstimatorConfig cfg;
  cfg.spec.n_fft = 64;
  cfg.spec.mset = build_moduli_set(std::vector<std::int64_t>{3, 5, 7}, 2);
  cfg.method = m;
  return cfg;
}

IQBuffer received(const EstimatorConfig& cfg, double eps_n, double snr_db,
                  std::uint64_t seed) {
  const auto wave = build_preamble(cfg.spec);
  return apply_channel(wave, {eps_n, snr_db, 0.0}, cfg.spec,
                       rng::derive_seed(seed, rng::kNoiseTag));
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("method names round-trip") {
  for (Method m : {Method::ccmle, Method::classic_crt, Method::closed_form_crt,
                   Method::moose}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK(!method_from_name("Schmidl").has_value());
}

TEST_CASE("noiseless wide-range recovery") {
  const auto cfg = standard_config(Method::ccmle);
  const auto wave = build_preamble(cfg.spec);
  for (double eps_n : {10.1, -31.9, 0.0, 0.1, 30.1, -0.5, 31.99}) {
    const auto buf = apply_channel(wave, {eps_n, kInf, 0.0}, cfg.spec, 1);
    const auto est = ccmle_estimate(buf, cfg);
    CHECK(est.eps_n == doctest::Approx(eps_n).epsilon(1e-10));
  }
}

TEST_CASE("noiseless grid for every method") {
  const auto wave = build_preamble(standard_config(Method::ccmle).spec);
  const auto run = [&](Method m, double eps_n) {
    const auto cfg = standard_config(m);
    const auto buf = apply_channel(wave, {eps_n, kInf, 0.0}, cfg.spec, 1);
    return estimate(buf, cfg).eps_n;
  };
  for (int j = 0; j < 1000; ++j) {
    const double frac = (static_cast<double>(j) + 0.5) / 1000.0;
    const double full = -32.0 + 64.0 * frac;
    CHECK(std::abs(run(Method::ccmle, full) - full) <= 1e-9);
    CHECK(std::abs(run(Method::classic_crt, full) - full) <= 1e-9);
    // the searched common remainder is quantized to the grid step
    CHECK(std::abs(run(Method::closed_form_crt, full) - full) <= 1e-3);
    const double narrow = (64.0 / 70.0) * (2.0 * frac - 1.0);
    CHECK(std::abs(run(Method::moose, narrow) - narrow) <= 1e-9);
  }
}

TEST_CASE("narrow-range estimator alias behavior") {
  const auto cfg = standard_config(Method::moose);
  const auto wave = build_preamble(cfg.spec);
  const auto run = [&](double eps_n) {
    const auto buf = apply_channel(wave, {eps_n, kInf, 0.0}, cfg.spec, 1);
    return moose_estimate(buf, cfg).eps_n;
  };
  CHECK(run(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(run(0.6) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(run(1.1) == doctest::Approx(1.1 - 64.0 / 35.0).epsilon(1e-9));
}

TEST_CASE("per-interval congruence structure") {
  const auto cfg = standard_config(Method::ccmle);
  const auto wave = build_preamble(cfg.spec);
  const double wide = cfg.spec.mset.wide_modulus();
  std::mt19937 gen(43);
  std::uniform_real_distribution<double> u(-32.0, 32.0);
  for (int it = 0; it < 100; ++it) {
    const double eps_n = u(gen);
    const double eps_m = std::fmod(eps_n * wide / 64.0 + wide, wide);
    const auto buf = apply_channel(wave, {eps_n, kInf, 0.0}, cfg.spec, 1);
    const auto est = ccmle_estimate(buf, cfg);
    REQUIRE(est.per_interval.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const double mk = static_cast<double>(cfg.spec.mset.scaled_moduli[k]);
      CHECK(std::abs(circular_distance(est.per_interval[k].value,
                                       std::fmod(eps_m, mk), mk)) <= 1e-9);
    }
  }
}

TEST_CASE("wide and subcarrier normalizations stay consistent") {
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> u(-32.0, 32.0);
  for (Method m : {Method::ccmle, Method::classic_crt, Method::closed_form_crt,
                   Method::moose}) {
    const auto cfg = standard_config(m);
    const double wide = cfg.spec.mset.wide_modulus();
    for (int it = 0; it < 25; ++it) {
      const auto buf = received(cfg, u(gen), 9.0, static_cast<std::uint64_t>(it));
      const auto est = estimate(buf, cfg);
      CHECK(est.eps_m >= 0.0);
      CHECK(est.eps_m < wide);
      CHECK(est.eps_n ==
            doctest::Approx(wrap_to_symmetric(est.eps_m * 64.0 / wide, 64.0))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("determinism of the full pipeline") {
  for (Method m : {Method::ccmle, Method::classic_crt, Method::closed_form_crt,
                   Method::moose}) {
    const auto cfg = standard_config(m);
    const auto a = estimate(received(cfg, 3.3, 8.0, 1234), cfg);
    const auto b = estimate(received(cfg, 3.3, 8.0, 1234), cfg);
    CHECK(std::memcmp(&a.eps_n, &b.eps_n, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.eps_m, &b.eps_m, sizeof(double)) == 0);
  }
}

TEST_CASE("method tag mismatch is rejected") {
  auto cfg = standard_config(Method::moose);
  const auto buf = received(cfg, 0.1, kInf, 1);
  CHECK_THROWS_AS(ccmle_estimate(buf, cfg), std::invalid_argument);
}

TEST_CASE("combined estimate beats each single interval") {
  const auto cfg = standard_config(Method::ccmle);
  const auto wave = build_preamble(cfg.spec);
  const double snr_db = 12.0;
  const double eps_n = 0.1;
  const double wide = cfg.spec.mset.wide_modulus();
  const double eps_m = eps_n * wide / 64.0;

  const int trials = 100000;
  double mse_combined = 0.0;
  std::vector<double> mse_single(3, 0.0);
  IQBuffer buf;
  for (int t = 0; t < trials; ++t) {
    apply_channel_into(buf, wave, {eps_n, snr_db, 0.0}, cfg.spec,
                       rng::derive_seed(7, static_cast<std::uint64_t>(t)));
    const auto est = ccmle_estimate(buf, cfg);
    const double err = est.eps_n - eps_n;
    mse_combined += err * err;
    for (std::size_t k = 0; k < 3; ++k) {
      const double mk = static_cast<double>(cfg.spec.mset.scaled_moduli[k]);
      const double ek = circular_distance(est.per_interval[k].value,
                                          std::fmod(eps_m, mk), mk) *
                        64.0 / wide;
      mse_single[k] += ek * ek;
    }
  }
  mse_combined /= trials;
  for (std::size_t k = 0; k < 3; ++k) {
    mse_single[k] /= trials;
    CHECK(mse_combined <= 1.2 * mse_single[k]);
  }
}

TEST_CASE("fixed-offset accuracy reaches the variance floor") {
  const auto cfg = standard_config(Method::ccmle);
  const auto wave = build_preamble(cfg.spec);
  const double snr_db = 10.0;
  const double eps_n = 0.1;
  const double floor =
      delta_mse(cfg.spec.mset, 64, std::pow(10.0, snr_db / 10.0));

  const int trials = 30000;
  double acc = 0.0;
  IQBuffer buf;
  for (int t = 0; t < trials; ++t) {
    apply_channel_into(buf, wave, {eps_n, snr_db, 0.0}, cfg.spec,
                       rng::derive_seed(21, static_cast<std::uint64_t>(t)));
    const double err = ccmle_estimate(buf, cfg).eps_n - eps_n;
    acc += err * err;
  }
  const double mse = acc / trials;
  CHECK(mse < 1.5 * floor);
  CHECK(mse > floor / 1.5);
}

TEST_CASE("classic baseline accuracy is set by the largest interval") {
  const auto cfg = standard_config(Method::classic_crt);
  const auto wave = build_preamble(cfg.spec);
  const double snr_db = 14.0;
  const double eta = std::pow(10.0, snr_db / 10.0);
  const double wide = cfg.spec.mset.wide_modulus();
  const double eps_m = 60.0;  // integer: rounding margin is maximal
  const double eps_n = wrap_to_symmetric(eps_m * 64.0 / wide, 64.0);
  const double bound =
      variance_model(cfg.spec.mset, eta).front() * (64.0 / wide) * (64.0 / wide);

  const int trials = 2000;
  double acc = 0.0;
  IQBuffer buf;
  for (int t = 0; t < trials; ++t) {
    apply_channel_into(buf, wave, {eps_n, snr_db, 0.0}, cfg.spec,
                       rng::derive_seed(33, static_cast<std::uint64_t>(t)));
    const double err = classic_crt_estimate(buf, cfg).eps_n - eps_n;
    acc += err * err;
  }
  const double mse = acc / trials;
  CHECK(mse < 1.5 * bound);
  CHECK(mse > bound / 1.5);
  // never better than the combined floor
  CHECK(mse >= delta_mse(cfg.spec.mset, 64, eta));
}

TEST_CASE("larger configurations work end to end") {
  // wide DFT with a four-range system: exactness, congruences, and floor
  // attainment above its (lower) threshold all carry over
  EstimatorConfig cfg;
  cfg.spec.n_fft = 512;
  cfg.spec.mset = build_moduli_set(std::vector<std::int64_t>{3, 5, 7, 11}, 2);
  cfg.method = Method::ccmle;
  const auto wave = build_preamble(cfg.spec);
  CHECK(wave.samples.size() == 1772);

  for (double eps_n : {0.1, -255.9, 200.25, 255.99}) {
    const auto buf = apply_channel(wave, {eps_n, kInf, 0.0}, cfg.spec, 1);
    CHECK(ccmle_estimate(buf, cfg).eps_n ==
          doctest::Approx(eps_n).epsilon(1e-10));
  }

  const double snr_db = 8.0;  // threshold for this tuple is ~4.5 dB
  const double floor =
      delta_mse(cfg.spec.mset, 512, std::pow(10.0, snr_db / 10.0));
  const int trials = 4000;
  double acc = 0.0;
  IQBuffer buf;
  for (int t = 0; t < trials; ++t) {
    apply_channel_into(buf, wave, {200.25, snr_db, 0.0}, cfg.spec,
                       rng::derive_seed(55, static_cast<std::uint64_t>(t)));
    const double err = ccmle_estimate(buf, cfg).eps_n - 200.25;
    acc += err * err;
  }
  const double mse = acc / trials;
  CHECK(mse < 1.5 * floor);
  CHECK(mse > floor / 1.5);
}

TEST_CASE("baseline ordering at moderate SNR") {
  SweepSpec s;
  s.spec = standard_config(Method::ccmle).spec;
  s.methods = {Method::ccmle, Method::closed_form_crt, Method::classic_crt,
               Method::moose};
  s.snr_grid_db = {10.0};
  s.trials_per_point = 5000;
  s.cfo_mode = CfoMode::uniform_symmetric;
  s.master_seed = 0xABCD;
  const auto res = run_sweep(s);
  REQUIRE(res.per_point.size() == 4);
  const double mse_ccmle = res.per_point[0].mse;
  const double mse_closed = res.per_point[1].mse;
  const double mse_classic = res.per_point[2].mse;
  const double mse_moose = res.per_point[3].mse;
  CHECK(mse_ccmle <= mse_closed);
  CHECK(mse_closed <= mse_classic);
  CHECK(mse_moose >= 10.0 * mse_ccmle);
}

}  // TEST_SUITE
