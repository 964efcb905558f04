#pragma once

#include <cstdint>
#include <span>

#include "cfocrt/estimators.hpp"

namespace cfocrt {

enum class CfoMode { fixed, uniform_symmetric };

struct SweepSpec {
  WaveformSpec spec;
  std::vector<Method> methods;
  double search_step = 1e-3;
  std::optional<double> snr_hint_db;
  std::vector<double> snr_grid_db;      // ascending
  std::int64_t trials_per_point = 0;
  CfoMode cfo_mode = CfoMode::fixed;
  double fixed_eps_n = 0.0;             // used when cfo_mode == fixed
  std::uint64_t master_seed = 0;
  bool noiseless = false;               // skip noise injection entirely
};

struct SweepPoint {
  Method method = Method::ccmle;
  double snr_db = 0.0;
  double mse = 0.0;
  double ier = 0.0;
  std::int64_t trials = 0;
  double delta_mse_theory = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> per_point;  // snr-major, then method order of the spec
  double eta_th_db = 0.0;             // threshold annotation at delta = 1e-6
};

// One synthesized trial: preamble, channel at the given CFO and SNR, then
// the configured estimator. Deterministic in trial_seed.
double run_trial(const EstimatorConfig& cfg, double eps_n, double snr_db,
                 std::uint64_t trial_seed);

// fraction of estimates with |estimate - truth| > 1
double compute_ier(std::span<const double> estimates,
                   std::span<const double> truths);

// Reference engine: plain single-threaded loops.
SweepResult run_sweep_serial(const SweepSpec& spec);

// Trial-parallel engine (OpenMP). Every trial writes its own slot and the
// reduction runs serially in trial order, so the result is bit-identical to
// the serial engine for any worker count. workers == 0 uses all cores.
SweepResult run_sweep(const SweepSpec& spec, int workers = 0);

}  // namespace cfocrt
