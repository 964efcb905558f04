#include "cfocrt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfocrt/rng.hpp"
#include "cfocrt/theory.hpp"

namespace cfocrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_sweep_spec(const SweepSpec& s) {
  validate_waveform_spec(s.spec);
  if (s.methods.empty()) {
    throw std::invalid_argument("sweep needs at least one method");
  }
  if (s.trials_per_point < 1) {
    throw std::invalid_argument("trials per point must be at least 1");
  }
  if (s.snr_grid_db.empty()) {
    throw std::invalid_argument("SNR grid must be non-empty");
  }
  for (double v : s.snr_grid_db) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("SNR grid must be finite");
    }
  }
  if (!std::is_sorted(s.snr_grid_db.begin(), s.snr_grid_db.end())) {
    throw std::invalid_argument("SNR grid must be sorted ascending");
  }
}

// Shared per-trial kernel. All methods see the same received buffer, and the
// trial seed depends only on (master_seed, point index, trial index).
struct TrialContext {
  const SweepSpec& sweep;
  TrainingWaveform wave;
  std::vector<EstimatorConfig> cfgs;

  explicit TrialContext(const SweepSpec& s) : sweep(s) {
    wave = build_preamble(s.spec);
    cfgs.reserve(s.methods.size());
    for (Method m : s.methods) {
      EstimatorConfig c;
      c.spec = s.spec;
      c.method = m;
      c.search_step = s.search_step;
      c.snr_hint_db = s.snr_hint_db;
      cfgs.push_back(std::move(c));
    }
  }

  void eval(std::size_t point_index, std::int64_t trial, double snr_db,
            IQBuffer& scratch, double* estimates_row, double& truth) const {
    const std::uint64_t tseed =
        rng::derive_seed(sweep.master_seed, point_index,
                         static_cast<std::uint64_t>(trial));
    double eps_n = sweep.fixed_eps_n;
    if (sweep.cfo_mode == CfoMode::uniform_symmetric) {
      rng::Stream cfo(rng::derive_seed(tseed, rng::kCfoTag));
      const double n = static_cast<double>(sweep.spec.n_fft);
      eps_n = -0.5 * n + n * cfo.next_double();
    }
    ChannelParams ch{eps_n, sweep.noiseless ? kInf : snr_db, 0.0};
    apply_channel_into(scratch, wave, ch, sweep.spec,
                       rng::derive_seed(tseed, rng::kNoiseTag));
    for (std::size_t m = 0; m < cfgs.size(); ++m) {
      estimates_row[m] = estimate(scratch, cfgs[m]).eps_n;
    }
    truth = eps_n;
  }
};

// Fixed-order reduction over the per-trial storage; identical for both
// engines so parallel results match the serial reference bit for bit.
// The offset lives on a circle of circumference N, so the error is the
// circular difference; a wrap of the reported representative near +-N/2 is
// not an estimation error.
void reduce_point(const SweepSpec& s, std::size_t point_index, double snr_db,
                  const std::vector<double>& estimates,
                  const std::vector<double>& truths, SweepResult& out) {
  const auto trials = static_cast<std::size_t>(s.trials_per_point);
  const std::size_t n_methods = s.methods.size();
  const double n = static_cast<double>(s.spec.n_fft);
  for (std::size_t m = 0; m < n_methods; ++m) {
    SweepPoint pt;
    pt.method = s.methods[m];
    pt.snr_db = snr_db;
    pt.trials = s.trials_per_point;
    double acc = 0.0;
    std::int64_t fold_errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double err =
          wrap_to_symmetric(estimates[t * n_methods + m] - truths[t], n);
      acc += err * err;
      if (std::abs(err) > 1.0) ++fold_errors;
    }
    pt.mse = acc / static_cast<double>(trials);
    pt.ier = static_cast<double>(fold_errors) / static_cast<double>(trials);
    pt.delta_mse_theory =
        s.noiseless ? 0.0
                    : delta_mse(s.spec.mset, s.spec.n_fft,
                                std::pow(10.0, snr_db / 10.0));
    (void)point_index;
    out.per_point.push_back(pt);
  }
}

}  // namespace

double run_trial(const EstimatorConfig& cfg, double eps_n, double snr_db,
                 std::uint64_t trial_seed) {
  const TrainingWaveform wave = build_preamble(cfg.spec);
  ChannelParams ch{eps_n, snr_db, 0.0};
  const IQBuffer buf = apply_channel(
      wave, ch, cfg.spec, rng::derive_seed(trial_seed, rng::kNoiseTag));
  return estimate(buf, cfg).eps_n;
}

double compute_ier(std::span<const double> estimates,
                   std::span<const double> truths) {
  if (estimates.empty() || estimates.size() != truths.size()) {
    throw std::invalid_argument("estimates and truths must match and be non-empty");
  }
  std::size_t bad = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (std::abs(estimates[i] - truths[i]) > 1.0) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(estimates.size());
}

SweepResult run_sweep_serial(const SweepSpec& s) {
  validate_sweep_spec(s);
  const TrialContext ctx(s);
  const auto trials = static_cast<std::size_t>(s.trials_per_point);
  const std::size_t n_methods = s.methods.size();

  SweepResult out;
  out.eta_th_db = snr_threshold(s.spec.mset, 1e-6).eta_th_db;
  std::vector<double> estimates(trials * n_methods);
  std::vector<double> truths(trials);
  IQBuffer scratch;
  for (std::size_t pi = 0; pi < s.snr_grid_db.size(); ++pi) {
    const double snr_db = s.snr_grid_db[pi];
    for (std::size_t t = 0; t < trials; ++t) {
      ctx.eval(pi, static_cast<std::int64_t>(t), snr_db, scratch,
               &estimates[t * n_methods], truths[t]);
    }
    reduce_point(s, pi, snr_db, estimates, truths, out);
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& s, int workers) {
#ifndef _OPENMP
  (void)workers;
  return run_sweep_serial(s);
#else
  if (workers == 1) return run_sweep_serial(s);
  validate_sweep_spec(s);
  const TrialContext ctx(s);
  const auto trials = static_cast<std::int64_t>(s.trials_per_point);
  const std::size_t n_methods = s.methods.size();
  const int n_threads = workers > 0 ? workers : omp_get_max_threads();

  SweepResult out;
  out.eta_th_db = snr_threshold(s.spec.mset, 1e-6).eta_th_db;
  std::vector<double> estimates(static_cast<std::size_t>(trials) * n_methods);
  std::vector<double> truths(static_cast<std::size_t>(trials));
  for (std::size_t pi = 0; pi < s.snr_grid_db.size(); ++pi) {
    const double snr_db = s.snr_grid_db[pi];
#pragma omp parallel num_threads(n_threads)
    {
      IQBuffer scratch;
#pragma omp for schedule(static)
      for (std::int64_t t = 0; t < trials; ++t) {
        ctx.eval(pi, t, snr_db, scratch,
                 &estimates[static_cast<std::size_t>(t) * n_methods],
                 truths[static_cast<std::size_t>(t)]);
      }
    }
    reduce_point(s, pi, snr_db, estimates, truths, out);
  }
  return out;
#endif
}

}  // namespace cfocrt
