// Throughput comparison between the serial reference sweep engine and the
// OpenMP trial-parallel engine, with a bit-exactness check between the two.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfocrt/montecarlo.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same_result(const cfocrt::SweepResult& a, const cfocrt::SweepResult& b) {
  if (a.per_point.size() != b.per_point.size()) return false;
  for (std::size_t i = 0; i < a.per_point.size(); ++i) {
    if (std::memcmp(&a.per_point[i].mse, &b.per_point[i].mse, sizeof(double)) ||
        std::memcmp(&a.per_point[i].ier, &b.per_point[i].ier, sizeof(double))) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t trials = 50000;
  int workers = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--trials")) trials = std::atoll(argv[i + 1]);
    if (!std::strcmp(argv[i], "--workers")) workers = std::atoi(argv[i + 1]);
  }

  cfocrt::SweepSpec s;
  s.spec.n_fft = 64;
  s.spec.mset = cfocrt::build_moduli_set(std::vector<std::int64_t>{3, 5, 7}, 2);
  s.methods = {cfocrt::Method::ccmle, cfocrt::Method::classic_crt,
               cfocrt::Method::moose};
  s.snr_grid_db = {10.0};
  s.trials_per_point = trials;
  s.cfo_mode = cfocrt::CfoMode::uniform_symmetric;
  s.master_seed = 0xBE9C;

#ifdef _OPENMP
  const int effective = workers > 0 ? workers : omp_get_max_threads();
#else
  const int effective = 1;
#endif

  std::printf("sweep benchmark: %lld trials/point, %zu methods, N=%lld\n",
              static_cast<long long>(trials), s.methods.size(),
              static_cast<long long>(s.spec.n_fft));

  auto t0 = Clock::now();
  const cfocrt::SweepResult serial = cfocrt::run_sweep_serial(s);
  const double t_serial = seconds_since(t0);

  t0 = Clock::now();
  const cfocrt::SweepResult parallel = cfocrt::run_sweep(s, workers);
  const double t_parallel = seconds_since(t0);

  const double rate_serial = static_cast<double>(trials) / t_serial;
  const double rate_parallel = static_cast<double>(trials) / t_parallel;
  std::printf("  serial reference : %8.3f s  (%10.0f trials/s)\n", t_serial,
              rate_serial);
  std::printf("  openmp x%-8d : %8.3f s  (%10.0f trials/s)\n", effective,
              t_parallel, rate_parallel);
  std::printf("  speedup          : %8.2fx\n", t_serial / t_parallel);

  if (!same_result(serial, parallel)) {
    std::printf("MISMATCH: parallel result differs from serial reference\n");
    return 1;
  }
  std::printf("parallel result matches serial reference bit for bit\n");
  return 0;
}
