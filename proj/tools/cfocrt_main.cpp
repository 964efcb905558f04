#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cfocrt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CRT-based wide-range CFO estimation simulator"};
  app.set_version_flag("--version", cfocrt::cli::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string iq_path;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  int workers = 0;
  bool noiseless = false;
  std::int64_t n_fft = 0;
  std::vector<int> k_targets;
  std::size_t top = 12;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte-Carlo MSE/IER sweep over an SNR grid");
  sweep->add_option("--config", config_path, "JSON run configuration")
      ->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* seed_opt =
      sweep->add_option("--seed", seed, "master seed override");
  CLI::Option* trials_opt =
      sweep->add_option("--trials", trials, "trials-per-point override");
  sweep->add_option("--workers", workers, "worker threads (0 = all cores)");
  sweep->add_flag("--noiseless", noiseless, "disable noise injection");

  CLI::App* threshold = app.add_subcommand(
      "threshold", "SNR thresholds for the configured ranges");
  threshold->add_option("--config", config_path, "JSON run configuration")
      ->required();

  CLI::App* configure = app.add_subcommand(
      "configure", "rank feasible co-prime range configurations");
  configure->add_option("--n-fft", n_fft, "DFT size")->required();
  configure
      ->add_option("--k", k_targets, "number of ranges (repeatable)")
      ->required();
  configure->add_option("--top", top, "rows to report (default 12)");

  CLI::App* estimate = app.add_subcommand(
      "estimate", "estimate the CFO of a captured preamble");
  estimate->add_option("--iq", iq_path, "interleaved float64 IQ file")
      ->required();
  estimate->add_option("--config", config_path, "JSON run configuration")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      cfocrt::cli::SweepOverrides ov;
      if (seed_opt->count() > 0) ov.seed = seed;
      if (trials_opt->count() > 0) ov.trials = trials;
      ov.workers = workers;
      ov.noiseless = noiseless;
      cfocrt::cli::cmd_sweep(config_path, out_dir, ov, std::cout);
    } else if (threshold->parsed()) {
      cfocrt::cli::cmd_threshold(config_path, std::cout);
    } else if (configure->parsed()) {
      cfocrt::cli::cmd_configure(n_fft, k_targets, top, std::cout);
    } else if (estimate->parsed()) {
      cfocrt::cli::cmd_estimate(iq_path, config_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfocrt::cli::map_exception_to_exit(e);
  }
  return 0;
}
