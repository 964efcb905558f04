#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfocrt/montecarlo.hpp"

namespace cfocrt::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnvVar = "CFO_CRT_SEED";

// Which config fields a command insists on.
enum class ConfigUse { sweep, threshold, estimate };

// Parsed and validated JSON run configuration. Unknown keys are rejected.
struct RunConfig {
  std::int64_t n_fft = 0;
  double sample_period = 1.0;
  std::vector<std::int64_t> gammas;
  std::int64_t m_scale = 2;
  std::int64_t zc_root = 1;
  std::vector<Method> methods;
  std::vector<double> snr_grid_db;
  std::int64_t trials_per_point = 0;
  CfoMode cfo_mode = CfoMode::fixed;
  double fixed_eps_n = 0.0;
  std::optional<std::uint64_t> master_seed;
  double search_step = 1e-3;
  std::optional<double> snr_hint_db;
  bool noiseless = false;
  std::vector<double> deltas;

  nlohmann::json echo;  // the document the config was parsed from

  WaveformSpec waveform_spec() const;
  SweepSpec sweep_spec(std::uint64_t seed) const;
};

RunConfig parse_run_config(const nlohmann::json& doc, ConfigUse use);
RunConfig load_run_config(const std::string& path, ConfigUse use);

// Seed precedence: explicit override, then the config value, then the
// CFO_CRT_SEED environment variable, then a fixed default.
std::uint64_t resolve_seed(const RunConfig& cfg,
                           std::optional<std::uint64_t> override_seed);

struct SweepOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  int workers = 0;  // 0 = all cores
  bool noiseless = false;
};

// Commands throw on failure; map_exception_to_exit translates for main().
void cmd_sweep(const std::string& config_path, const std::string& out_dir,
               const SweepOverrides& overrides, std::ostream& out);
void cmd_threshold(const std::string& config_path, std::ostream& out);
void cmd_configure(std::int64_t n_fft, const std::vector<int>& k_targets,
                   std::size_t top, std::ostream& out);
void cmd_estimate(const std::string& iq_path, const std::string& config_path,
                  std::ostream& out);

// 1 for infeasibility, 2 for input/validation problems
int map_exception_to_exit(const std::exception& e);

}  // namespace cfocrt::cli
