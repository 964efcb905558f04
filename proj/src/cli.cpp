#include "cfocrt/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "cfocrt/errors.hpp"
#include "cfocrt/io.hpp"

namespace cfocrt::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "n_fft",      "sample_period",    "gammas",     "m_scale",
    "zc_root",    "methods",          "snr_grid_db", "trials_per_point",
    "cfo_mode",   "eps_n",            "master_seed", "search_step",
    "snr_hint_db", "noiseless",       "deltas"};

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void require_key(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) fail(std::string("config is missing \"") + key + "\"");
}

}  // namespace

WaveformSpec RunConfig::waveform_spec() const {
  WaveformSpec ws;
  ws.n_fft = n_fft;
  ws.sample_period = sample_period;
  ws.mset = build_moduli_set(gammas, m_scale);
  ws.zc_root = zc_root;
  validate_waveform_spec(ws);
  return ws;
}

SweepSpec RunConfig::sweep_spec(std::uint64_t seed) const {
  SweepSpec s;
  s.spec = waveform_spec();
  s.methods = methods;
  s.search_step = search_step;
  s.snr_hint_db = snr_hint_db;
  s.snr_grid_db = snr_grid_db;
  s.trials_per_point = trials_per_point;
  s.cfo_mode = cfo_mode;
  s.fixed_eps_n = fixed_eps_n;
  s.master_seed = seed;
  s.noiseless = noiseless;
  return s;
}

RunConfig parse_run_config(const nlohmann::json& doc, ConfigUse use) {
  if (!doc.is_object()) fail("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!kKnownKeys.count(key)) fail("unknown config key: " + key);
  }

  RunConfig cfg;
  cfg.echo = doc;

  require_key(doc, "gammas");
  cfg.gammas = doc.at("gammas").get<std::vector<std::int64_t>>();
  if (doc.contains("m_scale")) cfg.m_scale = doc.at("m_scale").get<std::int64_t>();
  if (doc.contains("zc_root")) cfg.zc_root = doc.at("zc_root").get<std::int64_t>();
  if (doc.contains("sample_period")) {
    cfg.sample_period = doc.at("sample_period").get<double>();
  }
  if (doc.contains("master_seed")) {
    cfg.master_seed = doc.at("master_seed").get<std::uint64_t>();
  }
  if (doc.contains("search_step")) {
    cfg.search_step = doc.at("search_step").get<double>();
  }
  if (doc.contains("snr_hint_db")) {
    cfg.snr_hint_db = doc.at("snr_hint_db").get<double>();
  }
  if (doc.contains("noiseless")) cfg.noiseless = doc.at("noiseless").get<bool>();
  if (doc.contains("deltas")) {
    cfg.deltas = doc.at("deltas").get<std::vector<double>>();
  }

  const bool needs_waveform = use != ConfigUse::threshold;
  if (needs_waveform) {
    require_key(doc, "n_fft");
    cfg.n_fft = doc.at("n_fft").get<std::int64_t>();
  } else if (doc.contains("n_fft")) {
    cfg.n_fft = doc.at("n_fft").get<std::int64_t>();
  }

  if (doc.contains("methods")) {
    for (const auto& name : doc.at("methods")) {
      const auto m = method_from_name(name.get<std::string>());
      if (!m) {
        fail("unknown method \"" + name.get<std::string>() +
             "\"; expected CCMLE, ClassicCRT, ClosedFormCRT or Moose");
      }
      cfg.methods.push_back(*m);
    }
  }
  if (doc.contains("cfo_mode")) {
    const std::string mode = doc.at("cfo_mode").get<std::string>();
    if (mode == "fixed") {
      cfg.cfo_mode = CfoMode::fixed;
    } else if (mode == "uniform") {
      cfg.cfo_mode = CfoMode::uniform_symmetric;
    } else {
      fail("cfo_mode must be \"fixed\" or \"uniform\"");
    }
  }
  if (doc.contains("eps_n")) {
    if (doc.contains("cfo_mode") && cfg.cfo_mode == CfoMode::uniform_symmetric) {
      fail("eps_n is only valid with cfo_mode \"fixed\"");
    }
    cfg.fixed_eps_n = doc.at("eps_n").get<double>();
  }
  if (doc.contains("snr_grid_db")) {
    cfg.snr_grid_db = doc.at("snr_grid_db").get<std::vector<double>>();
  }
  if (doc.contains("trials_per_point")) {
    cfg.trials_per_point = doc.at("trials_per_point").get<std::int64_t>();
  }

  if (use == ConfigUse::sweep) {
    require_key(doc, "methods");
    require_key(doc, "snr_grid_db");
    require_key(doc, "trials_per_point");
    require_key(doc, "cfo_mode");
    if (cfg.cfo_mode == CfoMode::fixed && !doc.contains("eps_n")) {
      fail("cfo_mode \"fixed\" requires eps_n");
    }
  }
  if (use == ConfigUse::threshold) {
    require_key(doc, "deltas");
    if (cfg.deltas.empty()) fail("deltas must be non-empty");
  }

  // fail fast on a bad moduli/waveform description
  if (needs_waveform) {
    cfg.waveform_spec();
  } else {
    build_moduli_set(cfg.gammas, cfg.m_scale);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, ConfigUse use) {
  std::ifstream f(path);
  if (!f) fail("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    fail("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, use);
}

std::uint64_t resolve_seed(const RunConfig& cfg,
                           std::optional<std::uint64_t> override_seed) {
  if (override_seed) return *override_seed;
  if (cfg.master_seed) return *cfg.master_seed;
  if (const char* env = std::getenv(kSeedEnvVar)) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      fail(std::string(kSeedEnvVar) + " is not an unsigned integer");
    }
    return v;
  }
  return 0x5EEDull;
}

void cmd_sweep(const std::string& config_path, const std::string& out_dir,
               const SweepOverrides& overrides, std::ostream& out) {
  RunConfig cfg = load_run_config(config_path, ConfigUse::sweep);
  if (overrides.trials) cfg.trials_per_point = *overrides.trials;
  if (overrides.noiseless) cfg.noiseless = true;
  const std::uint64_t seed = resolve_seed(cfg, overrides.seed);

  const SweepSpec spec = cfg.sweep_spec(seed);
  const SweepResult result = run_sweep(spec, overrides.workers);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  atomic_write_text(dir / "mse_sweep.csv", sweep_mse_csv(result));
  atomic_write_text(dir / "ier_sweep.csv", sweep_ier_csv(result));

  nlohmann::json result_json = result;
  atomic_write_text(dir / "sweep.json", result_json.dump(2) + "\n");

  nlohmann::json manifest{{"version", kVersion},
                          {"master_seed", seed},
                          {"trials_per_point", cfg.trials_per_point},
                          {"noiseless", cfg.noiseless},
                          {"config", cfg.echo},
                          {"config_hash", fnv1a_hex(cfg.echo.dump())}};
  atomic_write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  out << "wrote " << (dir / "mse_sweep.csv").string() << ", "
      << (dir / "ier_sweep.csv").string() << ", "
      << (dir / "sweep.json").string() << ", "
      << (dir / "manifest.json").string() << "\n";
}

void cmd_threshold(const std::string& config_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path, ConfigUse::threshold);
  const ModuliSet ms = build_moduli_set(cfg.gammas, cfg.m_scale);

  nlohmann::json rows = nlohmann::json::array();
  char line[128];
  out << "     delta   x_delta  eta_th_db\n";
  for (double delta : cfg.deltas) {
    const ThresholdQuery tq = snr_threshold(ms, delta);
    std::snprintf(line, sizeof line, "%10.3g  %8.4f  %9.4f\n", tq.delta,
                  tq.x_delta, tq.eta_th_db);
    out << line;
    rows.push_back(tq);
  }
  out << rows.dump(2) << "\n";
}

void cmd_configure(std::int64_t n_fft, const std::vector<int>& k_targets,
                   std::size_t top, std::ostream& out) {
  const std::size_t want = std::max<std::size_t>(top, 1);
  const auto cands = config_search(n_fft, k_targets, want);
  if (cands.empty()) {
    throw infeasible_error("no feasible configuration for the requested sizes");
  }

  out << "rank  gammas                 intervals                sigma_l     eta_th_db\n";
  char line[256];
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const ConfigCandidate& c = cands[i];
    std::string gam, ivl;
    for (std::size_t k = 0; k < c.mset.size(); ++k) {
      if (k) {
        gam += ",";
        ivl += ",";
      }
      gam += std::to_string(c.mset.gammas[k]);
      ivl += std::to_string(c.mset.sample_intervals[k]);
    }
    std::snprintf(line, sizeof line, "%3zu%s  %-21s  %-21s  %10.3g  %9.4f\n",
                  i + 1, c.pareto_optimal ? "*" : " ", gam.c_str(),
                  ivl.c_str(), c.model.sigma_l, c.threshold.eta_th_db);
    out << line;
    rows.push_back(nlohmann::json{{"mset", c.mset},
                                  {"model", c.model},
                                  {"threshold", c.threshold},
                                  {"pareto_optimal", c.pareto_optimal}});
  }
  out << "(* = Pareto-optimal on sigma_l vs eta_th)\n";
  out << rows.dump(2) << "\n";
}

void cmd_estimate(const std::string& iq_path, const std::string& config_path,
                  std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path, ConfigUse::estimate);
  const WaveformSpec ws = cfg.waveform_spec();

  const auto samples = read_iq_file(iq_path);
  const std::size_t expected = preamble_length(ws.mset);
  if (samples.size() != expected) {
    fail("IQ file length mismatch: expected " + std::to_string(expected) +
         " complex samples, got " + std::to_string(samples.size()));
  }

  EstimatorConfig ec;
  ec.spec = ws;
  ec.method = Method::ccmle;
  ec.search_step = cfg.search_step;
  ec.snr_hint_db = cfg.snr_hint_db;

  IQBuffer buf;
  buf.samples = samples;
  const CfoEstimate est = ccmle_estimate(buf, ec);
  nlohmann::json j = est;
  out << j.dump(2) << "\n";
}

int map_exception_to_exit(const std::exception& e) {
  if (dynamic_cast<const infeasible_error*>(&e)) return 1;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 2;
  return 1;
}

}  // namespace cfocrt::cli
