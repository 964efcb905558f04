#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cfocrt/cli.hpp"
#include "cfocrt/errors.hpp"
#include "cfocrt/io.hpp"

using namespace cfocrt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("cfocrt_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream f(p);
  f << doc.dump(2);
  return p;
}

nlohmann::json sweep_config() {
  return nlohmann::json{{"n_fft", 64},
                        {"gammas", {3, 5, 7}},
                        {"m_scale", 2},
                        {"methods", {"CCMLE", "Moose"}},
                        {"snr_grid_db", {8.0, 10.0}},
                        {"trials_per_point", 200},
                        {"cfo_mode", "fixed"},
                        {"eps_n", 0.1},
                        {"master_seed", 7}};
}

std::string file_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// commands emit a text table followed by a JSON document
nlohmann::json trailing_json(const std::string& text) {
  const std::size_t pos = text.find_first_of("[{");
  REQUIRE(pos != std::string::npos);
  return nlohmann::json::parse(text.substr(pos));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing and validation") {
  CHECK_NOTHROW(cli::parse_run_config(sweep_config(), cli::ConfigUse::sweep));

  auto unknown = sweep_config();
  unknown["frobnicate"] = 1;
  CHECK_THROWS_WITH_AS(
      cli::parse_run_config(unknown, cli::ConfigUse::sweep),
      doctest::Contains("unknown config key"), std::invalid_argument);

  auto bad_gcd = sweep_config();
  bad_gcd["gammas"] = {4, 6};
  CHECK_THROWS_WITH_AS(cli::parse_run_config(bad_gcd, cli::ConfigUse::sweep),
                       doctest::Contains("share factor"),
                       std::invalid_argument);

  auto missing = sweep_config();
  missing.erase("snr_grid_db");
  CHECK_THROWS_AS(cli::parse_run_config(missing, cli::ConfigUse::sweep),
                  std::invalid_argument);

  auto no_eps = sweep_config();
  no_eps.erase("eps_n");
  CHECK_THROWS_AS(cli::parse_run_config(no_eps, cli::ConfigUse::sweep),
                  std::invalid_argument);

  auto uniform_eps = sweep_config();
  uniform_eps["cfo_mode"] = "uniform";
  CHECK_THROWS_AS(cli::parse_run_config(uniform_eps, cli::ConfigUse::sweep),
                  std::invalid_argument);

  auto bad_method = sweep_config();
  bad_method["methods"] = {"CCMLE", "Schmidl"};
  CHECK_THROWS_WITH_AS(cli::parse_run_config(bad_method, cli::ConfigUse::sweep),
                       doctest::Contains("Schmidl"), std::invalid_argument);
}

TEST_CASE("seed resolution order") {
  auto cfg = cli::parse_run_config(sweep_config(), cli::ConfigUse::sweep);
  CHECK(cli::resolve_seed(cfg, 123) == 123);
  CHECK(cli::resolve_seed(cfg, std::nullopt) == 7);

  auto doc = sweep_config();
  doc.erase("master_seed");
  cfg = cli::parse_run_config(doc, cli::ConfigUse::sweep);
  setenv(cli::kSeedEnvVar, "31337", 1);
  CHECK(cli::resolve_seed(cfg, std::nullopt) == 31337);
  setenv(cli::kSeedEnvVar, "bogus", 1);
  CHECK_THROWS_AS(cli::resolve_seed(cfg, std::nullopt), std::invalid_argument);
  unsetenv(cli::kSeedEnvVar);
  CHECK(cli::resolve_seed(cfg, std::nullopt) == 0x5EEDull);
}

TEST_CASE("sweep command writes deterministic artifacts") {
  const fs::path dir = temp_dir("sweep");
  const fs::path cfg_path = write_config(dir, sweep_config());
  std::ostringstream out;
  cli::cmd_sweep(cfg_path.string(), (dir / "run1").string(), {}, out);
  cli::cmd_sweep(cfg_path.string(), (dir / "run2").string(), {}, out);

  const std::string mse1 = file_text(dir / "run1" / "mse_sweep.csv");
  const std::string mse2 = file_text(dir / "run2" / "mse_sweep.csv");
  CHECK(mse1 == mse2);
  CHECK(mse1.substr(0, mse1.find('\n')) ==
        "method,snr_db,mse,ier,trials,delta_mse_theory");
  // header + one row per (snr, method)
  CHECK(std::count(mse1.begin(), mse1.end(), '\n') == 5);

  const std::string ier1 = file_text(dir / "run1" / "ier_sweep.csv");
  CHECK(ier1.substr(0, ier1.find('\n')) == "method,snr_db,ier,trials");
  CHECK(file_text(dir / "run1" / "ier_sweep.csv") ==
        file_text(dir / "run2" / "ier_sweep.csv"));

  const auto manifest =
      nlohmann::json::parse(file_text(dir / "run1" / "manifest.json"));
  CHECK(manifest.at("master_seed").get<std::uint64_t>() == 7);
  CHECK(manifest.at("version").get<std::string>() == cli::kVersion);
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.at("config").at("n_fft").get<int>() == 64);

  const auto sweep_json =
      nlohmann::json::parse(file_text(dir / "run1" / "sweep.json"));
  CHECK(sweep_json.at("per_point").size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("sweep output is worker-count invariant") {
  const fs::path dir = temp_dir("workers");
  const fs::path cfg_path = write_config(dir, sweep_config());
  std::ostringstream out;
  cli::SweepOverrides serial;
  serial.workers = 1;
  cli::SweepOverrides threaded;
  threaded.workers = 2;
  cli::cmd_sweep(cfg_path.string(), (dir / "w1").string(), serial, out);
  cli::cmd_sweep(cfg_path.string(), (dir / "w2").string(), threaded, out);
  CHECK(file_text(dir / "w1" / "mse_sweep.csv") ==
        file_text(dir / "w2" / "mse_sweep.csv"));
  CHECK(file_text(dir / "w1" / "sweep.json") ==
        file_text(dir / "w2" / "sweep.json"));
  fs::remove_all(dir);
}

TEST_CASE("iq files round-trip exactly") {
  const fs::path dir = temp_dir("iq");
  std::vector<std::complex<double>> samples;
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 257; ++i) samples.emplace_back(u(gen), u(gen));
  write_iq_file(dir / "x.iq", samples);
  const auto back = read_iq_file(dir / "x.iq");
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(back[i] == samples[i]);
  }
  // odd byte counts are rejected
  std::ofstream(dir / "bad.iq", std::ios::binary) << "xyz";
  CHECK_THROWS_AS(read_iq_file(dir / "bad.iq"), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("threshold command mirrors the library") {
  const fs::path dir = temp_dir("threshold");
  nlohmann::json doc{{"gammas", {3, 5, 7}},
                     {"m_scale", 2},
                     {"deltas", {1e-1, 1e-2, 1e-3, 1e-6}}};
  const fs::path cfg_path = write_config(dir, doc);
  std::ostringstream out;
  cli::cmd_threshold(cfg_path.string(), out);

  const auto rows = trailing_json(out.str());
  REQUIRE(rows.size() == 4);
  const ModuliSet ms = build_moduli_set(std::vector<std::int64_t>{3, 5, 7}, 2);
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-6};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto tq = snr_threshold(ms, deltas[i]);
    CHECK(rows[i].at("delta").get<double>() == tq.delta);
    CHECK(rows[i].at("x_delta").get<double>() == tq.x_delta);
    CHECK(rows[i].at("eta_th_db").get<double>() == tq.eta_th_db);
  }
  fs::remove_all(dir);
}

TEST_CASE("configure command") {
  std::ostringstream out;
  cli::cmd_configure(512, {4}, 20, out);
  const auto rows = trailing_json(out.str());
  bool found = false;
  for (const auto& row : rows) {
    if (row.at("mset").at("gammas") == nlohmann::json({3, 5, 7, 11})) {
      found = true;
      CHECK(std::abs(row.at("threshold").at("eta_th_db").get<double>() - 4.5) <=
            0.05);
    }
  }
  CHECK(found);

  std::ostringstream dummy;
  CHECK_THROWS_AS(cli::cmd_configure(8, {6}, 12, dummy), infeasible_error);
}

TEST_CASE("estimate command round trip") {
  const fs::path dir = temp_dir("estimate");
  nlohmann::json doc{{"n_fft", 64}, {"gammas", {3, 5, 7}}, {"m_scale", 2}};
  const fs::path cfg_path = write_config(dir, doc);

  WaveformSpec ws;
  ws.n_fft = 64;
  ws.mset = build_moduli_set(std::vector<std::int64_t>{3, 5, 7}, 2);
  const auto wave = build_preamble(ws);
  const auto buf = apply_channel(
      wave, {10.1, std::numeric_limits<double>::infinity(), 0.0}, ws, 5);

  SUBCASE("synthesized capture") {
    write_iq_file(dir / "capture.iq", buf.samples);
    std::ostringstream out;
    cli::cmd_estimate((dir / "capture.iq").string(), cfg_path.string(), out);
    const auto j = trailing_json(out.str());
    CHECK(j.at("method").get<std::string>() == "CCMLE");
    CHECK(j.at("eps_n").get<double>() == doctest::Approx(10.1).epsilon(1e-9));
    CHECK(j.at("per_interval").size() == 3);
  }
  SUBCASE("truncated capture") {
    std::vector<std::complex<double>> cut(buf.samples.begin(),
                                          buf.samples.begin() + 100);
    write_iq_file(dir / "short.iq", cut);
    std::ostringstream out;
    CHECK_THROWS_WITH_AS(
        cli::cmd_estimate((dir / "short.iq").string(), cfg_path.string(), out),
        doctest::Contains("expected 142"), std::invalid_argument);
  }
  SUBCASE("zero-filled capture") {
    std::vector<std::complex<double>> zeros(142, {0.0, 0.0});
    write_iq_file(dir / "zeros.iq", zeros);
    std::ostringstream out;
    CHECK_THROWS_AS(
        cli::cmd_estimate((dir / "zeros.iq").string(), cfg_path.string(), out),
        infeasible_error);
  }
  SUBCASE("missing file") {
    std::ostringstream out;
    CHECK_THROWS_AS(
        cli::cmd_estimate((dir / "nope.iq").string(), cfg_path.string(), out),
        std::invalid_argument);
  }
  fs::remove_all(dir);
}

TEST_CASE("exit code mapping") {
  CHECK(cli::map_exception_to_exit(infeasible_error("x")) == 1);
  CHECK(cli::map_exception_to_exit(std::invalid_argument("x")) == 2);
  CHECK(cli::map_exception_to_exit(std::runtime_error("x")) == 1);
}

}  // TEST_SUITE
