#include "cfocrt/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "IQ file layout assumes a little-endian host");

namespace cfocrt {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const ModuliSet& ms) {
  j = nlohmann::json{{"gammas", ms.gammas},
                     {"m_scale", ms.m_scale},
                     {"gamma_prod", ms.gamma_prod},
                     {"sample_intervals", ms.sample_intervals},
                     {"inverses", ms.inverses},
                     {"scaled_moduli", ms.scaled_moduli}};
}

void to_json(nlohmann::json& j, const PerformanceModel& pm) {
  j = nlohmann::json{{"mset", pm.mset},
                     {"n_fft", pm.n_fft},
                     {"snr_linear", pm.snr_linear},
                     {"sigma_sq", pm.sigma_sq},
                     {"weights", pm.weights},
                     {"delta_mse_m", pm.delta_mse_m},
                     {"delta_mse", pm.delta_mse},
                     {"xi_star", pm.xi_star},
                     {"sigma_l", pm.sigma_l}};
}

void to_json(nlohmann::json& j, const ThresholdQuery& tq) {
  j = nlohmann::json{{"delta", tq.delta},
                     {"x_delta", tq.x_delta},
                     {"eta_th_linear", tq.eta_th_linear},
                     {"eta_th_db", tq.eta_th_db}};
}

void to_json(nlohmann::json& j, const CfoEstimate& est) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const IntervalEstimate& ie : est.per_interval) {
    intervals.push_back({{"value", ie.value}, {"variance", ie.variance}});
  }
  j = nlohmann::json{{"method", method_name(est.method)},
                     {"eps_n", est.eps_n},
                     {"eps_m", est.eps_m},
                     {"per_interval", std::move(intervals)}};
}

void to_json(nlohmann::json& j, const SweepPoint& pt) {
  j = nlohmann::json{{"method", method_name(pt.method)},
                     {"snr_db", pt.snr_db},
                     {"mse", pt.mse},
                     {"ier", pt.ier},
                     {"trials", pt.trials},
                     {"delta_mse_theory", pt.delta_mse_theory}};
}

void to_json(nlohmann::json& j, const SweepResult& res) {
  j = nlohmann::json{{"per_point", res.per_point},
                     {"eta_th_db", res.eta_th_db}};
}

std::string sweep_mse_csv(const SweepResult& res) {
  std::string out = "method,snr_db,mse,ier,trials,delta_mse_theory\n";
  for (const SweepPoint& pt : res.per_point) {
    out += method_name(pt.method);
    out += ',';
    out += fmt_double(pt.snr_db);
    out += ',';
    out += fmt_double(pt.mse);
    out += ',';
    out += fmt_double(pt.ier);
    out += ',';
    out += std::to_string(pt.trials);
    out += ',';
    out += fmt_double(pt.delta_mse_theory);
    out += '\n';
  }
  return out;
}

std::string sweep_ier_csv(const SweepResult& res) {
  std::string out = "method,snr_db,ier,trials\n";
  for (const SweepPoint& pt : res.per_point) {
    out += method_name(pt.method);
    out += ',';
    out += fmt_double(pt.snr_db);
    out += ',';
    out += fmt_double(pt.ier);
    out += ',';
    out += std::to_string(pt.trials);
    out += '\n';
  }
  return out;
}

void atomic_write_text(const std::filesystem::path& path,
                       std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::invalid_argument("cannot open " + tmp.string() +
                                  " for writing");
    }
    f.write(content.data(),
            static_cast<std::streamsize>(content.size()));
    if (!f) {
      throw std::invalid_argument("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_iq_file(const std::filesystem::path& path,
                   std::span<const std::complex<double>> samples) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::invalid_argument("cannot open " + tmp.string() +
                                  " for writing");
    }
    for (const std::complex<double>& s : samples) {
      const double pair[2] = {s.real(), s.imag()};
      f.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
    if (!f) {
      throw std::invalid_argument("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::complex<double>> read_iq_file(
    const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) {
    throw std::invalid_argument("cannot open " + path.string());
  }
  const std::streamsize bytes = f.tellg();
  if (bytes % static_cast<std::streamsize>(2 * sizeof(double)) != 0) {
    throw std::invalid_argument(
        path.string() + " is not a whole number of complex float64 samples");
  }
  f.seekg(0);
  std::vector<std::complex<double>> out(
      static_cast<std::size_t>(bytes) / (2 * sizeof(double)));
  for (std::complex<double>& s : out) {
    double pair[2];
    f.read(reinterpret_cast<char*>(pair), sizeof pair);
    s = {pair[0], pair[1]};
  }
  if (!f) {
    throw std::invalid_argument("read failed for " + path.string());
  }
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace cfocrt
