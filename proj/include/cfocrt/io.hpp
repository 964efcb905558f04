#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "cfocrt/estimators.hpp"
#include "cfocrt/montecarlo.hpp"
#include "cfocrt/theory.hpp"

namespace cfocrt {

void to_json(nlohmann::json& j, const ModuliSet& ms);
void to_json(nlohmann::json& j, const PerformanceModel& pm);
void to_json(nlohmann::json& j, const ThresholdQuery& tq);
void to_json(nlohmann::json& j, const CfoEstimate& est);
void to_json(nlohmann::json& j, const SweepPoint& pt);
void to_json(nlohmann::json& j, const SweepResult& res);

// canonical sweep serialization: method,snr_db,mse,ier,trials,delta_mse_theory
std::string sweep_mse_csv(const SweepResult& res);
// projection carrying only the fold-error rates
std::string sweep_ier_csv(const SweepResult& res);

// write via a temp file in the same directory plus rename, so readers never
// observe a partial file
void atomic_write_text(const std::filesystem::path& path,
                       std::string_view content);

// interleaved re/im float64 little-endian, no header
void write_iq_file(const std::filesystem::path& path,
                   std::span<const std::complex<double>> samples);
std::vector<std::complex<double>> read_iq_file(const std::filesystem::path& path);

// FNV-1a over a string, hex-encoded; used to fingerprint configs in manifests
std::string fnv1a_hex(std::string_view data);

}  // namespace cfocrt
