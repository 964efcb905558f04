#pragma once

#include <optional>
#include <string_view>

#include "cfocrt/signal.hpp"

namespace cfocrt {

enum class Method { ccmle, classic_crt, closed_form_crt, moose };

const char* method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

struct EstimatorConfig {
  WaveformSpec spec;
  Method method = Method::ccmle;
  double search_step = 1e-3;            // closed-form baseline grid step
  std::optional<double> snr_hint_db;    // feeds the variance model when known
};

struct IntervalEstimate {
  double value = 0.0;     // wide-range remainder estimate for this interval
  double variance = 0.0;  // modeled error variance
};

struct CfoEstimate {
  double eps_n = 0.0;  // in [-N/2, N/2), units of subcarrier spacing
  double eps_m = 0.0;  // in [0, M*Gamma), internal normalization
  std::vector<IntervalEstimate> per_interval;
  Method method = Method::ccmle;
};

// Per-interval remainder estimates plus modeled variances for the whole
// preamble. Without an SNR hint the variances are evaluated at unit SNR;
// only their ratios matter for the weighted solver.
RemainderObservation observe_remainders(const IQBuffer& buf,
                                        const EstimatorConfig& cfg);

CfoEstimate ccmle_estimate(const IQBuffer& buf, const EstimatorConfig& cfg);
CfoEstimate classic_crt_estimate(const IQBuffer& buf,
                                 const EstimatorConfig& cfg);
CfoEstimate closed_form_crt_estimate(const IQBuffer& buf,
                                     const EstimatorConfig& cfg);

// Single-interval estimate from the largest segment, wrapped to its own
// unambiguous range [-N/(2 L_1), N/(2 L_1)).
CfoEstimate moose_estimate(const IQBuffer& buf, const EstimatorConfig& cfg);

// dispatch on cfg.method
CfoEstimate estimate(const IQBuffer& buf, const EstimatorConfig& cfg);

}  // namespace cfocrt
