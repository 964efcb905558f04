#include "cfocrt/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "cfocrt/theory.hpp"

namespace cfocrt {

namespace {

void require_method(const EstimatorConfig& cfg, Method expected) {
  if (cfg.method != expected) {
    throw std::invalid_argument("estimator invoked with mismatched method tag");
  }
}

double eps_n_from_eps_m(double eps_m, const WaveformSpec& spec) {
  const double scale =
      static_cast<double>(spec.n_fft) / spec.mset.wide_modulus();
  return wrap_to_symmetric(eps_m * scale, static_cast<double>(spec.n_fft));
}

CfoEstimate finish_wide_range(double eps_m, const RemainderObservation& obs,
                              const EstimatorConfig& cfg, Method tag) {
  CfoEstimate est;
  est.method = tag;
  est.eps_m = eps_m;
  est.eps_n = eps_n_from_eps_m(eps_m, cfg.spec);
  est.per_interval.reserve(obs.values.size());
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    est.per_interval.push_back({obs.values[i], obs.variances[i]});
  }
  return est;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::ccmle: return "CCMLE";
    case Method::classic_crt: return "ClassicCRT";
    case Method::closed_form_crt: return "ClosedFormCRT";
    case Method::moose: return "Moose";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "CCMLE") return Method::ccmle;
  if (name == "ClassicCRT") return Method::classic_crt;
  if (name == "ClosedFormCRT") return Method::closed_form_crt;
  if (name == "Moose") return Method::moose;
  return std::nullopt;
}

RemainderObservation observe_remainders(const IQBuffer& buf,
                                        const EstimatorConfig& cfg) {
  const ModuliSet& ms = cfg.spec.mset;
  const double wide = ms.wide_modulus();
  const double eta = cfg.snr_hint_db
                         ? std::pow(10.0, *cfg.snr_hint_db / 10.0)
                         : 1.0;
  RemainderObservation obs;
  obs.variances = variance_model(ms, eta);
  obs.values.reserve(ms.size());
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const std::complex<double> p = correlate(buf, k, cfg.spec);
    obs.values.push_back(
        estimate_single_interval(p, wide, ms.sample_intervals[k]));
  }
  return obs;
}

CfoEstimate ccmle_estimate(const IQBuffer& buf, const EstimatorConfig& cfg) {
  require_method(cfg, Method::ccmle);
  const RemainderObservation obs = observe_remainders(buf, cfg);
  const double eps_m = reconstruct_mle(obs, cfg.spec.mset);
  return finish_wide_range(eps_m, obs, cfg, Method::ccmle);
}

CfoEstimate classic_crt_estimate(const IQBuffer& buf,
                                 const EstimatorConfig& cfg) {
  require_method(cfg, Method::classic_crt);
  const RemainderObservation obs = observe_remainders(buf, cfg);
  const double eps_m = reconstruct_classic(obs, cfg.spec.mset);
  return finish_wide_range(eps_m, obs, cfg, Method::classic_crt);
}

CfoEstimate closed_form_crt_estimate(const IQBuffer& buf,
                                     const EstimatorConfig& cfg) {
  require_method(cfg, Method::closed_form_crt);
  const ModuliSet& ms = cfg.spec.mset;
  const double m = static_cast<double>(ms.m_scale);
  if (!(cfg.search_step > 0.0) || cfg.search_step > m / 10.0) {
    throw std::invalid_argument("search step must lie in (0, M/10]");
  }
  const RemainderObservation obs = observe_remainders(buf, cfg);
  const double r_common =
      solve_common_remainder_search(obs, ms, cfg.search_step);
  const double eps_m = reconstruct_with_common(obs, ms, r_common);
  return finish_wide_range(eps_m, obs, cfg, Method::closed_form_crt);
}

CfoEstimate moose_estimate(const IQBuffer& buf, const EstimatorConfig& cfg) {
  require_method(cfg, Method::moose);
  const ModuliSet& ms = cfg.spec.mset;
  const double n = static_cast<double>(cfg.spec.n_fft);
  const std::int64_t lag = ms.sample_intervals.front();
  const std::complex<double> p = correlate(buf, 0, cfg.spec);

  CfoEstimate est;
  est.method = Method::moose;
  const double raw = estimate_single_interval(p, n, lag);
  est.eps_n = wrap_to_symmetric(raw, n / static_cast<double>(lag));
  est.eps_m = positive_mod(est.eps_n * ms.wide_modulus() / n, ms.wide_modulus());
  const double eta = cfg.snr_hint_db
                         ? std::pow(10.0, *cfg.snr_hint_db / 10.0)
                         : 1.0;
  est.per_interval.push_back(
      {estimate_single_interval(p, ms.wide_modulus(), lag),
       variance_model(ms, eta).front()});
  return est;
}

CfoEstimate estimate(const IQBuffer& buf, const EstimatorConfig& cfg) {
  switch (cfg.method) {
    case Method::ccmle: return ccmle_estimate(buf, cfg);
    case Method::classic_crt: return classic_crt_estimate(buf, cfg);
    case Method::closed_form_crt: return closed_form_crt_estimate(buf, cfg);
    case Method::moose: return moose_estimate(buf, cfg);
  }
  throw std::invalid_argument("unknown estimation method");
}

}  // namespace cfocrt
