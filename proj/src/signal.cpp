#include "cfocrt/signal.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfocrt/errors.hpp"
#include "cfocrt/rng.hpp"

namespace cfocrt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double snr_linear_of_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

}  // namespace

void validate_waveform_spec(const WaveformSpec& spec) {
  if (spec.n_fft < 2) {
    throw std::invalid_argument("DFT size must be at least 2");
  }
  if (!(spec.sample_period > 0.0)) {
    throw std::invalid_argument("sample period must be positive");
  }
  if (spec.mset.size() < 2 || spec.mset.gamma_prod <= 0) {
    throw std::invalid_argument("waveform spec carries an unbuilt moduli set");
  }
  if (spec.mset.sample_intervals.front() >= spec.n_fft) {
    throw std::invalid_argument(
        "largest sample interval " +
        std::to_string(spec.mset.sample_intervals.front()) +
        " must be smaller than the DFT size " + std::to_string(spec.n_fft));
  }
  if (spec.zc_root < 1) {
    throw std::invalid_argument("sequence root must be positive");
  }
  for (std::int64_t interval : spec.mset.sample_intervals) {
    if (std::gcd(spec.zc_root, interval) != 1) {
      throw std::invalid_argument("sequence root " +
                                  std::to_string(spec.zc_root) +
                                  " is not co-prime with segment length " +
                                  std::to_string(interval));
    }
  }
}

std::vector<std::complex<double>> zc_sequence(std::int64_t length,
                                              std::int64_t root) {
  if (length < 1) {
    throw std::invalid_argument("sequence length must be positive");
  }
  if (root < 1 || std::gcd(root, length) != 1) {
    throw std::invalid_argument("sequence root must be co-prime with length");
  }
  const std::int64_t cf = length % 2;
  std::vector<std::complex<double>> seq(static_cast<std::size_t>(length));
  for (std::int64_t n = 0; n < length; ++n) {
    // phase exponent reduced mod 2*length to keep the argument small
    const std::int64_t e = (root % (2 * length)) * (n * (n + cf) % (2 * length));
    const double phase = -kPi * static_cast<double>(e % (2 * length)) /
                         static_cast<double>(length);
    seq[static_cast<std::size_t>(n)] = std::polar(1.0, phase);
  }
  return seq;
}

std::size_t preamble_length(const ModuliSet& mset) {
  std::size_t total = 0;
  for (std::int64_t interval : mset.sample_intervals) {
    total += 2 * static_cast<std::size_t>(interval);
  }
  return total;
}

TrainingWaveform build_preamble(const WaveformSpec& spec) {
  validate_waveform_spec(spec);
  TrainingWaveform wave;
  wave.samples.reserve(preamble_length(spec.mset));
  std::size_t offset = 0;
  for (std::int64_t interval : spec.mset.sample_intervals) {
    const auto block = zc_sequence(interval, spec.zc_root);
    wave.segments.push_back({offset, interval});
    wave.samples.insert(wave.samples.end(), block.begin(), block.end());
    wave.samples.insert(wave.samples.end(), block.begin(), block.end());
    offset += 2 * static_cast<std::size_t>(interval);
  }
  return wave;
}

void apply_channel_into(IQBuffer& out, const TrainingWaveform& wave,
                        const ChannelParams& ch, const WaveformSpec& spec,
                        std::uint64_t noise_seed) {
  const bool noiseless = std::isinf(ch.snr_db) && ch.snr_db > 0.0;
  double sigma_component = 0.0;
  if (!noiseless) {
    const double eta = snr_linear_of_db(ch.snr_db);
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw std::invalid_argument("SNR must map to a positive finite value");
    }
    sigma_component = std::sqrt(0.5 / eta);
  }
  out.samples.resize(wave.samples.size());
  const std::complex<double> h = std::polar(1.0, ch.channel_phase);
  const double phase_step =
      rng::kTwoPi * ch.cfo_normalized / static_cast<double>(spec.n_fft);
  for (std::size_t k = 0; k < wave.segments.size(); ++k) {
    const SegmentLayout seg = wave.segments[k];
    const std::size_t len = 2 * static_cast<std::size_t>(seg.interval);
    rng::Stream noise(rng::derive_seed(noise_seed, k));
    for (std::size_t n = 0; n < len; ++n) {
      const std::size_t g = seg.offset + n;
      std::complex<double> v =
          h * wave.samples[g] *
          std::polar(1.0, phase_step * static_cast<double>(g));
      if (!noiseless) {
        double re, im;
        noise.next_gaussian_pair(re, im);
        v += std::complex<double>(re, im) * sigma_component;
      }
      out.samples[g] = v;
    }
  }
}

IQBuffer apply_channel(const TrainingWaveform& wave, const ChannelParams& ch,
                       const WaveformSpec& spec, std::uint64_t noise_seed) {
  IQBuffer out;
  apply_channel_into(out, wave, ch, spec, noise_seed);
  return out;
}

std::complex<double> correlate(const IQBuffer& buf, std::size_t segment_index,
                               const WaveformSpec& spec) {
  const ModuliSet& ms = spec.mset;
  if (segment_index >= ms.size()) {
    throw std::invalid_argument("segment index out of range");
  }
  if (buf.samples.size() != preamble_length(ms)) {
    throw std::invalid_argument(
        "buffer length " + std::to_string(buf.samples.size()) +
        " does not match preamble layout length " +
        std::to_string(preamble_length(ms)));
  }
  std::size_t offset = 0;
  for (std::size_t j = 0; j < segment_index; ++j) {
    offset += 2 * static_cast<std::size_t>(ms.sample_intervals[j]);
  }
  const auto lag = static_cast<std::size_t>(ms.sample_intervals[segment_index]);
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < lag; ++m) {
    acc += std::conj(buf.samples[offset + m]) * buf.samples[offset + m + lag];
  }
  return acc;
}

double estimate_single_interval(std::complex<double> p, double numerator,
                                std::int64_t interval) {
  if (interval <= 0) {
    throw std::invalid_argument("interval must be positive");
  }
  if (p == std::complex<double>(0.0, 0.0)) {
    throw infeasible_error("correlation is zero; phase is undefined");
  }
  double arg = std::atan2(p.imag(), p.real());
  if (arg < 0.0) arg += rng::kTwoPi;
  return numerator * arg / (rng::kTwoPi * static_cast<double>(interval));
}

double wrap_to_symmetric(double value, double width) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("width must be positive");
  }
  return positive_mod(value + 0.5 * width, width) - 0.5 * width;
}

}  // namespace cfocrt
