#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cfocrt/moduli.hpp"

namespace cfocrt {

// Training preamble description: one periodic segment per sample interval of
// the moduli set, each a constant-amplitude block repeated twice.
struct WaveformSpec {
  std::int64_t n_fft = 0;      // DFT size / subcarrier count
  double sample_period = 1.0;  // seconds; informational only
  ModuliSet mset;
  std::int64_t zc_root = 1;    // co-prime with every segment length
};

void validate_waveform_spec(const WaveformSpec& spec);

struct SegmentLayout {
  std::size_t offset = 0;      // start of the segment in the preamble
  std::int64_t interval = 0;   // repetition lag; segment holds 2*interval samples
};

struct TrainingWaveform {
  std::vector<std::complex<double>> samples;
  std::vector<SegmentLayout> segments;
};

struct ChannelParams {
  double cfo_normalized = 0.0;  // in units of subcarrier spacing, [-N/2, N/2]
  double snr_db = 0.0;          // +infinity selects the noiseless path
  double channel_phase = 0.0;   // radians; |h| = 1
};

struct IQBuffer {
  std::vector<std::complex<double>> samples;
};

// Constant-amplitude sequence with ideal cyclic autocorrelation:
// s[n] = exp(-i*pi*root*n*(n + length%2) / length). Requires
// gcd(root, length) == 1.
std::vector<std::complex<double>> zc_sequence(std::int64_t length,
                                              std::int64_t root);

// Segments concatenated in descending-interval order; segment i is a
// length-L_i block repeated twice so s(n + L_i) = s(n) inside it.
TrainingWaveform build_preamble(const WaveformSpec& spec);

// number of samples build_preamble produces for this moduli set
std::size_t preamble_length(const ModuliSet& mset);

// r(n) = e^{j*phi} s(n) e^{j 2 pi eps_N n / N} + w(n) with n the global
// preamble index. Noise is complex circular Gaussian of variance 1/snr,
// drawn per segment from a counter stream keyed by (noise_seed, segment).
IQBuffer apply_channel(const TrainingWaveform& wave, const ChannelParams& ch,
                       const WaveformSpec& spec, std::uint64_t noise_seed);

// Same, writing into an existing buffer (hot path for trial loops).
void apply_channel_into(IQBuffer& out, const TrainingWaveform& wave,
                        const ChannelParams& ch, const WaveformSpec& spec,
                        std::uint64_t noise_seed);

// lag-L autocorrelation sum of segment k: sum_m r*(m) r(m+L)
std::complex<double> correlate(const IQBuffer& buf, std::size_t segment_index,
                               const WaveformSpec& spec);

// (numerator / (2 pi interval)) * arg(p) with arg mapped to [0, 2 pi),
// so the result lies in [0, numerator/interval). Rejects p == 0.
double estimate_single_interval(std::complex<double> p, double numerator,
                                std::int64_t interval);

// map [0, width) (or any real) into [-width/2, width/2)
double wrap_to_symmetric(double value, double width);

}  // namespace cfocrt
