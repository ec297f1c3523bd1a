#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "foi/audio.hpp"

namespace foi {

// One-sided STFT magnitudes, frames along rows.
struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // n_frames x n_bins
  std::vector<double> frame_times;  // window-center times, seconds
  std::vector<double> bin_freqs;    // Hz
  int window_len = 0;
  int hop_len = 0;
  int sample_rate = 0;

  Eigen::Index n_frames() const { return magnitudes.rows(); }
  Eigen::Index n_bins() const { return magnitudes.cols(); }
};

// Per-frame mean magnitude across frequency, the 1-D series peaks are
// detected on.
struct Envelope {
  std::vector<double> values;
  std::vector<double> frame_times;

  // Seconds between adjacent frames.
  double frame_step() const {
    if (frame_times.size() < 2) return 0.0;
    return frame_times[1] - frame_times[0];
  }
};

inline std::vector<double> hann_window(int len) {
  std::vector<double> w(len);
  for (int i = 0; i < len; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / len);
  return w;
}

// Hann-windowed one-sided magnitude STFT. No padding: frame t covers
// samples [t*hop, t*hop + window), so n_frames = (N - window)/hop + 1.
inline Spectrogram stft(const AudioBuffer& buffer, int window_len, int hop_len) {
  validate(buffer, "stft");
  if (window_len <= 0 || hop_len <= 0 || hop_len > window_len)
    throw Error("stft: need 0 < hop_len <= window_len");
  if (std::size_t(window_len) > buffer.samples.size())
    throw Error("stft: buffer shorter than one window");

  const std::size_t n_frames =
      (buffer.samples.size() - std::size_t(window_len)) / std::size_t(hop_len) + 1;
  const int n_bins = window_len / 2 + 1;

  Spectrogram spec;
  spec.window_len = window_len;
  spec.hop_len = hop_len;
  spec.sample_rate = buffer.sample_rate;
  spec.magnitudes.resize(Eigen::Index(n_frames), n_bins);
  spec.frame_times.resize(n_frames);
  spec.bin_freqs.resize(std::size_t(n_bins));
  for (int i = 0; i < n_bins; ++i)
    spec.bin_freqs[std::size_t(i)] = double(i) * buffer.sample_rate / window_len;

  const std::vector<double> window = hann_window(window_len);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(window_len));
  std::vector<std::complex<double>> spectrum;

  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = t * std::size_t(hop_len);
    for (int i = 0; i < window_len; ++i)
      frame[std::size_t(i)] = buffer.samples[start + std::size_t(i)] * window[std::size_t(i)];
    fft.fwd(spectrum, frame);
    for (int i = 0; i < n_bins; ++i)
      spec.magnitudes(Eigen::Index(t), i) = std::abs(spectrum[std::size_t(i)]);
    spec.frame_times[t] =
        (double(start) + window_len / 2.0) / buffer.sample_rate;
  }
  return spec;
}

inline Envelope mean_magnitude(const Spectrogram& spec) {
  Envelope env;
  env.frame_times = spec.frame_times;
  env.values.resize(std::size_t(spec.n_frames()));
  for (Eigen::Index t = 0; t < spec.n_frames(); ++t)
    env.values[std::size_t(t)] = spec.magnitudes.row(t).mean();
  return env;
}

// Normalized Hann smoothing with reflective padding. The kernel length is
// smooth_len_s rounded to frames and forced odd, so the output stays
// aligned with the input.
inline Envelope smooth_hann(const Envelope& env, double smooth_len_s) {
  if (smooth_len_s <= 0.0) throw Error("smooth_hann: smooth_len_s must be positive");
  if (env.values.empty()) return env;

  const double step = env.frame_step();
  std::size_t klen = 1;
  if (step > 0.0) {
    klen = std::size_t(std::llround(smooth_len_s / step));
    if (klen < 1) klen = 1;
    if (klen % 2 == 0) klen += 1;
  }
  if (klen == 1) return env;

  std::vector<double> kernel(klen);
  double ksum = 0.0;
  for (std::size_t i = 0; i < klen; ++i) {
    kernel[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i + 1) / double(klen + 1));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  const std::ptrdiff_t n = std::ptrdiff_t(env.values.size());
  const std::ptrdiff_t half = std::ptrdiff_t(klen) / 2;
  auto reflect = [n](std::ptrdiff_t i) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i;
      if (i >= n) i = 2 * (n - 1) - i;
      if (n == 1) return std::ptrdiff_t(0);
    }
    return i;
  };

  Envelope out;
  out.frame_times = env.frame_times;
  out.values.assign(std::size_t(n), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(klen); ++j)
      acc += kernel[std::size_t(j)] * env.values[std::size_t(reflect(i + j - half))];
    out.values[std::size_t(i)] = acc;
  }
  return out;
}

inline void export_envelope_csv(const Envelope& env, std::ostream& os) {
  os << "frame_time_s,value\n";
  char line[80];
  for (std::size_t i = 0; i < env.values.size(); ++i) {
    std::snprintf(line, sizeof line, "%.9f,%.17g\n", env.frame_times[i], env.values[i]);
    os << line;
  }
}

// Time-averaged magnitude per bin (the Fig. 3-style spectrum view).
inline void export_mean_spectrum_csv(const Spectrogram& spec, std::ostream& os) {
  os << "freq_hz,mean_magnitude,log_magnitude\n";
  char line[100];
  for (Eigen::Index i = 0; i < spec.n_bins(); ++i) {
    const double m = spec.magnitudes.col(i).mean();
    std::snprintf(line, sizeof line, "%.6f,%.17g,%.17g\n",
                  spec.bin_freqs[std::size_t(i)], m, std::log1p(m));
    os << line;
  }
}

}  // namespace foi
