#pragma once

#include <cmath>
#include <vector>

#include "foi/events.hpp"
#include "foi/stft.hpp"

namespace foi {

struct FeatureConfig {
  int window_len = 1024;
  int hop_len = 512;
  double margin_s = 5.0;  // expected crop half-length
};

// Fixed-length spectral signature of one event: STFT, magnitude averaged
// over time per bin, then log1p. Length is window_len/2 + 1.
inline std::vector<double> featurize(const DrivingEvent& event, const FeatureConfig& config) {
  const std::size_t expected = std::size_t(
      std::llround(2.0 * config.margin_s * event.samples.sample_rate));
  if (event.samples.samples.size() != expected)
    throw Error("featurize: event length " + std::to_string(event.samples.samples.size()) +
                " does not match configured crop of " + std::to_string(expected) +
                " samples");
  const Spectrogram spec = stft(event.samples, config.window_len, config.hop_len);
  std::vector<double> feature(std::size_t(spec.n_bins()));
  for (Eigen::Index i = 0; i < spec.n_bins(); ++i)
    feature[std::size_t(i)] = std::log1p(spec.magnitudes.col(i).mean());
  return feature;
}

}  // namespace foi
