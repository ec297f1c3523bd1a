#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace foi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mono PCM signal. Samples are dimensionless amplitudes, nominally in
// [-1, 1]; all time-domain processing runs on this type.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void validate(const AudioBuffer& buf, const std::string& what = "audio buffer") {
  if (buf.sample_rate <= 0) throw Error(what + ": sample_rate must be positive");
  if (!all_finite(buf.samples)) throw Error(what + ": non-finite sample");
}

inline double rms(const std::vector<double>& v, std::size_t begin = 0,
                  std::size_t end = std::size_t(-1)) {
  if (end > v.size()) end = v.size();
  if (begin >= end) return 0.0;
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += v[i] * v[i];
  return std::sqrt(acc / double(end - begin));
}

inline double db(double ratio) { return 20.0 * std::log10(ratio); }

}  // namespace foi
