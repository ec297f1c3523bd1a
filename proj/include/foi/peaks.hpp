#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "foi/stft.hpp"

namespace foi {

// Peak detection knobs. Absent min_height means the adaptive rule
// median(env) + mad_multiplier * MAD(env).
struct PeakParams {
  std::optional<double> min_height;
  double mad_multiplier = 4.0;
  double min_distance_s = 10.0;
  double smooth_len_s = 2.0;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw Error("median: empty input");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid) - 1, v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

// median + k * MAD; robust to event frames occupying a minority of the file.
inline double adaptive_height(const std::vector<double>& values, double mad_multiplier) {
  const double med = median_of(values);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
  return med + mad_multiplier * median_of(dev);
}

// Strict local maxima; a flat plateau with lower neighbors on both sides
// counts once, at its midpoint (rounded down). Endpoints never qualify.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  const std::size_t n = v.size();
  std::size_t i = 1;
  while (n >= 3 && i < n - 1) {
    if (v[i] > v[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && v[j + 1] == v[i]) ++j;
      if (j + 1 < n && v[j + 1] < v[i]) {
        out.push_back((i + j) / 2);
        i = j + 1;
        continue;
      }
      i = j + 1;
      continue;
    }
    ++i;
  }
  return out;
}

// Local maxima filtered by height, then pruned so any two survivors are at
// least min_distance frames apart: the taller peak wins, ties go to the
// lower index. Result sorted ascending.
inline std::vector<std::size_t> detect_peaks_frames(const std::vector<double>& values,
                                                    double min_height,
                                                    double min_distance_frames) {
  std::vector<std::size_t> cand = local_maxima(values);
  std::erase_if(cand, [&](std::size_t i) { return values[i] < min_height; });

  if (min_distance_frames > 0.0 && cand.size() > 1) {
    std::vector<std::size_t> order(cand.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[cand[a]] != values[cand[b]]) return values[cand[a]] > values[cand[b]];
      return cand[a] < cand[b];
    });
    std::vector<bool> keep(cand.size(), false);
    std::vector<std::size_t> kept;
    for (std::size_t oi : order) {
      bool ok = true;
      for (std::size_t k : kept)
        if (std::abs(double(cand[oi]) - double(k)) < min_distance_frames) {
          ok = false;
          break;
        }
      if (ok) {
        keep[oi] = true;
        kept.push_back(cand[oi]);
      }
    }
    std::vector<std::size_t> pruned;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (keep[i]) pruned.push_back(cand[i]);
    cand = std::move(pruned);
  }
  return cand;
}

inline std::vector<std::size_t> detect_peaks(const Envelope& env, const PeakParams& params) {
  if (env.values.empty()) throw Error("detect_peaks: empty envelope");
  const double height = params.min_height ? *params.min_height
                                          : adaptive_height(env.values, params.mad_multiplier);
  const double step = env.frame_step();
  const double dist = step > 0.0 ? params.min_distance_s / step : 0.0;
  return detect_peaks_frames(env.values, height, dist);
}

}  // namespace foi
