#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "foi/audio.hpp"
#include "foi/notch.hpp"
#include "foi/peaks.hpp"
#include "foi/stft.hpp"

namespace foi {

// A fixed-length crop around one detected vehicle pass.
struct DrivingEvent {
  AudioBuffer samples;
  double peak_time_s = 0.0;
  std::string source_id;
  double margin_s = 5.0;
};

inline std::string event_id(const DrivingEvent& ev) {
  return ev.source_id + "_" + std::to_string(std::llround(ev.peak_time_s * 1000.0));
}

// Maps peak frames to crops of exactly 2*margin_s centered on the frame
// time. Crops that would run past either end are shifted back inside, so
// every event has the same sample count.
inline std::vector<DrivingEvent> crop_events(const AudioBuffer& buffer,
                                             const std::vector<std::size_t>& peaks,
                                             const Spectrogram& geometry,
                                             double margin_s,
                                             const std::string& source_id = "") {
  if (margin_s <= 0.0) throw Error("crop_events: margin_s must be positive");
  const std::size_t len =
      std::size_t(std::llround(2.0 * margin_s * buffer.sample_rate));
  if (buffer.samples.size() < len)
    throw Error("crop_events: buffer of " + std::to_string(buffer.duration_s()) +
                " s cannot hold a " + std::to_string(2.0 * margin_s) + " s crop");

  std::vector<DrivingEvent> events;
  events.reserve(peaks.size());
  for (std::size_t p : peaks) {
    if (p >= geometry.frame_times.size())
      throw Error("crop_events: peak frame out of range");
    const double t = geometry.frame_times[p];
    std::ptrdiff_t start =
        std::llround(t * buffer.sample_rate) - std::ptrdiff_t(len) / 2;
    start = std::max<std::ptrdiff_t>(0, start);
    start = std::min<std::ptrdiff_t>(start, std::ptrdiff_t(buffer.samples.size() - len));

    DrivingEvent ev;
    ev.samples.sample_rate = buffer.sample_rate;
    ev.samples.samples.assign(buffer.samples.begin() + start,
                              buffer.samples.begin() + start + std::ptrdiff_t(len));
    ev.peak_time_s = t;
    ev.source_id = source_id;
    ev.margin_s = margin_s;
    events.push_back(std::move(ev));
  }
  return events;
}

struct ExtractConfig {
  NotchSpec notch;          // sample_rate field ignored; the buffer's is used
  int window_len = 4096;
  int hop_len = 1024;
  PeakParams peaks;
  double margin_s = 5.0;
  bool reduce_before = true;  // notch the signal before the envelope
  bool reduce_events = false; // notch the crops once more
};

struct ExtractResult {
  std::vector<DrivingEvent> events;
  Envelope envelope;        // smoothed envelope peaks were found on
  std::vector<std::size_t> peaks;
  double height_threshold = 0.0;
};

// Full extraction chain: (reduction) -> STFT -> mean magnitude -> Hann
// smoothing -> peak detection -> fixed-length crops. Crops are always cut
// from the raw signal; reduce_events filters the crops afterwards, which
// matches re-extracting them from noise-reduced audio.
inline ExtractResult extract(const AudioBuffer& buffer, const ExtractConfig& config,
                             const std::string& source_id = "") {
  validate(buffer, "extract");
  NotchSpec nspec = config.notch;
  nspec.sample_rate = buffer.sample_rate;

  ExtractResult result;
  Spectrogram spec;
  if (config.reduce_before) {
    const NotchBank bank = design_notch_bank(nspec);
    spec = stft(apply_reduction(buffer, bank), config.window_len, config.hop_len);
  } else {
    spec = stft(buffer, config.window_len, config.hop_len);
  }

  Envelope env = smooth_hann(mean_magnitude(spec), config.peaks.smooth_len_s);
  result.height_threshold =
      config.peaks.min_height ? *config.peaks.min_height
                              : adaptive_height(env.values, config.peaks.mad_multiplier);
  PeakParams resolved = config.peaks;
  resolved.min_height = result.height_threshold;
  result.peaks = detect_peaks(env, resolved);
  result.envelope = std::move(env);

  result.events = crop_events(buffer, result.peaks, spec, config.margin_s, source_id);
  if (config.reduce_events) {
    const NotchBank bank = design_notch_bank(nspec);
    for (DrivingEvent& ev : result.events)
      ev.samples = apply_reduction(ev.samples, bank);
  }
  return result;
}

}  // namespace foi
