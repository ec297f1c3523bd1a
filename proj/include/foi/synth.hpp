#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "foi/audio.hpp"
#include "foi/biquad.hpp"
#include "foi/fft.hpp"
#include "foi/rng.hpp"

namespace foi {

enum class SurfaceCondition { Dry, Wet, Slush, Snow };

inline std::string to_string(SurfaceCondition c) {
  switch (c) {
    case SurfaceCondition::Dry: return "dry";
    case SurfaceCondition::Wet: return "wet";
    case SurfaceCondition::Slush: return "slush";
    case SurfaceCondition::Snow: return "snow";
  }
  throw Error("unknown surface condition");
}

inline SurfaceCondition condition_from_string(const std::string& s) {
  if (s == "dry") return SurfaceCondition::Dry;
  if (s == "wet") return SurfaceCondition::Wet;
  if (s == "slush") return SurfaceCondition::Slush;
  if (s == "snow") return SurfaceCondition::Snow;
  throw Error("unknown surface condition '" + s + "'");
}

inline bool is_abnormal(SurfaceCondition c) { return c != SurfaceCondition::Dry; }

// When and where vehicles actually passed, plus the weather the file was
// recorded under. Dry files are the normal class.
struct GroundTruthLabel {
  std::vector<std::pair<double, double>> intervals;  // (start_s, end_s)
  SurfaceCondition condition = SurfaceCondition::Dry;
};

inline void save_labels(const GroundTruthLabel& label, const std::string& path) {
  nlohmann::json j;
  j["condition"] = to_string(label.condition);
  j["intervals"] = nlohmann::json::array();
  for (const auto& [s, e] : label.intervals) j["intervals"].push_back({s, e});
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("save_labels: cannot open '" + path + "'");
  f << j.dump(2) << "\n";
}

inline GroundTruthLabel load_labels(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("load_labels: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("load_labels: '" + path + "': " + e.what());
  }
  GroundTruthLabel label;
  label.condition = condition_from_string(j.at("condition").get<std::string>());
  for (const auto& iv : j.at("intervals"))
    label.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  for (std::size_t i = 0; i < label.intervals.size(); ++i) {
    const auto& [s, e] = label.intervals[i];
    if (!(s >= 0.0 && s < e))
      throw Error("load_labels: '" + path + "' has a malformed interval");
    if (i > 0 && s < label.intervals[i - 1].second)
      throw Error("load_labels: '" + path + "' has unsorted or overlapping intervals");
  }
  return label;
}

// Recipe for one synthetic recording. The wind model is a harmonic comb at
// multiples of wind_base_hz (the resonance signature the notch bank
// targets) riding on a pink low-passed broadband bed; gusts swell the comb,
// the bed only wanders slowly. Driving events are band-limited noise bursts
// with a Hann temporal envelope; abnormal surfaces tilt the event spectrum.
struct SynthSpec {
  double duration_s = 130.0;
  int n_events = 5;
  std::pair<double, double> event_band{300.0, 8000.0};
  double wind_level = 0.05;  // baseline wind RMS
  double wind_cutoff_hz = 3000.0;
  SurfaceCondition condition = SurfaceCondition::Dry;
  std::uint64_t rng_seed = 0;
  int sample_rate = 44100;

  double event_gain = 0.25;   // event RMS at the envelope peak
  double min_gap_s = 15.0;    // minimum spacing between event centers
  double edge_margin_s = 10.0;
  double wind_base_hz = 21.5;
  int wind_harmonics = 60;
  double comb_fraction = 0.9;  // share of baseline wind power in the comb
  int n_gusts = 2;               // standalone gusts, placed on the event slot grid
  double gust_gain = 6.0;        // comb swell factor at a gust peak
  double event_gust_prob = 0.0;  // chance a gust rides on top of an event
};

inline void validate(const SynthSpec& spec) {
  if (spec.sample_rate <= 0) throw Error("synth spec: sample_rate must be positive");
  if (spec.duration_s <= 0.0) throw Error("synth spec: duration_s must be positive");
  if (spec.n_events < 0) throw Error("synth spec: n_events must be >= 0");
  if (spec.event_band.first <= 0.0 || spec.event_band.second <= spec.event_band.first ||
      spec.event_band.second >= spec.sample_rate / 2.0)
    throw Error("synth spec: event_band must lie inside (0, sample_rate/2)");
  if (spec.wind_level < 0.0) throw Error("synth spec: wind_level must be >= 0");
  if (spec.wind_cutoff_hz <= 0.0 || spec.wind_cutoff_hz >= spec.sample_rate / 2.0)
    throw Error("synth spec: wind_cutoff_hz must lie inside (0, sample_rate/2)");
  if (spec.comb_fraction < 0.0 || spec.comb_fraction > 1.0)
    throw Error("synth spec: comb_fraction must be in [0, 1]");
}

namespace synth_detail {

// Jittered grid keeping adjacent centers at least min_gap_s apart.
inline std::vector<double> place_centers(const SynthSpec& spec, int n, Rng& rng) {
  if (n == 0) return {};
  const double usable = spec.duration_s - 2.0 * spec.edge_margin_s;
  if (usable < 0.0)
    throw Error("synth: events cannot fit in duration " + std::to_string(spec.duration_s) +
                " s with min gap " + std::to_string(spec.min_gap_s) + " s");
  std::vector<double> centers;
  if (n == 1) {
    centers.push_back(spec.edge_margin_s + usable * rng.uniform());
    return centers;
  }
  const double slot = usable / n;
  if (slot < spec.min_gap_s)
    throw Error("synth: events cannot fit in duration " + std::to_string(spec.duration_s) +
                " s with min gap " + std::to_string(spec.min_gap_s) + " s");
  const double jitter = (slot - spec.min_gap_s) / 2.0;
  for (int i = 0; i < n; ++i)
    centers.push_back(spec.edge_margin_s + (i + 0.5) * slot +
                      jitter * rng.uniform(-1.0, 1.0));
  return centers;
}

inline double condition_tilt_db_per_octave(SurfaceCondition c) {
  switch (c) {
    case SurfaceCondition::Dry: return 0.0;
    case SurfaceCondition::Wet: return 6.0;    // high-frequency splash emphasis
    case SurfaceCondition::Slush: return -6.0;
    case SurfaceCondition::Snow: return -12.0;  // muffled
  }
  return 0.0;
}

// Band-limited noise burst shaped in the frequency domain, Hann envelope in
// time. Returned segment has RMS `amp` at the envelope peak region.
inline std::vector<double> make_event(const SynthSpec& spec, double dur_s, double amp,
                                      Rng& rng) {
  const std::size_t len = std::size_t(std::llround(dur_s * spec.sample_rate));
  const std::size_t padded = next_pow2(std::max<std::size_t>(len, 2));
  const double bin_hz = double(spec.sample_rate) / double(padded);
  const double pivot = std::sqrt(spec.event_band.first * spec.event_band.second);
  const double tilt = condition_tilt_db_per_octave(spec.condition);

  std::vector<std::complex<double>> half(padded / 2 + 1, {0.0, 0.0});
  for (std::size_t i = 1; i < half.size(); ++i) {
    const double f = double(i) * bin_hz;
    if (f < spec.event_band.first || f > spec.event_band.second) continue;
    const double w = std::pow(10.0, tilt * std::log2(f / pivot) / 20.0);
    half[i] = {rng.normal() * w, rng.normal() * w};
  }
  std::vector<double> x = real_ifft(half, padded);
  x.resize(len);

  const double r = rms(x);
  const double scale = r > 0.0 ? amp / r : 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double env = len > 1
        ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(len - 1))
        : 1.0;
    x[i] *= scale * env;
  }
  return x;
}

struct Gust {
  double center_s, width_s, height;
};

}  // namespace synth_detail

// Deterministic synthetic recording plus its ground truth. Identical specs
// (including seed) produce bit-identical output.
inline std::pair<AudioBuffer, GroundTruthLabel> synth_corpus(const SynthSpec& spec) {
  using namespace synth_detail;
  validate(spec);
  Rng rng(spec.rng_seed);

  const std::size_t n = std::size_t(std::llround(spec.duration_s * spec.sample_rate));
  AudioBuffer buf;
  buf.sample_rate = spec.sample_rate;
  buf.samples.assign(n, 0.0);
  GroundTruthLabel label;
  label.condition = spec.condition;

  // Events and standalone gusts share one slot grid, so a gust never sits
  // closer than min_gap_s to an event and its envelope bump survives
  // distance pruning on its own.
  const int n_gust_slots =
      (spec.wind_level > 0.0 && spec.n_gusts > 0) ? spec.n_gusts : 0;
  const std::vector<double> slots =
      place_centers(spec, spec.n_events + n_gust_slots, rng);
  std::vector<std::size_t> slot_index(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slot_index[i] = i;
  rng.shuffle(slot_index);
  std::vector<bool> is_gust_slot(slots.size(), false);
  for (int g = 0; g < n_gust_slots; ++g) is_gust_slot[slot_index[std::size_t(g)]] = true;
  std::vector<double> centers, gust_centers;
  for (std::size_t i = 0; i < slots.size(); ++i)
    (is_gust_slot[i] ? gust_centers : centers).push_back(slots[i]);

  // Driving events, each possibly with a gust riding on it (the gust is
  // applied to the wind comb below; it lands inside the event's crop).
  std::vector<Gust> gusts;
  for (double c : centers) {
    const double dur = rng.uniform(2.0, 4.0);
    const double amp = spec.event_gain * rng.uniform(0.8, 1.2);
    const std::vector<double> ev = make_event(spec, dur, amp, rng);
    const std::ptrdiff_t start =
        std::llround((c - dur / 2.0) * spec.sample_rate);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::ptrdiff_t idx = start + std::ptrdiff_t(i);
      if (idx >= 0 && std::size_t(idx) < n) buf.samples[std::size_t(idx)] += ev[i];
    }
    label.intervals.emplace_back(c - dur / 2.0, c + dur / 2.0);
    if (spec.event_gust_prob > 0.0 && rng.uniform() < spec.event_gust_prob)
      gusts.push_back({c + rng.uniform(-1.5, 1.5), rng.uniform(5.0, 8.0),
                       spec.gust_gain * rng.uniform(0.8, 1.2)});
  }
  std::sort(label.intervals.begin(), label.intervals.end());

  if (spec.wind_level > 0.0) {
    // Comb: harmonics of wind_base_hz below both Nyquist and the wind cutoff,
    // pink-weighted (power ~ 1/k), gust-modulated.
    // Gusts only swell harmonics 4 and up: a gust's amplitude-modulation
    // sidebands span a few tenths of a hertz, which the sub-hertz notches
    // at the lowest harmonics could not contain. The low harmonics drone
    // steadily instead.
    constexpr int kFirstGustyHarmonic = 4;
    std::vector<double> harm_freq, harm_amp, phase;
    std::vector<bool> harm_gusty;
    double power_sum = 0.0;
    for (int k = 1; k <= spec.wind_harmonics; ++k) {
      const double f = spec.wind_base_hz * k;
      if (f >= spec.wind_cutoff_hz || f >= 0.95 * spec.sample_rate / 2.0) break;
      harm_freq.push_back(f);
      harm_amp.push_back(1.0 / std::sqrt(double(k)));
      harm_gusty.push_back(k >= kFirstGustyHarmonic);
      power_sum += harm_amp.back() * harm_amp.back() / 2.0;
    }
    const double comb_rms = spec.wind_level * std::sqrt(spec.comb_fraction);
    const double comb_scale = power_sum > 0.0 ? comb_rms / std::sqrt(power_sum) : 0.0;
    for (double& a : harm_amp) a *= comb_scale;
    phase.reserve(harm_freq.size());
    for (std::size_t k = 0; k < harm_freq.size(); ++k)
      phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));

    // Standalone gusts at their reserved slots. Slow swells keep the
    // modulation sidebands inside the notch bandwidths.
    for (double t : gust_centers)
      gusts.push_back({t, rng.uniform(12.0, 16.0),
                       spec.gust_gain * rng.uniform(0.8, 1.2)});

    // Bed wander, a slow +-20% drift.
    const double wf1 = rng.uniform(0.015, 0.03), wp1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double wf2 = rng.uniform(0.04, 0.08), wp2 = rng.uniform(0.0, 2.0 * std::numbers::pi);

    // Broadband bed: white -> pinking filter -> 4th-order Butterworth
    // low-pass at the cutoff, normalized afterwards.
    std::vector<double> bed(n);
    {
      double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
      BiquadChain lp({design_lowpass(spec.wind_cutoff_hz, 0.54119610, spec.sample_rate),
                      design_lowpass(spec.wind_cutoff_hz, 1.30656296, spec.sample_rate)});
      for (std::size_t i = 0; i < n; ++i) {
        const double white = rng.uniform(-1.0, 1.0) * 1.7320508075688772;
        b0 = 0.99886 * b0 + white * 0.0555179;
        b1 = 0.99332 * b1 + white * 0.0750759;
        b2 = 0.96900 * b2 + white * 0.1538520;
        b3 = 0.86650 * b3 + white * 0.3104856;
        b4 = 0.55000 * b4 + white * 0.5329522;
        b5 = -0.7616 * b5 - white * 0.0168980;
        const double pink = (b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362) * 0.11;
        b6 = white * 0.115926;
        bed[i] = lp.process(pink);
      }
      const double bed_target = spec.wind_level * std::sqrt(1.0 - spec.comb_fraction);
      const double r = rms(bed);
      const double s = r > 0.0 ? bed_target / r : 0.0;
      for (double& v : bed) v *= s;
    }

    // Mix comb and bed into the signal.
    std::vector<double> ph_re(harm_freq.size()), ph_im(harm_freq.size());
    std::vector<double> rot_re(harm_freq.size()), rot_im(harm_freq.size());
    for (std::size_t k = 0; k < harm_freq.size(); ++k) {
      ph_re[k] = std::cos(phase[k]);
      ph_im[k] = std::sin(phase[k]);
      const double w = 2.0 * std::numbers::pi * harm_freq[k] / spec.sample_rate;
      rot_re[k] = std::cos(w);
      rot_im[k] = std::sin(w);
    }
    const double dt = 1.0 / spec.sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = double(i) * dt;
      double comb_steady = 0.0, comb_gusty = 0.0;
      for (std::size_t k = 0; k < harm_freq.size(); ++k) {
        (harm_gusty[k] ? comb_gusty : comb_steady) += harm_amp[k] * ph_im[k];
        const double re = ph_re[k] * rot_re[k] - ph_im[k] * rot_im[k];
        ph_im[k] = ph_re[k] * rot_im[k] + ph_im[k] * rot_re[k];
        ph_re[k] = re;
      }
      if ((i & 0x3fff) == 0x3fff) {  // keep phasors on the unit circle
        for (std::size_t k = 0; k < harm_freq.size(); ++k) {
          const double inv = 1.0 / std::sqrt(ph_re[k] * ph_re[k] + ph_im[k] * ph_im[k]);
          ph_re[k] *= inv;
          ph_im[k] *= inv;
        }
      }
      double gust = 1.0;
      for (const Gust& g : gusts) {
        const double d = std::abs(t - g.center_s);
        if (d < g.width_s / 2.0)
          gust += g.height *
                  (0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * d / g.width_s));
      }
      const double wander = 1.0 + 0.12 * std::sin(2.0 * std::numbers::pi * wf1 * t + wp1) +
                            0.08 * std::sin(2.0 * std::numbers::pi * wf2 * t + wp2);
      buf.samples[i] += comb_steady + comb_gusty * gust + bed[i] * wander;
    }
  }

  if (!all_finite(buf.samples)) throw Error("synth: produced non-finite samples");
  return {std::move(buf), std::move(label)};
}

}  // namespace foi
