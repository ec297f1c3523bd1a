#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "foi/biquad.hpp"

namespace foi {

// Harmonic notch bank parameters. Defaults follow the deployed setup:
// first harmonic 21.5 Hz, 60 harmonics.
struct NotchSpec {
  double base_hz = 21.5;
  int n_harmonics = 60;
  double q = 30.0;
  int sample_rate = 44100;
};

inline void validate(const NotchSpec& spec) {
  if (spec.sample_rate <= 0) throw Error("notch spec: sample_rate must be positive");
  if (spec.base_hz <= 0.0) throw Error("notch spec: base_hz must be positive");
  if (spec.n_harmonics < 1) throw Error("notch spec: n_harmonics must be >= 1");
  if (spec.q <= 0.0) throw Error("notch spec: q must be positive");
  if (spec.base_hz * spec.n_harmonics >= spec.sample_rate / 2.0)
    throw Error("notch spec: highest harmonic " +
                std::to_string(spec.base_hz * spec.n_harmonics) +
                " Hz is at or above Nyquist");
}

// Realized filter cascade: one-pole DC blocker plus one notch section per
// harmonic, applied causally in sequence.
struct NotchBank {
  std::vector<Biquad> sections;  // index k -> notch at (k+1) * base_hz
  double dc_r = 0.995;           // DC blocker pole radius
  NotchSpec spec;

  double center_hz(std::size_t k) const { return spec.base_hz * double(k + 1); }
};

inline NotchBank design_notch_bank(const NotchSpec& spec) {
  validate(spec);
  NotchBank bank;
  bank.spec = spec;
  bank.sections.reserve(std::size_t(spec.n_harmonics));
  for (int k = 1; k <= spec.n_harmonics; ++k) {
    Biquad s = design_notch(spec.base_hz * k, spec.q, spec.sample_rate);
    if (!s.stable())
      throw Error("notch design produced an unstable section at " +
                  std::to_string(spec.base_hz * k) + " Hz");
    bank.sections.push_back(s);
  }
  return bank;
}

// Magnitude response of the full cascade in dB at one frequency.
// Exact zeros (DC, harmonic centers) evaluate to -inf.
inline double response_db(const NotchBank& bank, double freq_hz) {
  if (freq_hz < 0.0 || freq_hz >= bank.spec.sample_rate / 2.0)
    throw Error("frequency_response: frequency " + std::to_string(freq_hz) +
                " Hz outside [0, Nyquist)");
  const double omega = 2.0 * std::numbers::pi * freq_hz / bank.spec.sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -omega);
  std::complex<double> h = (1.0 - z1) / (1.0 - bank.dc_r * z1);  // DC blocker
  for (const Biquad& s : bank.sections) h *= s.response_at(omega);
  return 20.0 * std::log10(std::abs(h));
}

inline std::vector<double> frequency_response(const NotchBank& bank,
                                              const std::vector<double>& freqs_hz) {
  std::vector<double> out;
  out.reserve(freqs_hz.size());
  for (double f : freqs_hz) out.push_back(response_db(bank, f));
  return out;
}

// Runs the cascade over a buffer: DC blocker first, then the notch
// sections in ascending harmonic order. Zero initial state, causal,
// output length equals input length.
inline AudioBuffer apply_reduction(const AudioBuffer& buffer, const NotchBank& bank) {
  validate(buffer, "apply_reduction");
  if (buffer.sample_rate != bank.spec.sample_rate)
    throw Error("apply_reduction: buffer rate " + std::to_string(buffer.sample_rate) +
                " does not match bank design rate " +
                std::to_string(bank.spec.sample_rate));
  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  out.samples.resize(buffer.samples.size());

  BiquadChain chain(bank.sections);
  double x1 = 0.0, y1 = 0.0;
  for (std::size_t i = 0; i < buffer.samples.size(); ++i) {
    const double x = buffer.samples[i];
    const double dc = x - x1 + bank.dc_r * y1;  // one-pole DC blocker
    x1 = x;
    y1 = dc;
    out.samples[i] = chain.process(dc);
  }
  return out;
}

// Coefficient dump for inspection, one row per section.
inline void export_coefficients_csv(const NotchBank& bank, std::ostream& os) {
  os << "section,center_hz,b0,b1,b2,a1,a2\n";
  char line[256];
  std::snprintf(line, sizeof line, "dc_blocker,0,1,-1,0,%.17g,0\n", -bank.dc_r);
  os << line;
  for (std::size_t k = 0; k < bank.sections.size(); ++k) {
    const Biquad& s = bank.sections[k];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  k + 1, bank.center_hz(k), s.b0, s.b1, s.b2, s.a1, s.a2);
    os << line;
  }
}

}  // namespace foi
