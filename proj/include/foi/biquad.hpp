#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "foi/audio.hpp"

namespace foi {

// Second-order IIR section, coefficients normalized so a0 = 1.
// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  // Poles strictly inside the unit circle (stability triangle).
  bool stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

  std::complex<double> response_at(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = std::polar(1.0, -2.0 * omega);
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

// Constrained notch: zeros pinned on the unit circle at the center
// frequency, poles at the same angle just inside. Unity gain at DC and
// Nyquist by construction. Q is center frequency over -3 dB bandwidth.
inline Biquad design_notch(double center_hz, double q, int sample_rate) {
  const double omega = 2.0 * std::numbers::pi * center_hz / sample_rate;
  const double alpha = std::sin(omega) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(omega) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = s.b1;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

inline Biquad design_lowpass(double cutoff_hz, double q, int sample_rate) {
  const double omega = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double alpha = std::sin(omega) / (2.0 * q);
  const double c = std::cos(omega);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 - c) / 2.0 / a0;
  s.b1 = (1.0 - c) / a0;
  s.b2 = s.b0;
  s.a1 = -2.0 * c / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

inline Biquad design_highpass(double cutoff_hz, double q, int sample_rate) {
  const double omega = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double alpha = std::sin(omega) / (2.0 * q);
  const double c = std::cos(omega);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 + c) / 2.0 / a0;
  s.b1 = -(1.0 + c) / a0;
  s.b2 = s.b0;
  s.a1 = -2.0 * c / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

// Direct form II transposed, per-call state, double accumulation.
class BiquadChain {
 public:
  explicit BiquadChain(const std::vector<Biquad>& sections)
      : sections_(sections), s1_(sections.size(), 0.0), s2_(sections.size(), 0.0) {}

  double process(double x) {
    for (std::size_t k = 0; k < sections_.size(); ++k) {
      const Biquad& c = sections_[k];
      const double y = c.b0 * x + s1_[k];
      s1_[k] = c.b1 * x - c.a1 * y + s2_[k];
      s2_[k] = c.b2 * x - c.a2 * y;
      x = y;
    }
    return x;
  }

 private:
  std::vector<Biquad> sections_;
  std::vector<double> s1_, s2_;
};

}  // namespace foi
