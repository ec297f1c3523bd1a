#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "foi/audio.hpp"

namespace foi {

// Forward real FFT, one-sided spectrum (n/2 + 1 bins).
inline std::vector<std::complex<double>> real_fft(const std::vector<double>& x) {
  if (x.empty()) throw Error("real_fft: empty input");
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, x);
  return spectrum;
}

// Inverse of a one-sided spectrum back to n real samples.
inline std::vector<double> real_ifft(const std::vector<std::complex<double>>& half,
                                     std::size_t n) {
  if (half.size() != n / 2 + 1) throw Error("real_ifft: spectrum size mismatch");
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> x;
  fft.inv(x, half, Eigen::Index(n));
  return x;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace foi
