#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "foi/notch.hpp"
#include "foi/rng.hpp"

using namespace foi;

namespace {

AudioBuffer sine(double hz, double secs, int fs, double amp = 1.0) {
  AudioBuffer b;
  b.sample_rate = fs;
  b.samples.resize(std::size_t(secs * fs));
  for (std::size_t i = 0; i < b.samples.size(); ++i)
    b.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * double(i) / fs);
  return b;
}

double measured_attenuation_db(const NotchBank& bank, double hz, double secs,
                               double discard_s) {
  const AudioBuffer in = sine(hz, secs, bank.spec.sample_rate);
  const AudioBuffer out = apply_reduction(in, bank);
  const std::size_t from = std::size_t(discard_s * bank.spec.sample_rate);
  return db(rms(out.samples, from) / rms(in.samples, from));
}

}  // namespace

TEST(NotchDesign, DefaultBankLayout) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  ASSERT_EQ(bank.sections.size(), 60u);
  EXPECT_DOUBLE_EQ(bank.center_hz(0), 21.5);
  EXPECT_DOUBLE_EQ(bank.center_hz(1), 43.0);
  EXPECT_DOUBLE_EQ(bank.center_hz(2), 64.5);
  EXPECT_DOUBLE_EQ(bank.center_hz(59), 1290.0);  // 21.5 * 60
  for (const Biquad& s : bank.sections) EXPECT_TRUE(s.stable());
}

TEST(NotchDesign, RejectsBadSpecs) {
  EXPECT_THROW(design_notch_bank({23000.0, 1, 30.0, 44100}), Error);  // above Nyquist
  EXPECT_THROW(design_notch_bank({400.0, 60, 30.0, 44100}), Error);   // 24 kHz top
  EXPECT_THROW(design_notch_bank({21.5, 60, -1.0, 44100}), Error);
  EXPECT_THROW(design_notch_bank({21.5, 0, 30.0, 44100}), Error);
  EXPECT_THROW(design_notch_bank({0.0, 60, 30.0, 44100}), Error);
}

TEST(NotchResponse, AnalyticAnchors) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  EXPECT_LE(response_db(bank, 0.0), -60.0);    // DC blocker zero at z=1
  EXPECT_LE(response_db(bank, 21.5), -40.0);   // first harmonic
  EXPECT_LE(response_db(bank, 1290.0), -40.0); // last harmonic
  EXPECT_NEAR(response_db(bank, 5000.0), 0.0, 1.0);
  EXPECT_THROW(response_db(bank, -1.0), Error);
  EXPECT_THROW(response_db(bank, 22050.0), Error);

  std::vector<double> r = frequency_response(bank, {21.5, 43.0, 5000.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LE(r[0], -40.0);
  EXPECT_LE(r[1], -40.0);
}

// Unity passband holds clear of the notch band: above it (>= ~1.4 kHz) and
// at the low-harmonic midpoints. Deep in the upper harmonic region the
// notch skirts overlap (bandwidth grows with frequency at constant Q), so
// inter-notch points there sag by a few dB and are not unity.
TEST(NotchResponse, PassbandWithinOneDb) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  for (double f : {96.75, 118.25, 139.75, 161.25, 182.75})  // midpoints, harmonics 4-9
    EXPECT_NEAR(response_db(bank, f), 0.0, 1.0) << f;
  for (double f = 1400.0; f < 22000.0; f += 97.0)
    EXPECT_NEAR(response_db(bank, f), 0.0, 1.0) << f;
}

TEST(NotchApply, SineAtFirstHarmonicAttenuatedAtLeast40Db) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  EXPECT_LE(measured_attenuation_db(bank, 21.5, 10.0, 1.0), -40.0);
}

TEST(NotchApply, SineFarFromNotchesPassesWithinOneDb) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  const double att = measured_attenuation_db(bank, 5000.0, 4.0, 1.0);
  EXPECT_NEAR(att, 0.0, 1.0);
  EXPECT_NEAR(att, response_db(bank, 5000.0), 0.1);
}

// Steady-state sine measurements agree with the analytic response where it
// is finite. Probes sit a quarter bandwidth off center: far enough for a
// finite analytic value, and for k >= 30 a full bandwidth would land on
// the neighboring harmonic's zero.
TEST(NotchApply, MeasuredMatchesAnalyticOnSkirts) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  for (int k : {1, 7, 30, 60}) {
    const double center = 21.5 * k;
    const double bw = center / 30.0;
    for (double f : {center - bw / 4.0, center + bw / 4.0}) {
      const double measured = measured_attenuation_db(bank, f, 8.0, 3.0);
      EXPECT_NEAR(measured, response_db(bank, f), 1.0) << "k=" << k << " f=" << f;
    }
  }
}

TEST(NotchApply, ZeroInZeroOut) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  AudioBuffer z;
  z.sample_rate = 44100;
  z.samples.assign(44100, 0.0);
  AudioBuffer out = apply_reduction(z, bank);
  ASSERT_EQ(out.samples.size(), z.samples.size());
  for (double v : out.samples) EXPECT_EQ(v, 0.0);
}

TEST(NotchApply, LengthPreservedAndErrors) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  AudioBuffer b = sine(100.0, 0.37, 44100);
  EXPECT_EQ(apply_reduction(b, bank).samples.size(), b.samples.size());

  AudioBuffer wrong_rate = sine(100.0, 0.1, 22050);
  EXPECT_THROW(apply_reduction(wrong_rate, bank), Error);

  AudioBuffer bad = sine(100.0, 0.1, 44100);
  bad.samples[10] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(apply_reduction(bad, bank), Error);
}

TEST(NotchApply, Linearity) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  Rng rng(3);
  AudioBuffer x, y;
  x.sample_rate = y.sample_rate = 44100;
  for (int i = 0; i < 20000; ++i) {
    x.samples.push_back(rng.uniform(-1.0, 1.0));
    y.samples.push_back(rng.uniform(-1.0, 1.0));
  }
  const double a = 0.7, b = -1.3;
  AudioBuffer mix;
  mix.sample_rate = 44100;
  for (std::size_t i = 0; i < x.samples.size(); ++i)
    mix.samples.push_back(a * x.samples[i] + b * y.samples[i]);

  AudioBuffer fx = apply_reduction(x, bank);
  AudioBuffer fy = apply_reduction(y, bank);
  AudioBuffer fmix = apply_reduction(mix, bank);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < fmix.samples.size(); ++i) {
    const double expected = a * fx.samples[i] + b * fy.samples[i];
    max_rel = std::max(max_rel, std::abs(fmix.samples[i] - expected) /
                                    std::max(1.0, std::abs(expected)));
  }
  EXPECT_LT(max_rel, 1e-9);
}

TEST(NotchApply, ImpulseResponseDecays) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  AudioBuffer imp;
  imp.sample_rate = 44100;
  imp.samples.assign(44100 * 10, 0.0);
  imp.samples[0] = 1.0;
  AudioBuffer out = apply_reduction(imp, bank);
  double tail = 0.0;
  for (std::size_t i = out.samples.size() - 44100; i < out.samples.size(); ++i)
    tail = std::max(tail, std::abs(out.samples[i]));
  EXPECT_LT(tail, 1e-8);
}

TEST(NotchApply, BroadbandEnergyMostlyPreserved) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  Rng rng(11);
  AudioBuffer wn;
  wn.sample_rate = 44100;
  wn.samples.resize(44100 * 5);
  for (double& s : wn.samples) s = rng.uniform(-1.0, 1.0);
  AudioBuffer out = apply_reduction(wn, bank);
  double ein = 0.0, eout = 0.0;
  for (double s : wn.samples) ein += s * s;
  for (double s : out.samples) eout += s * s;
  EXPECT_GE(eout / ein, 0.9);
}

TEST(NotchExport, CoefficientsCsv) {
  NotchBank bank = design_notch_bank(NotchSpec{});
  std::ostringstream os;
  export_coefficients_csv(bank, os);
  const std::string csv = os.str();
  std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(lines, 62u);  // header + dc blocker + 60 sections
  EXPECT_NE(csv.find("dc_blocker"), std::string::npos);
  EXPECT_NE(csv.find("1290"), std::string::npos);
}
