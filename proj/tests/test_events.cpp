#include <gtest/gtest.h>

#include <cmath>

#include "foi/events.hpp"
#include "foi/metrics.hpp"
#include "foi/synth.hpp"

using namespace foi;

namespace {

// 30 s ramp at 1 kHz with a spectrogram whose frame centers land on
// exact tenths of a second (window 1000, hop 500).
struct RampFixture {
  AudioBuffer buf;
  Spectrogram spec;

  RampFixture() {
    buf.sample_rate = 1000;
    buf.samples.resize(30000);
    for (std::size_t i = 0; i < buf.samples.size(); ++i)
      buf.samples[i] = double(i) * 1e-6;
    spec = stft(buf, 1000, 500);
  }

  std::size_t frame_at(double t) const {
    for (std::size_t i = 0; i < spec.frame_times.size(); ++i)
      if (std::abs(spec.frame_times[i] - t) < 1e-9) return i;
    throw Error("no frame at requested time");
  }
};

}  // namespace

TEST(CropEvents, CenteredWindow) {
  RampFixture fx;
  // frame centered at exactly 15.0 s
  auto events = crop_events(fx.buf, {fx.frame_at(15.0)}, fx.spec, 5.0, "ramp");
  ASSERT_EQ(events.size(), 1u);
  const DrivingEvent& ev = events[0];
  EXPECT_EQ(ev.samples.samples.size(), 10000u);  // exactly 10 s
  EXPECT_DOUBLE_EQ(ev.peak_time_s, 15.0);
  // covers [10 s, 20 s): first sample is buffer[10000]
  EXPECT_DOUBLE_EQ(ev.samples.samples.front(), fx.buf.samples[10000]);
  EXPECT_DOUBLE_EQ(ev.samples.samples.back(), fx.buf.samples[19999]);
  EXPECT_EQ(ev.source_id, "ramp");
}

TEST(CropEvents, BoundaryClampKeepsFullLength) {
  RampFixture fx;
  // a peak 2 s into the file: window shifts to [0 s, 10 s)
  auto events = crop_events(fx.buf, {fx.frame_at(2.0)}, fx.spec, 5.0);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].samples.samples.size(), 10000u);
  EXPECT_DOUBLE_EQ(events[0].samples.samples.front(), fx.buf.samples[0]);

  // and near the end: [20 s, 30 s)
  events = crop_events(fx.buf, {fx.frame_at(29.0)}, fx.spec, 5.0);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_DOUBLE_EQ(events[0].samples.samples.back(), fx.buf.samples.back());
}

TEST(CropEvents, BufferShorterThanCropIsError) {
  AudioBuffer b;
  b.sample_rate = 1000;
  b.samples.assign(8000, 0.0);  // 8 s
  Spectrogram spec = stft(b, 1000, 500);
  EXPECT_THROW(crop_events(b, {3}, spec, 5.0), Error);
}

TEST(CropEvents, CountAndUniformLength) {
  RampFixture fx;
  auto events =
      crop_events(fx.buf, {fx.frame_at(5.0), fx.frame_at(15.0), fx.frame_at(25.0)},
                  fx.spec, 2.5);
  ASSERT_EQ(events.size(), 3u);
  for (const auto& ev : events) EXPECT_EQ(ev.samples.samples.size(), 5000u);
  EXPECT_THROW(crop_events(fx.buf, {999999}, fx.spec, 2.5), Error);
  EXPECT_THROW(crop_events(fx.buf, {3}, fx.spec, 0.0), Error);
}

TEST(Extract, SilenceYieldsNoEvents) {
  AudioBuffer z;
  z.sample_rate = 22050;
  z.samples.assign(22050 * 30, 0.0);
  ExtractConfig cfg;
  ExtractResult r = extract(z, cfg, "silence");
  EXPECT_TRUE(r.events.empty());
}

// On a gusty synthetic file, reduction recovers exactly the true events
// with centers within a second of ground truth; without reduction the
// gusts come through as extra extractions overlapping no true interval.
TEST(Extract, SyntheticFileWithAndWithoutReduction) {
  SynthSpec spec;
  spec.duration_s = 130.0;
  spec.n_events = 5;
  spec.n_gusts = 2;
  spec.gust_gain = 8.0;
  spec.wind_level = 0.16;
  spec.sample_rate = 22050;
  spec.rng_seed = 1234;
  auto [buf, truth] = synth_corpus(spec);

  ExtractConfig with;
  with.reduce_before = true;
  ExtractResult reduced = extract(buf, with, "synthetic");
  ASSERT_EQ(reduced.events.size(), 5u);
  ASSERT_EQ(truth.intervals.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const double truth_center =
        (truth.intervals[i].first + truth.intervals[i].second) / 2.0;
    EXPECT_NEAR(reduced.events[i].peak_time_s, truth_center, 1.0);
  }
  EXPECT_EQ(match_events(reduced.events, truth).n_true, 5u);

  ExtractConfig without;
  without.reduce_before = false;
  ExtractResult raw = extract(buf, without, "synthetic");
  const PrecisionCounts counts = match_events(raw.events, truth);
  EXPECT_GT(counts.n_extracted, counts.n_true);  // at least one false extraction

  // and the false crop overlaps no true interval at all
  bool found_disjoint = false;
  for (const DrivingEvent& ev : raw.events) {
    const double lo = ev.peak_time_s - ev.margin_s, hi = ev.peak_time_s + ev.margin_s;
    bool overlaps = false;
    for (const auto& [s, e] : truth.intervals)
      if (lo < e && s < hi) overlaps = true;
    if (!overlaps) found_disjoint = true;
  }
  EXPECT_TRUE(found_disjoint);
}

TEST(Extract, ReduceEventsFiltersCrops) {
  SynthSpec spec;
  spec.duration_s = 70.0;
  spec.n_events = 2;
  spec.n_gusts = 0;
  spec.wind_level = 0.1;
  spec.sample_rate = 22050;
  spec.rng_seed = 5;
  auto [buf, truth] = synth_corpus(spec);

  ExtractConfig plain;
  plain.reduce_before = true;
  plain.reduce_events = false;
  ExtractConfig scrubbed = plain;
  scrubbed.reduce_events = true;

  ExtractResult a = extract(buf, plain, "x");
  ExtractResult b = extract(buf, scrubbed, "x");
  ASSERT_EQ(a.events.size(), b.events.size());
  ASSERT_FALSE(a.events.empty());
  // same peaks, but the scrubbed crops lost their wind comb
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.events[i].peak_time_s, b.events[i].peak_time_s);
    EXPECT_LT(rms(b.events[i].samples.samples), rms(a.events[i].samples.samples));
  }
}

TEST(Extract, Deterministic) {
  SynthSpec spec;
  spec.duration_s = 100.0;
  spec.n_events = 2;
  spec.wind_level = 0.05;
  spec.sample_rate = 22050;
  spec.rng_seed = 77;
  auto [buf, truth] = synth_corpus(spec);
  ExtractConfig cfg;
  ExtractResult a = extract(buf, cfg, "d");
  ExtractResult b = extract(buf, cfg, "d");
  EXPECT_EQ(a.peaks, b.peaks);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i)
    EXPECT_EQ(a.events[i].samples.samples, b.events[i].samples.samples);
}
