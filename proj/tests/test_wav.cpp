#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "foi/wav.hpp"

using namespace foi;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("foi_wav_test_" + name)).string();
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char(v >> 8));
}
void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}

// Hand-built RIFF writer, independent of save_wav, so the reader is tested
// against raw bytes.
std::string raw_wav_16(const std::vector<std::int16_t>& samples, int channels,
                       int rate, std::uint16_t format_tag = 1) {
  std::string s;
  const std::uint32_t data_len = std::uint32_t(samples.size()) * 2;
  s.append("RIFF");
  put_u32(s, 36 + data_len);
  s.append("WAVE");
  s.append("fmt ");
  put_u32(s, 16);
  put_u16(s, format_tag);
  put_u16(s, std::uint16_t(channels));
  put_u32(s, std::uint32_t(rate));
  put_u32(s, std::uint32_t(rate * channels * 2));
  put_u16(s, std::uint16_t(channels * 2));
  put_u16(s, 16);
  s.append("data");
  put_u32(s, data_len);
  for (std::int16_t v : samples) put_u16(s, std::uint16_t(v));
  return s;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), std::streamsize(bytes.size()));
}

}  // namespace

TEST(Wav, Int16FullScale) {
  const std::string path = temp_path("fullscale.wav");
  write_file(path, raw_wav_16({32767, -32768, 0}, 1, 44100));
  AudioBuffer buf = load_wav(path);
  ASSERT_EQ(buf.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(buf.samples[0], 32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(buf.samples[1], -1.0);
  EXPECT_DOUBLE_EQ(buf.samples[2], 0.0);
  EXPECT_EQ(buf.sample_rate, 44100);
}

TEST(Wav, StereoDownmixByMean) {
  const std::string path = temp_path("stereo.wav");
  write_file(path, raw_wav_16({16384, -16384, 8192, 8192}, 2, 22050));
  AudioBuffer buf = load_wav(path);
  ASSERT_EQ(buf.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(buf.samples[0], 0.0);
  EXPECT_DOUBLE_EQ(buf.samples[1], 8192.0 / 32768.0);
}

TEST(Wav, Float32RoundTrip) {
  AudioBuffer buf;
  buf.sample_rate = 44100;
  buf.samples.resize(44100);
  for (std::size_t i = 0; i < buf.samples.size(); ++i)
    buf.samples[i] = std::sin(2.0 * std::numbers::pi * 440.0 * double(i) / 44100.0);

  const std::string path = temp_path("roundtrip.wav");
  save_wav(buf, path);
  AudioBuffer back = load_wav(path);
  ASSERT_EQ(back.samples.size(), buf.samples.size());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < buf.samples.size(); ++i)
    max_diff = std::max(max_diff, std::abs(back.samples[i] - buf.samples[i]));
  EXPECT_LT(max_diff, 1e-6);
}

TEST(Wav, RoundTripPreservesCountExactly) {
  AudioBuffer buf;
  buf.sample_rate = 8000;
  buf.samples.assign(12345, 0.25);
  const std::string path = temp_path("count.wav");
  save_wav(buf, path);
  EXPECT_EQ(load_wav(path).samples.size(), 12345u);
}

TEST(Wav, SaveRejectsEmptyAndNonFinite) {
  AudioBuffer empty;
  empty.sample_rate = 44100;
  EXPECT_THROW(save_wav(empty, temp_path("empty.wav")), Error);

  AudioBuffer nan_buf;
  nan_buf.sample_rate = 44100;
  nan_buf.samples = {0.0, std::nan(""), 0.0};
  EXPECT_THROW(save_wav(nan_buf, temp_path("nan.wav")), Error);
}

TEST(Wav, LoadErrors) {
  EXPECT_THROW(load_wav(temp_path("does_not_exist.wav")), Error);

  const std::string compressed = temp_path("compressed.wav");
  write_file(compressed, raw_wav_16({0, 0}, 1, 44100, /*format_tag=*/2));
  EXPECT_THROW(load_wav(compressed), Error);

  const std::string empty_data = temp_path("empty_data.wav");
  write_file(empty_data, raw_wav_16({}, 1, 44100));
  EXPECT_THROW(load_wav(empty_data), Error);

  const std::string not_riff = temp_path("not_riff.wav");
  write_file(not_riff, "definitely not a wav file");
  EXPECT_THROW(load_wav(not_riff), Error);
}

// 10 minutes at 44.1 kHz comes out to exactly 26,460,000 samples.
TEST(Wav, TenMinuteFileSampleCount) {
  const std::string path = temp_path("ten_minutes.wav");
  {
    std::string header = raw_wav_16({}, 1, 44100);
    // patch the data chunk length, then append zeros
    const std::uint32_t n = 26460000;
    const std::uint32_t data_len = n * 2;
    std::uint32_t riff_len = 36 + data_len;
    std::memcpy(header.data() + 4, &riff_len, 4);
    std::memcpy(header.data() + 40, &data_len, 4);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(header.data(), std::streamsize(header.size()));
    std::vector<char> zeros(1 << 20, 0);
    std::uint64_t remaining = std::uint64_t(data_len);
    while (remaining > 0) {
      const std::uint64_t chunk = std::min<std::uint64_t>(remaining, zeros.size());
      f.write(zeros.data(), std::streamsize(chunk));
      remaining -= chunk;
    }
  }
  AudioBuffer buf = load_wav(path);
  EXPECT_EQ(buf.samples.size(), 26460000u);
  EXPECT_NEAR(buf.duration_s(), 600.0, 1e-9);
  fs::remove(path);
}
