#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "foi/audio.hpp"

namespace foi {

namespace wav_detail {

inline std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | (p[1] << 8));
}
inline std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}
inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

}  // namespace wav_detail

// Reads a PCM WAV file (16-bit integer or 32-bit IEEE float, 1 or 2
// channels). Stereo is downmixed by channel mean; integer samples are
// scaled by 1/32768 so full scale maps just inside [-1, 1].
inline AudioBuffer load_wav(const std::string& path) {
  using namespace wav_detail;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_wav: cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error("load_wav: '" + path + "' is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    std::uint32_t len = read_u32(bytes.data() + pos + 4);
    std::size_t body = pos + 8;
    if (body + len > bytes.size()) len = std::uint32_t(bytes.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      if (format == 0xfffe && len >= 40) format = read_u16(f + 24);  // extensible: first GUID bytes
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw Error("load_wav: '" + path + "' has no fmt chunk");
  if (format != 1 && format != 3)
    throw Error("load_wav: '" + path + "' uses a compressed or unsupported encoding");
  if (channels < 1 || channels > 2)
    throw Error("load_wav: '" + path + "' has unsupported channel count " +
                std::to_string(channels));
  if ((format == 1 && bits != 16) || (format == 3 && bits != 32))
    throw Error("load_wav: '" + path + "' has unsupported sample width " +
                std::to_string(bits));
  if (data == nullptr || data_len == 0)
    throw Error("load_wav: '" + path + "' has an empty data chunk");
  if (rate == 0) throw Error("load_wav: '" + path + "' has zero sample rate");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t n_frames = data_len / frame_size;
  if (n_frames == 0) throw Error("load_wav: '" + path + "' has an empty data chunk");

  AudioBuffer buf;
  buf.sample_rate = int(rate);
  buf.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * frame_size + c * bytes_per_sample;
      if (format == 1) {
        std::int16_t v = std::int16_t(read_u16(p));
        acc += double(v) / 32768.0;
      } else {
        float v;
        std::uint32_t raw = read_u32(p);
        std::memcpy(&v, &raw, 4);
        acc += double(v);
      }
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

// Writes a mono 32-bit IEEE float PCM WAV. Rejects empty or non-finite
// buffers; a round trip through load_wav is exact to float32 rounding.
inline void save_wav(const AudioBuffer& buf, const std::string& path) {
  using namespace wav_detail;
  if (buf.samples.empty()) throw Error("save_wav: refusing to write an empty buffer");
  validate(buf, "save_wav");

  const std::uint32_t n = std::uint32_t(buf.samples.size());
  const std::uint32_t data_len = n * 4;
  std::string out;
  out.reserve(60 + data_len);
  out.append("RIFF");
  put_u32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_len));
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 18);
  put_u16(out, 3);  // IEEE float
  put_u16(out, 1);  // mono
  put_u32(out, std::uint32_t(buf.sample_rate));
  put_u32(out, std::uint32_t(buf.sample_rate) * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  put_u16(out, 0);  // cbSize
  out.append("fact");
  put_u32(out, 4);
  put_u32(out, n);
  out.append("data");
  put_u32(out, data_len);
  for (double s : buf.samples) {
    float v = float(s);
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    put_u32(out, raw);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("save_wav: cannot open '" + path + "' for writing");
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw Error("save_wav: write failed for '" + path + "'");
}

}  // namespace foi
