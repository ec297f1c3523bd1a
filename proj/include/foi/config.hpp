#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "foi/events.hpp"
#include "foi/features.hpp"
#include "foi/ncae.hpp"

namespace foi {

// Every knob of the processing chain in one place. Filter defaults are the
// deployed values (21.5 Hz base, 60 harmonics); the rest are this
// project's documented choices.
struct PipelineConfig {
  NotchSpec notch;
  int stft_window = 4096;
  int stft_hop = 1024;
  PeakParams peaks;
  double margin_s = 5.0;
  bool reduce_before = true;
  bool reduce_events = false;
  int feature_window = 1024;
  int feature_hop = 512;
  TrainConfig train;

  ExtractConfig extract_config() const {
    ExtractConfig c;
    c.notch = notch;
    c.window_len = stft_window;
    c.hop_len = stft_hop;
    c.peaks = peaks;
    c.margin_s = margin_s;
    c.reduce_before = reduce_before;
    c.reduce_events = reduce_events;
    return c;
  }

  FeatureConfig feature_config() const {
    FeatureConfig c;
    c.window_len = feature_window;
    c.hop_len = feature_hop;
    c.margin_s = margin_s;
    return c;
  }

  // Stable serialization; equal configs hash equal.
  std::string canonical() const {
    char buf[2048];
    std::snprintf(buf, sizeof buf,
                  "notch.base_hz=%.17g\nnotch.harmonics=%d\nnotch.q=%.17g\n"
                  "stft.window=%d\nstft.hop=%d\n"
                  "peaks.smooth_s=%.17g\npeaks.min_dist_s=%.17g\npeaks.height=%s\n"
                  "peaks.mad_mult=%.17g\n"
                  "crop.margin_s=%.17g\n"
                  "pipeline.reduce_before=%d\npipeline.reduce_events=%d\n"
                  "model.feature_window=%d\nmodel.feature_hop=%d\n"
                  "model.hidden_layers=%d\nmodel.epochs=%d\nmodel.batch=%d\n"
                  "model.learning_rate=%.17g\nmodel.seed=%llu\n",
                  notch.base_hz, notch.n_harmonics, notch.q, stft_window, stft_hop,
                  peaks.smooth_len_s, peaks.min_distance_s,
                  peaks.min_height ? std::to_string(*peaks.min_height).c_str() : "adaptive",
                  peaks.mad_multiplier, margin_s, int(reduce_before), int(reduce_events),
                  feature_window, feature_hop, train.hidden_layers, train.epochs,
                  train.batch_size, train.learning_rate,
                  static_cast<unsigned long long>(train.seed));
    return buf;
  }
};

inline void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error("config: " + field + ": " + why);
  };
  if (c.notch.base_hz <= 0) fail("notch.base_hz", "must be positive");
  if (c.notch.n_harmonics < 1) fail("notch.harmonics", "must be >= 1");
  if (c.notch.q <= 0) fail("notch.q", "must be positive");
  if (c.stft_window <= 0) fail("stft.window", "must be positive");
  if (c.stft_hop <= 0 || c.stft_hop > c.stft_window)
    fail("stft.hop", "must be in (0, stft.window]");
  if (c.peaks.smooth_len_s <= 0) fail("peaks.smooth_s", "must be positive");
  if (c.peaks.min_distance_s < 0) fail("peaks.min_dist_s", "must be >= 0");
  if (c.peaks.mad_multiplier < 0) fail("peaks.mad_mult", "must be >= 0");
  if (c.margin_s <= 0) fail("crop.margin_s", "must be positive");
  if (c.feature_window <= 0) fail("model.feature_window", "must be positive");
  if (c.feature_hop <= 0 || c.feature_hop > c.feature_window)
    fail("model.feature_hop", "must be in (0, model.feature_window]");
  if (c.train.hidden_layers < 1) fail("model.hidden_layers", "must be >= 1");
  if (c.train.epochs < 1) fail("model.epochs", "must be >= 1");
  if (c.train.batch_size < 1) fail("model.batch", "must be >= 1");
  if (c.train.learning_rate <= 0) fail("model.learning_rate", "must be positive");
}

namespace config_detail {

struct TomlValue {
  std::string raw;
  int line = 0;
};

// Minimal strict TOML subset: [tables], key = value with string, boolean,
// integer and float values. Anything else is rejected loudly — a silent
// typo in a DSP parameter would corrupt an experiment invisibly.
inline std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside quotes
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line.resize(i);
        break;
      }
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("config: line " + std::to_string(line_no) + ": malformed table header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw Error("config: line " + std::to_string(line_no) + ": empty table name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error("config: line " + std::to_string(line_no) + ": expected key = value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw Error("config: line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
    out[full] = {value, line_no};
  }
  return out;
}

inline double as_float(const std::string& full, const TomlValue& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v.raw, &used);
  } catch (...) {
    throw Error("config: " + full + ": '" + v.raw + "' is not a number");
  }
  if (used != v.raw.size())
    throw Error("config: " + full + ": '" + v.raw + "' is not a number");
  return d;
}

inline long long as_int(const std::string& full, const TomlValue& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v.raw, &used);
  } catch (...) {
    throw Error("config: " + full + ": '" + v.raw + "' is not an integer");
  }
  if (used != v.raw.size())
    throw Error("config: " + full + ": '" + v.raw + "' is not an integer");
  return i;
}

inline bool as_bool(const std::string& full, const TomlValue& v) {
  if (v.raw == "true") return true;
  if (v.raw == "false") return false;
  throw Error("config: " + full + ": '" + v.raw + "' is not a boolean");
}

}  // namespace config_detail

// Parses a config file body. Absent keys keep their defaults; unknown keys
// are errors naming the key.
inline PipelineConfig parse_config(const std::string& text) {
  using namespace config_detail;
  PipelineConfig c;
  auto kv = parse_toml(text);

  const std::map<std::string, std::function<void(const std::string&, const TomlValue&)>>
      setters = {
          {"notch.base_hz", [&](const std::string& k, const TomlValue& v) { c.notch.base_hz = as_float(k, v); }},
          {"notch.harmonics", [&](const std::string& k, const TomlValue& v) { c.notch.n_harmonics = int(as_int(k, v)); }},
          {"notch.q", [&](const std::string& k, const TomlValue& v) { c.notch.q = as_float(k, v); }},
          {"stft.window", [&](const std::string& k, const TomlValue& v) { c.stft_window = int(as_int(k, v)); }},
          {"stft.hop", [&](const std::string& k, const TomlValue& v) { c.stft_hop = int(as_int(k, v)); }},
          {"peaks.smooth_s", [&](const std::string& k, const TomlValue& v) { c.peaks.smooth_len_s = as_float(k, v); }},
          {"peaks.min_dist_s", [&](const std::string& k, const TomlValue& v) { c.peaks.min_distance_s = as_float(k, v); }},
          {"peaks.height", [&](const std::string& k, const TomlValue& v) { c.peaks.min_height = as_float(k, v); }},
          {"peaks.mad_mult", [&](const std::string& k, const TomlValue& v) { c.peaks.mad_multiplier = as_float(k, v); }},
          {"crop.margin_s", [&](const std::string& k, const TomlValue& v) { c.margin_s = as_float(k, v); }},
          {"pipeline.reduce_before", [&](const std::string& k, const TomlValue& v) { c.reduce_before = as_bool(k, v); }},
          {"pipeline.reduce_events", [&](const std::string& k, const TomlValue& v) { c.reduce_events = as_bool(k, v); }},
          {"model.feature_window", [&](const std::string& k, const TomlValue& v) { c.feature_window = int(as_int(k, v)); }},
          {"model.feature_hop", [&](const std::string& k, const TomlValue& v) { c.feature_hop = int(as_int(k, v)); }},
          {"model.hidden_layers", [&](const std::string& k, const TomlValue& v) { c.train.hidden_layers = int(as_int(k, v)); }},
          {"model.epochs", [&](const std::string& k, const TomlValue& v) { c.train.epochs = int(as_int(k, v)); }},
          {"model.batch", [&](const std::string& k, const TomlValue& v) { c.train.batch_size = int(as_int(k, v)); }},
          {"model.learning_rate", [&](const std::string& k, const TomlValue& v) { c.train.learning_rate = as_float(k, v); }},
          {"model.seed", [&](const std::string& k, const TomlValue& v) { c.train.seed = std::uint64_t(as_int(k, v)); }},
      };

  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end())
      throw Error("config: unknown key '" + key + "' (line " +
                  std::to_string(value.line) + ")");
    it->second(key, value);
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("load_config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace foi
