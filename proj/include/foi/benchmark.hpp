#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foi/config.hpp"
#include "foi/manifest.hpp"
#include "foi/synth.hpp"
#include "foi/wav.hpp"

namespace foi {

// One recording of the synthetic benchmark: three "posts" (sites with
// different wind regimes) times four surface conditions, all seeded.
struct BenchmarkFile {
  std::string id;
  std::string post;
  SurfaceCondition condition = SurfaceCondition::Dry;
  SynthSpec spec;
};

// Desk-scale stand-in for the field dataset. Post wind levels differ so
// that merging posts hurts the unreduced model; gusts create false peaks
// when extraction runs without reduction and contaminate event crops
// until the second reduction pass removes them.
inline std::vector<BenchmarkFile> benchmark_files() {
  struct PostProfile {
    const char* name;
    double wind_level;
    double gust_gain;
  };
  const PostProfile posts[] = {
      {"A", 0.04, 5.0},
      {"B", 0.08, 6.0},
      {"C", 0.16, 8.0},
  };
  const struct {
    SurfaceCondition condition;
    int n_files;
  } conditions[] = {
      {SurfaceCondition::Dry, 3},
      {SurfaceCondition::Wet, 2},
      {SurfaceCondition::Slush, 2},
      {SurfaceCondition::Snow, 2},
  };

  std::vector<BenchmarkFile> files;
  for (const PostProfile& post : posts) {
    for (const auto& [condition, n_files] : conditions) {
      for (int i = 0; i < n_files; ++i) {
        BenchmarkFile f;
        f.post = post.name;
        f.condition = condition;
        f.id = std::string(post.name) + "_" + to_string(condition) + "_" +
               std::to_string(i);
        SynthSpec& s = f.spec;
        s.duration_s = 130.0;
        s.sample_rate = 22050;
        s.n_events = 5;
        s.event_band = {300.0, 8000.0};
        s.event_gain = 0.25;
        s.condition = condition;
        s.wind_level = post.wind_level;
        s.gust_gain = post.gust_gain;
        s.n_gusts = 2;
        s.event_gust_prob = 0.6;
        s.rng_seed = fnv1a64(f.id.data(), f.id.size());
        files.push_back(std::move(f));
      }
    }
  }
  return files;
}

// The benchmark pipeline configs: A is the raw pipeline, B enables both
// reduction passes. Everything else matches, per the A/B contract.
inline PipelineConfig benchmark_config_b() {
  PipelineConfig c;
  c.reduce_before = true;
  c.reduce_events = true;
  c.feature_window = 512;
  c.feature_hop = 256;
  return c;
}

inline PipelineConfig benchmark_config_a() {
  PipelineConfig c = benchmark_config_b();
  c.reduce_before = false;
  c.reduce_events = false;
  return c;
}

// Writes the corpus (WAV + label sidecars + manifest) into out_dir.
// Generation is skipped when a previous run with the same recipe hash is
// already present. Returns the manifest path.
inline std::string generate_benchmark(const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::vector<BenchmarkFile> files = benchmark_files();

  std::string recipe;
  for (const BenchmarkFile& f : files) {
    const SynthSpec& s = f.spec;
    recipe += f.id + "," + std::to_string(s.duration_s) + "," +
              std::to_string(s.sample_rate) + "," + std::to_string(s.n_events) + "," +
              std::to_string(s.wind_level) + "," + std::to_string(s.gust_gain) + "," +
              std::to_string(s.event_gust_prob) + "," + std::to_string(s.event_gain) + "," +
              std::to_string(s.rng_seed) + ";";
  }
  const std::string recipe_hash = hash_string(recipe);
  const std::string manifest_path = (fs::path(out_dir) / "corpus.json").string();
  const std::string stamp_path = (fs::path(out_dir) / ".recipe_hash").string();
  {
    std::ifstream stamp(stamp_path);
    std::string existing;
    if (stamp && std::getline(stamp, existing) && existing == recipe_hash &&
        fs::exists(manifest_path))
      return manifest_path;
  }

  nlohmann::json manifest;
  manifest["sample_rate"] = files.front().spec.sample_rate;
  manifest["recipe_hash"] = recipe_hash;
  manifest["files"] = nlohmann::json::array();
  for (const BenchmarkFile& f : files) {
    auto [buffer, label] = synth_corpus(f.spec);
    const std::string wav_name = f.id + ".wav";
    const std::string label_name = f.id + ".json";
    save_wav(buffer, (fs::path(out_dir) / wav_name).string());
    save_labels(label, (fs::path(out_dir) / label_name).string());
    manifest["files"].push_back({{"id", f.id},
                                 {"post", f.post},
                                 {"condition", to_string(f.condition)},
                                 {"wav", wav_name},
                                 {"labels", label_name},
                                 {"seed", f.spec.rng_seed}});
  }
  std::ofstream mf(manifest_path, std::ios::trunc);
  if (!mf) throw Error("generate_benchmark: cannot write '" + manifest_path + "'");
  mf << manifest.dump(2) << "\n";
  std::ofstream stamp(stamp_path, std::ios::trunc);
  stamp << recipe_hash << "\n";
  return manifest_path;
}

}  // namespace foi
