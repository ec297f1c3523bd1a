// foi - frequency-of-interest road noise toolkit.
//
// Subcommands: synth, reduce, extract, train, score, evaluate. Every
// command that writes artifacts also writes a run manifest carrying the
// config hash and input hashes, so any output can be traced to the exact
// configuration that produced it.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foi/benchmark.hpp"
#include "foi/config.hpp"
#include "foi/events.hpp"
#include "foi/experiment.hpp"
#include "foi/features.hpp"
#include "foi/manifest.hpp"
#include "foi/metrics.hpp"
#include "foi/ncae.hpp"
#include "foi/notch.hpp"
#include "foi/synth.hpp"
#include "foi/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

foi::PipelineConfig base_config(const std::string& explicit_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("FOI_CONFIG")) path = env;
  }
  if (path.empty()) return {};
  return foi::load_config(path);
}

std::string config_hash(const foi::PipelineConfig& cfg) {
  return foi::hash_string(cfg.canonical());
}

// ---- synth ----

int cmd_synth(const std::string& out_dir, bool benchmark, const foi::SynthSpec& spec,
              const std::string& id) {
  fs::create_directories(out_dir);
  if (benchmark) {
    const std::string manifest = foi::generate_benchmark(out_dir);
    std::printf("benchmark corpus at %s\n", manifest.c_str());
    return 0;
  }
  auto [buffer, label] = foi::synth_corpus(spec);
  const std::string wav_path = (fs::path(out_dir) / (id + ".wav")).string();
  const std::string label_path = (fs::path(out_dir) / (id + ".json")).string();
  foi::save_wav(buffer, wav_path);
  foi::save_labels(label, label_path);

  json extra;
  extra["seed"] = spec.rng_seed;
  extra["condition"] = foi::to_string(spec.condition);
  foi::write_run_manifest((fs::path(out_dir) / (id + ".manifest.json")).string(), "synth",
                          "-", {}, {wav_path, label_path}, extra);
  std::printf("wrote %s (%zu samples) and %s\n", wav_path.c_str(), buffer.samples.size(),
              label_path.c_str());
  return 0;
}

// ---- reduce ----

int cmd_reduce(const foi::PipelineConfig& cfg, const std::string& input,
               const std::string& output, const std::string& coeffs_csv) {
  foi::AudioBuffer in = foi::load_wav(input);
  foi::NotchSpec nspec = cfg.notch;
  nspec.sample_rate = in.sample_rate;
  const foi::NotchBank bank = foi::design_notch_bank(nspec);
  if (!coeffs_csv.empty()) {
    std::ofstream f(coeffs_csv, std::ios::trunc);
    if (!f) throw foi::Error("cannot open '" + coeffs_csv + "'");
    foi::export_coefficients_csv(bank, f);
  }
  foi::save_wav(foi::apply_reduction(in, bank), output);
  foi::write_run_manifest(output + ".manifest.json", "reduce", config_hash(cfg),
                          {{input, foi::hash_file(input)}}, {output});
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

// ---- extract ----

int cmd_extract(const foi::PipelineConfig& cfg, const std::string& input,
                const std::string& out_dir, const std::string& envelope_csv) {
  const foi::AudioBuffer buffer = foi::load_wav(input);
  const std::string source_id = fs::path(input).stem().string();
  const foi::ExtractResult result = foi::extract(buffer, cfg.extract_config(), source_id);

  fs::create_directories(out_dir);
  json events = json::array();
  std::vector<std::string> outputs;
  for (const foi::DrivingEvent& ev : result.events) {
    const std::string name = foi::event_id(ev) + ".wav";
    const std::string path = (fs::path(out_dir) / name).string();
    foi::save_wav(ev.samples, path);
    events.push_back({{"file", name},
                      {"source", source_id},
                      {"peak_time_s", ev.peak_time_s},
                      {"margin_s", ev.margin_s}});
    outputs.push_back(path);
  }
  if (!envelope_csv.empty()) {
    std::ofstream f(envelope_csv, std::ios::trunc);
    if (!f) throw foi::Error("cannot open '" + envelope_csv + "'");
    foi::export_envelope_csv(result.envelope, f);
  }

  json extra;
  extra["source"] = source_id;
  extra["height_threshold"] = result.height_threshold;
  extra["events"] = events;
  foi::write_run_manifest((fs::path(out_dir) / "events.json").string(), "extract",
                          config_hash(cfg), {{input, foi::hash_file(input)}}, outputs,
                          extra);
  std::printf("extracted %zu events from %s into %s\n", result.events.size(),
              input.c_str(), out_dir.c_str());
  return 0;
}

// ---- event set loading shared by train/score ----

struct LoadedEvent {
  std::string id;
  std::string source;
  foi::DrivingEvent event;
};

std::vector<LoadedEvent> load_event_dir(const std::string& events_dir) {
  const std::string manifest_path = (fs::path(events_dir) / "events.json").string();
  std::ifstream f(manifest_path);
  if (!f)
    throw foi::Error("events dir '" + events_dir + "' has no events.json manifest");
  json j;
  f >> j;
  std::vector<LoadedEvent> events;
  for (const auto& entry : j.at("extra").at("events")) {
    LoadedEvent le;
    le.id = fs::path(entry.at("file").get<std::string>()).stem().string();
    le.source = entry.at("source").get<std::string>();
    le.event.samples =
        foi::load_wav((fs::path(events_dir) / entry.at("file").get<std::string>()).string());
    le.event.peak_time_s = entry.at("peak_time_s").get<double>();
    le.event.margin_s = entry.at("margin_s").get<double>();
    le.event.source_id = le.source;
    events.push_back(std::move(le));
  }
  return events;
}

// labels.json is either a single sidecar {"condition": ...} or a corpus
// manifest whose files[] carry per-source conditions.
foi::SurfaceCondition condition_for(const json& labels, const std::string& source) {
  if (labels.contains("files")) {
    for (const auto& f : labels.at("files"))
      if (f.at("id").get<std::string>() == source)
        return foi::condition_from_string(f.at("condition").get<std::string>());
    throw foi::Error("labels file does not list source '" + source + "'");
  }
  return foi::condition_from_string(labels.at("condition").get<std::string>());
}

int cmd_train(const foi::PipelineConfig& cfg, const std::string& events_dir,
              const std::string& labels_path, const std::string& model_path) {
  std::ifstream lf(labels_path);
  if (!lf) throw foi::Error("cannot open labels '" + labels_path + "'");
  json labels;
  lf >> labels;

  const std::vector<LoadedEvent> events = load_event_dir(events_dir);
  const foi::FeatureConfig fcfg = cfg.feature_config();
  std::vector<std::vector<double>> features;
  for (const LoadedEvent& le : events)
    if (condition_for(labels, le.source) == foi::SurfaceCondition::Dry)
      features.push_back(foi::featurize(le.event, fcfg));
  if (features.empty())
    throw foi::Error("no dry (normal) events in '" + events_dir + "'; cannot train");

  const foi::TrainResult result = foi::train(features, cfg.train);
  foi::save_model(result.model, model_path);
  foi::write_run_manifest(model_path + ".manifest.json", "train", config_hash(cfg),
                          {{events_dir, "-"}, {labels_path, foi::hash_file(labels_path)}},
                          {model_path},
                          json{{"n_train", features.size()},
                               {"final_loss", result.model.final_loss}});
  std::printf("trained on %zu dry events, final loss %.6g, model at %s\n",
              features.size(), result.model.final_loss, model_path.c_str());
  return 0;
}

int cmd_score(const foi::PipelineConfig& cfg, const std::string& model_path,
              const std::string& events_dir, const std::string& out_csv) {
  const foi::NcaeModel model = foi::load_model(model_path);
  const std::vector<LoadedEvent> events = load_event_dir(events_dir);
  const foi::FeatureConfig fcfg = cfg.feature_config();

  std::string csv = "event_id,score\n";
  for (const LoadedEvent& le : events) {
    const double s = foi::score(model, foi::featurize(le.event, fcfg));
    char line[160];
    std::snprintf(line, sizeof line, "%s,%.17g\n", le.id.c_str(), s);
    csv += line;
  }
  std::ofstream f(out_csv, std::ios::trunc);
  if (!f) throw foi::Error("cannot open '" + out_csv + "'");
  f << csv;
  foi::write_run_manifest(out_csv + ".manifest.json", "score", config_hash(cfg),
                          {{model_path, foi::hash_file(model_path)}, {events_dir, "-"}},
                          {out_csv}, json{{"n_events", events.size()}});
  std::printf("scored %zu events into %s\n", events.size(), out_csv.c_str());
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& config_a_path,
                 const std::string& config_b_path, const std::string& out_dir) {
  const foi::PipelineConfig cfg_a = foi::load_config(config_a_path);
  const foi::PipelineConfig cfg_b = foi::load_config(config_b_path);
  const foi::CorpusManifest manifest = foi::load_corpus_manifest(manifest_path);
  const foi::ExperimentResult result =
      foi::run_experiment(manifest, cfg_a, cfg_b, out_dir);

  foi::write_run_manifest((fs::path(out_dir) / "run.manifest.json").string(), "evaluate",
                          config_hash(cfg_a) + ":" + config_hash(cfg_b),
                          {{manifest_path, foi::hash_file(manifest_path)},
                           {config_a_path, foi::hash_file(config_a_path)},
                           {config_b_path, foi::hash_file(config_b_path)}},
                          {(fs::path(out_dir) / "precision.csv").string(),
                           (fs::path(out_dir) / "auroc.csv").string(),
                           (fs::path(out_dir) / "scores.csv").string(),
                           (fs::path(out_dir) / "summary.txt").string()});

  std::ifstream summary((fs::path(out_dir) / "summary.txt").string());
  std::cout << summary.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-of-interest road noise toolkit"};
  app.set_version_flag("--version", std::string(foi::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "pipeline config TOML (or set FOI_CONFIG); flags override it");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic labeled audio");
  std::string synth_out = "corpus";
  bool synth_benchmark = false;
  std::string synth_id = "synth";
  std::string synth_condition = "dry";
  foi::SynthSpec spec;
  synth->add_option("--out-dir", synth_out, "output directory");
  synth->add_flag("--benchmark", synth_benchmark,
                  "write the full seeded benchmark corpus (ignores other options)");
  synth->add_option("--id", synth_id, "output base name");
  synth->add_option("--duration", spec.duration_s, "seconds");
  synth->add_option("--events", spec.n_events, "number of driving events");
  synth->add_option("--seed", spec.rng_seed, "rng seed");
  synth->add_option("--condition", synth_condition, "dry|wet|slush|snow");
  synth->add_option("--sample-rate", spec.sample_rate, "Hz");
  synth->add_option("--wind-level", spec.wind_level, "baseline wind RMS");
  synth->add_option("--wind-cutoff", spec.wind_cutoff_hz, "Hz");
  synth->add_option("--band-low", spec.event_band.first, "event band low edge, Hz");
  synth->add_option("--band-high", spec.event_band.second, "event band high edge, Hz");
  synth->add_option("--event-gain", spec.event_gain, "event RMS at envelope peak");
  synth->add_option("--gusts", spec.n_gusts, "standalone wind gusts");
  synth->add_option("--gust-gain", spec.gust_gain, "gust swell factor");
  synth->add_option("--event-gust-prob", spec.event_gust_prob,
                    "chance a gust coincides with an event");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "apply FoI noise reduction to a WAV");
  std::string red_in, red_out, red_coeffs;
  double red_base = -1, red_q = -1;
  int red_harmonics = -1;
  reduce->add_option("--input", red_in)->required();
  reduce->add_option("--output", red_out)->required();
  reduce->add_option("--base-hz", red_base, "first harmonic (default 21.5)");
  reduce->add_option("--harmonics", red_harmonics, "harmonic count (default 60)");
  reduce->add_option("--q", red_q, "notch quality (default 30)");
  reduce->add_option("--export-coeffs", red_coeffs, "write section coefficients CSV");

  // extract
  auto* extract = app.add_subcommand("extract", "extract driving events from a WAV");
  std::string ext_in, ext_out = "events", ext_env;
  bool no_reduce = false, reduce_events = false;
  int ext_window = -1, ext_hop = -1;
  double ext_smooth = -1, ext_min_dist = -1, ext_height = -1, ext_margin = -1;
  extract->add_option("--input", ext_in)->required();
  extract->add_option("--out-dir", ext_out, "event output directory");
  extract->add_flag("--no-reduce", no_reduce, "skip noise reduction before detection");
  extract->add_flag("--reduce-events", reduce_events, "noise-reduce the crops as well");
  extract->add_option("--window", ext_window, "STFT window (default 4096)");
  extract->add_option("--hop", ext_hop, "STFT hop (default 1024)");
  extract->add_option("--smooth-s", ext_smooth, "envelope smoothing (default 2)");
  extract->add_option("--min-dist-s", ext_min_dist, "peak separation (default 10)");
  extract->add_option("--height", ext_height,
                      "absolute peak threshold (default adaptive median + 4 MAD)");
  extract->add_option("--margin-s", ext_margin, "crop half length (default 5)");
  extract->add_option("--export-envelope", ext_env, "write smoothed envelope CSV");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the NCAE on dry events");
  std::string tr_events, tr_labels, tr_model;
  long long tr_seed = -1;
  train_cmd->add_option("--events-dir", tr_events)->required();
  train_cmd->add_option("--labels", tr_labels)->required();
  train_cmd->add_option("--model", tr_model)->required();
  train_cmd->add_option("--seed", tr_seed, "training seed (default 42)");

  // score
  auto* score_cmd = app.add_subcommand("score", "score events by reconstruction error");
  std::string sc_model, sc_events, sc_out;
  score_cmd->add_option("--model", sc_model)->required();
  score_cmd->add_option("--events-dir", sc_events)->required();
  score_cmd->add_option("--out", sc_out)->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "A/B experiment over a corpus");
  std::string ev_manifest, ev_a, ev_b, ev_out = "report";
  eval_cmd->add_option("--manifest", ev_manifest)->required();
  eval_cmd->add_option("--config-a", ev_a)->required();
  eval_cmd->add_option("--config-b", ev_b)->required();
  eval_cmd->add_option("--out", ev_out, "report directory");

  CLI11_PARSE(app, argc, argv);

  try {
    foi::PipelineConfig cfg = base_config(config_path);

    if (synth->parsed()) {
      spec.condition = foi::condition_from_string(synth_condition);
      return cmd_synth(synth_out, synth_benchmark, spec, synth_id);
    }
    if (reduce->parsed()) {
      if (red_base > 0) cfg.notch.base_hz = red_base;
      if (red_harmonics > 0) cfg.notch.n_harmonics = red_harmonics;
      if (red_q > 0) cfg.notch.q = red_q;
      return cmd_reduce(cfg, red_in, red_out, red_coeffs);
    }
    if (extract->parsed()) {
      if (no_reduce) cfg.reduce_before = false;
      if (reduce_events) cfg.reduce_events = true;
      if (ext_window > 0) cfg.stft_window = ext_window;
      if (ext_hop > 0) cfg.stft_hop = ext_hop;
      if (ext_smooth > 0) cfg.peaks.smooth_len_s = ext_smooth;
      if (ext_min_dist >= 0) cfg.peaks.min_distance_s = ext_min_dist;
      if (ext_height >= 0) cfg.peaks.min_height = ext_height;
      if (ext_margin > 0) cfg.margin_s = ext_margin;
      return cmd_extract(cfg, ext_in, ext_out, ext_env);
    }
    if (train_cmd->parsed()) {
      if (tr_seed >= 0) cfg.train.seed = std::uint64_t(tr_seed);
      return cmd_train(cfg, tr_events, tr_labels, tr_model);
    }
    if (score_cmd->parsed()) return cmd_score(cfg, sc_model, sc_events, sc_out);
    if (eval_cmd->parsed()) return cmd_evaluate(ev_manifest, ev_a, ev_b, ev_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
