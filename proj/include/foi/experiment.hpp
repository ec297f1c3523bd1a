#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "foi/config.hpp"
#include "foi/features.hpp"
#include "foi/manifest.hpp"
#include "foi/metrics.hpp"
#include "foi/ncae.hpp"
#include "foi/stft.hpp"
#include "foi/synth.hpp"
#include "foi/wav.hpp"

namespace foi {

struct CorpusEntry {
  std::string id;
  std::string post;
  SurfaceCondition condition = SurfaceCondition::Dry;
  std::string wav_path;
  std::string labels_path;
};

struct CorpusManifest {
  std::vector<CorpusEntry> files;
};

inline CorpusManifest load_corpus_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  std::ifstream f(path);
  if (!f) throw Error("load_corpus_manifest: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("load_corpus_manifest: '" + path + "': " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  CorpusManifest manifest;
  for (const auto& entry : j.at("files")) {
    CorpusEntry c;
    c.id = entry.at("id").get<std::string>();
    c.post = entry.at("post").get<std::string>();
    c.condition = condition_from_string(entry.at("condition").get<std::string>());
    c.wav_path = (base / entry.at("wav").get<std::string>()).string();
    c.labels_path = (base / entry.at("labels").get<std::string>()).string();
    manifest.files.push_back(std::move(c));
  }
  if (manifest.files.empty())
    throw Error("load_corpus_manifest: '" + path + "' lists no files");
  return manifest;
}

// A/B comparison across two pipeline configs, mirroring the Reduction
// on/off rows of the reference tables: per-condition extraction precision,
// then per-post and post-merged AUROC of an NCAE trained on each config's
// dry events.
struct ExperimentResult {
  struct PrecisionCell {
    std::string post;
    SurfaceCondition condition = SurfaceCondition::Dry;
    PrecisionCounts config_a, config_b;
  };
  struct AurocRow {
    std::string setting;  // post name or "merge"
    RocReport config_a, config_b;
    double improvement_pct = 0.0;
  };
  std::vector<PrecisionCell> precision;  // one cell per (post, condition)
  std::vector<AurocRow> auroc_rows;      // per post, then "merge"
  double mean_per_post_improvement = 0.0;
};

namespace experiment_detail {

struct ScoredEvent {
  std::string id;
  std::string source;
  std::string post;
  SurfaceCondition condition = SurfaceCondition::Dry;
  std::vector<double> feature;
  double score = 0.0;
};

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("run_experiment: cannot write '" + path + "'");
  f << body;
}

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace experiment_detail

inline ExperimentResult run_experiment(const CorpusManifest& manifest,
                                       const PipelineConfig& config_a,
                                       const PipelineConfig& config_b,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  using namespace experiment_detail;
  fs::create_directories(out_dir);
  fs::create_directories((fs::path(out_dir) / "envelopes").string());
  fs::create_directories((fs::path(out_dir) / "spectra").string());

  const PipelineConfig* configs[2] = {&config_a, &config_b};

  // Per (post, condition) precision cells in first-seen order.
  std::vector<ExperimentResult::PrecisionCell> cells;
  auto cell_for = [&](const std::string& post,
                      SurfaceCondition c) -> ExperimentResult::PrecisionCell& {
    for (auto& cell : cells)
      if (cell.post == post && cell.condition == c) return cell;
    cells.push_back({post, c, {}, {}});
    return cells.back();
  };

  std::vector<ScoredEvent> events[2];
  std::vector<std::string> post_order;

  for (const CorpusEntry& entry : manifest.files) {
    if (std::find(post_order.begin(), post_order.end(), entry.post) == post_order.end())
      post_order.push_back(entry.post);
    const AudioBuffer buffer = load_wav(entry.wav_path);
    const GroundTruthLabel truth = load_labels(entry.labels_path);
    if (truth.condition != entry.condition)
      throw Error("run_experiment: manifest condition for '" + entry.id +
                  "' disagrees with its label sidecar");

    for (int ci = 0; ci < 2; ++ci) {
      const PipelineConfig& cfg = *configs[ci];
      const ExtractResult extracted = extract(buffer, cfg.extract_config(), entry.id);

      PrecisionCounts counts = match_events(extracted.events, truth);
      auto& cell = cell_for(entry.post, entry.condition);
      (ci == 0 ? cell.config_a : cell.config_b) += counts;

      const FeatureConfig fcfg = cfg.feature_config();
      for (const DrivingEvent& ev : extracted.events) {
        ScoredEvent se;
        se.id = event_id(ev);
        se.source = entry.id;
        se.post = entry.post;
        se.condition = entry.condition;
        se.feature = featurize(ev, fcfg);
        events[ci].push_back(std::move(se));
      }

      {
        std::ofstream env_csv((fs::path(out_dir) / "envelopes" /
                               (entry.id + (ci == 0 ? "_a.csv" : "_b.csv")))
                                  .string(),
                              std::ios::trunc);
        export_envelope_csv(extracted.envelope, env_csv);
      }
    }

    // Fig. 2-5 style spectra for the first dry file of each post: raw vs reduced.
    if (entry.id.ends_with("_0") && entry.condition == SurfaceCondition::Dry) {
      const Spectrogram raw = stft(buffer, config_b.stft_window, config_b.stft_hop);
      NotchSpec nspec = config_b.notch;
      nspec.sample_rate = buffer.sample_rate;
      const Spectrogram reduced =
          stft(apply_reduction(buffer, design_notch_bank(nspec)), config_b.stft_window,
               config_b.stft_hop);
      std::ofstream raw_csv((fs::path(out_dir) / "spectra" / (entry.id + "_raw.csv")).string());
      export_mean_spectrum_csv(raw, raw_csv);
      std::ofstream red_csv(
          (fs::path(out_dir) / "spectra" / (entry.id + "_reduced.csv")).string());
      export_mean_spectrum_csv(reduced, red_csv);
    }
  }

  // Train on dry events per post and merged, score everything, AUROC per
  // config, improvement from A to B. When a post has two or more dry
  // files, its last one is held out of training so normal scores also
  // reflect generalization rather than pure memorization.
  std::vector<std::string> holdout_sources;
  {
    std::map<std::string, std::vector<std::string>> dry_by_post;
    for (const CorpusEntry& entry : manifest.files)
      if (entry.condition == SurfaceCondition::Dry)
        dry_by_post[entry.post].push_back(entry.id);
    for (const auto& [post, ids] : dry_by_post)
      if (ids.size() >= 2) holdout_sources.push_back(ids.back());
  }
  auto in_training = [&](const ScoredEvent& se) {
    if (se.condition != SurfaceCondition::Dry) return false;
    return std::find(holdout_sources.begin(), holdout_sources.end(), se.source) ==
           holdout_sources.end();
  };

  ExperimentResult result;
  result.precision = cells;

  std::vector<std::string> settings = post_order;
  settings.push_back("merge");

  for (const std::string& setting : settings) {
    ExperimentResult::AurocRow row;
    row.setting = setting;
    for (int ci = 0; ci < 2; ++ci) {
      const PipelineConfig& cfg = *configs[ci];
      std::vector<std::vector<double>> train_set;
      for (const ScoredEvent& se : events[ci])
        if ((setting == "merge" || se.post == setting) && in_training(se))
          train_set.push_back(se.feature);
      if (train_set.empty())
        throw Error("run_experiment: no dry events for setting '" + setting +
                    "' under config " + (ci == 0 ? "A" : "B") + "; cannot train");
      const TrainResult trained = train(train_set, cfg.train);

      std::vector<double> normal_scores, abnormal_scores;
      for (ScoredEvent& se : events[ci]) {
        if (setting != "merge" && se.post != setting) continue;
        const double s = score(trained.model, se.feature);
        if (setting == "merge") se.score = s;  // keep merge scores for the CSV
        (is_abnormal(se.condition) ? abnormal_scores : normal_scores).push_back(s);
      }
      const RocReport report = auroc(normal_scores, abnormal_scores);
      (ci == 0 ? row.config_a : row.config_b) = report;
    }
    row.improvement_pct = improvement_pct(row.config_a, row.config_b);
    result.auroc_rows.push_back(row);
  }

  double sum = 0.0;
  for (const auto& row : result.auroc_rows)
    if (row.setting != "merge") sum += row.improvement_pct;
  result.mean_per_post_improvement =
      result.auroc_rows.size() > 1 ? sum / double(result.auroc_rows.size() - 1) : 0.0;

  // ---- reports ----
  {
    std::string csv = "config,post,condition,n_true,n_extracted,precision\n";
    for (const auto& cell : cells) {
      for (int ci = 0; ci < 2; ++ci) {
        const PrecisionCounts& c = ci == 0 ? cell.config_a : cell.config_b;
        csv += std::string(ci == 0 ? "a" : "b") + "," + cell.post + "," +
               to_string(cell.condition) + "," + std::to_string(c.n_true) + "," +
               std::to_string(c.n_extracted) + ",";
        if (c.precision()) csv += csv_double(*c.precision());
        csv += "\n";
      }
    }
    write_text((fs::path(out_dir) / "precision.csv").string(), csv);
  }
  {
    std::string csv =
        "setting,auroc_a,auroc_b,n_normal_a,n_abnormal_a,n_normal_b,n_abnormal_b,"
        "improvement_pct\n";
    for (const auto& row : result.auroc_rows)
      csv += row.setting + "," + csv_double(row.config_a.auroc) + "," +
             csv_double(row.config_b.auroc) + "," + std::to_string(row.config_a.n_normal) +
             "," + std::to_string(row.config_a.n_abnormal) + "," +
             std::to_string(row.config_b.n_normal) + "," +
             std::to_string(row.config_b.n_abnormal) + "," +
             csv_double(row.improvement_pct) + "\n";
    write_text((fs::path(out_dir) / "auroc.csv").string(), csv);
  }
  {
    std::string csv = "config,post,condition,event_id,score\n";
    for (int ci = 0; ci < 2; ++ci)
      for (const ScoredEvent& se : events[ci])
        csv += std::string(ci == 0 ? "a" : "b") + "," + se.post + "," +
               to_string(se.condition) + "," + se.id + "," + csv_double(se.score) + "\n";
    write_text((fs::path(out_dir) / "scores.csv").string(), csv);
  }
  {
    std::string s;
    s += "Event extraction precision (config A = no reduction / config B = reduction)\n";
    s += "post  condition  A: true/extracted (precision)   B: true/extracted (precision)\n";
    for (const auto& cell : cells) {
      const auto fmt_counts = [](const PrecisionCounts& c) {
        std::string t = std::to_string(c.n_true) + " / " + std::to_string(c.n_extracted);
        t += c.precision() ? " (" + experiment_detail::fmt3(*c.precision()) + ")"
                           : " (-)";
        return t;
      };
      s += cell.post + "     " + to_string(cell.condition) + "  A: " +
           fmt_counts(cell.config_a) + "   B: " + fmt_counts(cell.config_b) + "\n";
    }
    s += "\nAnomaly detection AUROC\n";
    s += "setting  original  reduction  improvement\n";
    for (const auto& row : result.auroc_rows)
      s += row.setting + "  " + fmt3(row.config_a.auroc) + "  " +
           fmt3(row.config_b.auroc) + "  " + fmt3(row.improvement_pct) + "%\n";
    s += "mean per-post improvement: " + fmt3(result.mean_per_post_improvement) + "%\n";
    write_text((fs::path(out_dir) / "summary.txt").string(), s);
  }
  return result;
}

}  // namespace foi
