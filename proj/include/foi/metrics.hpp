#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "foi/events.hpp"
#include "foi/synth.hpp"

namespace foi {

struct PrecisionCounts {
  std::size_t n_extracted = 0;
  std::size_t n_true = 0;

  // Absent when nothing was extracted; 0/0 is not a precision of 0.
  std::optional<double> precision() const {
    if (n_extracted == 0) return std::nullopt;
    return double(n_true) / double(n_extracted);
  }

  PrecisionCounts& operator+=(const PrecisionCounts& o) {
    n_extracted += o.n_extracted;
    n_true += o.n_true;
    return *this;
  }
};

// An extraction counts as a driving event iff its peak time falls inside
// some ground-truth interval. One interval may validate several peaks;
// this measures extraction precision, not recall.
inline PrecisionCounts match_events(const std::vector<DrivingEvent>& extracted,
                                    const GroundTruthLabel& truth) {
  PrecisionCounts counts;
  counts.n_extracted = extracted.size();
  for (const DrivingEvent& ev : extracted)
    for (const auto& [start, end] : truth.intervals)
      if (ev.peak_time_s >= start && ev.peak_time_s <= end) {
        ++counts.n_true;
        break;
      }
  return counts;
}

struct RocReport {
  double auroc = 0.0;
  std::size_t n_normal = 0;
  std::size_t n_abnormal = 0;
};

// AUROC as the normalized Mann-Whitney U statistic: the fraction of
// (abnormal, normal) pairs where the abnormal score is higher, ties
// counting one half. Computed by average ranks, O((n+m) log(n+m)).
inline RocReport auroc(const std::vector<double>& scores_normal,
                       const std::vector<double>& scores_abnormal) {
  if (scores_normal.empty() || scores_abnormal.empty())
    throw Error("auroc: both classes must be non-empty");

  const std::size_t n = scores_normal.size(), m = scores_abnormal.size();
  std::vector<std::pair<double, bool>> all;  // (score, is_abnormal)
  all.reserve(n + m);
  for (double s : scores_normal) all.emplace_back(s, false);
  for (double s : scores_abnormal) all.emplace_back(s, true);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_abnormal = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].first == all[i].first) ++j;
    const double avg_rank = (double(i) + double(j)) / 2.0 + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (all[k].second) rank_sum_abnormal += avg_rank;
    i = j + 1;
  }
  const double u = rank_sum_abnormal - double(m) * double(m + 1) / 2.0;
  return {u / (double(n) * double(m)), n, m};
}

// Percentage change of AUROC relative to a baseline.
inline double improvement_pct(double base_auroc, double new_auroc) {
  if (base_auroc <= 0.0) throw Error("improvement: baseline AUROC must be positive");
  return (new_auroc - base_auroc) / base_auroc * 100.0;
}

inline double improvement_pct(const RocReport& base, const RocReport& fresh) {
  return improvement_pct(base.auroc, fresh.auroc);
}

// Display rounding used in the human-readable tables.
inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace foi
