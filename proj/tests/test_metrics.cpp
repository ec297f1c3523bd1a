#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "foi/metrics.hpp"
#include "foi/rng.hpp"

using namespace foi;

namespace {

DrivingEvent event_at(double peak_time_s) {
  DrivingEvent ev;
  ev.peak_time_s = peak_time_s;
  return ev;
}

// O(n*m) pair counting, the Mann-Whitney oracle.
double pairwise_auroc(const std::vector<double>& normal,
                      const std::vector<double>& abnormal) {
  double acc = 0.0;
  for (double a : abnormal)
    for (double n : normal) {
      if (a > n) acc += 1.0;
      else if (a == n) acc += 0.5;
    }
  return acc / (double(normal.size()) * double(abnormal.size()));
}

}  // namespace

TEST(MatchEvents, PeakInsideIntervalCounts) {
  GroundTruthLabel truth;
  truth.intervals = {{10.0, 14.0}, {30.0, 33.0}};
  const std::vector<DrivingEvent> events = {event_at(11.0), event_at(13.9), event_at(20.0),
                                            event_at(30.0), event_at(33.0)};
  PrecisionCounts counts = match_events(events, truth);
  EXPECT_EQ(counts.n_extracted, 5u);
  EXPECT_EQ(counts.n_true, 4u);  // one interval may validate several peaks
  EXPECT_DOUBLE_EQ(*counts.precision(), 0.8);
}

TEST(MatchEvents, EmptyExtractionHasNoPrecision) {
  GroundTruthLabel truth;
  truth.intervals = {{1.0, 2.0}};
  PrecisionCounts counts = match_events({}, truth);
  EXPECT_EQ(counts.n_extracted, 0u);
  EXPECT_FALSE(counts.precision().has_value());  // absent, not 0
}

TEST(MatchEvents, AllInsideIsPerfectPrecision) {
  GroundTruthLabel truth;
  truth.intervals = {{0.0, 100.0}};
  PrecisionCounts counts = match_events({event_at(5), event_at(50), event_at(95)}, truth);
  EXPECT_DOUBLE_EQ(*counts.precision(), 1.0);
}

// The published precision table reproduces from raw counts.
TEST(MatchEvents, PaperTableArithmetic) {
  PrecisionCounts a{70, 41};
  EXPECT_DOUBLE_EQ(round3(*a.precision()), 0.586);
  PrecisionCounts b{570, 513};
  EXPECT_DOUBLE_EQ(round3(*b.precision()), 0.900);
}

TEST(Auroc, WorkedExample) {
  // 3 of 4 (abnormal, normal) pairs correctly ordered
  RocReport r = auroc({0.1, 0.2}, {0.15, 0.3});
  EXPECT_DOUBLE_EQ(r.auroc, 0.75);
  EXPECT_EQ(r.n_normal, 2u);
  EXPECT_EQ(r.n_abnormal, 2u);
}

TEST(Auroc, PerfectAndDegenerate) {
  EXPECT_DOUBLE_EQ(auroc({0.1, 0.2, 0.3}, {0.4, 0.5}).auroc, 1.0);
  EXPECT_DOUBLE_EQ(auroc({0.5, 0.6}, {0.1, 0.2}).auroc, 0.0);
  EXPECT_DOUBLE_EQ(auroc({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}).auroc, 0.5);  // all ties
  EXPECT_THROW(auroc({}, {1.0}), Error);
  EXPECT_THROW(auroc({1.0}, {}), Error);
}

TEST(Auroc, MatchesPairwiseOracle) {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(60), m = 1 + rng.below(60);
    std::vector<double> normal(n), abnormal(m);
    const bool ties = trial % 2 == 0;
    for (double& v : normal) v = ties ? double(rng.below(8)) : rng.normal();
    for (double& v : abnormal)
      v = (ties ? double(rng.below(8)) : rng.normal()) + 0.3;
    const double fast = auroc(normal, abnormal).auroc;
    EXPECT_NEAR(fast, pairwise_auroc(normal, abnormal), 1e-12) << "trial " << trial;
  }
}

TEST(Auroc, AntisymmetryAndMonotoneInvariance) {
  Rng rng(99);
  std::vector<double> normal(40), abnormal(55);
  for (double& v : normal) v = rng.normal();
  for (double& v : abnormal) v = rng.normal() + 0.5;

  const double forward = auroc(normal, abnormal).auroc;
  EXPECT_NEAR(forward + auroc(abnormal, normal).auroc, 1.0, 1e-12);

  auto transform = [&](auto f) {
    std::vector<double> tn(normal.size()), ta(abnormal.size());
    std::transform(normal.begin(), normal.end(), tn.begin(), f);
    std::transform(abnormal.begin(), abnormal.end(), ta.begin(), f);
    return auroc(tn, ta).auroc;
  };
  EXPECT_DOUBLE_EQ(transform([](double x) { return std::exp(x); }), forward);
  EXPECT_DOUBLE_EQ(transform([](double x) { return 3.0 * x + 11.0; }), forward);
}

TEST(Improvement, PaperTableRows) {
  EXPECT_DOUBLE_EQ(round3(improvement_pct(0.890, 1.000)), 12.360);  // Post C
  EXPECT_DOUBLE_EQ(round3(improvement_pct(0.883, 0.963)), 9.060);   // Post A
  EXPECT_DOUBLE_EQ(round3(improvement_pct(0.837, 0.871)), 4.062);   // Post B
  EXPECT_DOUBLE_EQ(improvement_pct(0.75, 0.75), 0.0);
  EXPECT_THROW(improvement_pct(0.0, 0.5), Error);
}
