#include "beliefwalk/dataio.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace beliefwalk;

namespace {

std::string temp_csv(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST(Rescore, Branches) {
  EXPECT_EQ(rescore(80, MotionDirection::Right), 80);
  EXPECT_EQ(rescore(80, MotionDirection::Left), 20);
  EXPECT_EQ(rescore(50, MotionDirection::Left), 50);
  EXPECT_THROW(rescore(101, MotionDirection::Right), data_error);
  EXPECT_THROW(rescore(-1, MotionDirection::Left), data_error);
}

TEST(Rescore, InvolutionUnderLeftMotion) {
  for (int r = 0; r <= 100; ++r)
    EXPECT_EQ(rescore(rescore(r, MotionDirection::Left), MotionDirection::Left), r);
}

TEST(Categorize, BandBoundaries) {
  EXPECT_EQ(categorize(0), Category::Low);
  EXPECT_EQ(categorize(33), Category::Low);
  EXPECT_EQ(categorize(34), Category::Mid);
  EXPECT_EQ(categorize(66), Category::Mid);
  EXPECT_EQ(categorize(67), Category::High);
  EXPECT_EQ(categorize(100), Category::High);
}

TEST(Categorize, PartitionHasNoGaps) {
  int counts[3] = {0, 0, 0};
  for (int r = 0; r <= 100; ++r) ++counts[static_cast<int>(categorize(r))];
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 101);
  EXPECT_EQ(counts[0], 34);  // 0..33
  EXPECT_EQ(counts[1], 33);  // 34..66
  EXPECT_EQ(counts[2], 34);  // 67..100
}

TEST(Aggregate, SingleTrialLandsInHighHigh) {
  TrialRecord t;
  t.participant = "p01";
  t.coherence_pct = 4;
  t.condition = 1;
  t.direction = MotionDirection::Right;
  t.rating1 = 70;
  t.rating2 = 80;
  const auto cells = aggregate({t});
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].trial_count, 1);
  EXPECT_DOUBLE_EQ(cells[0].counts(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(cells[0].counts.sum(), 1.0);
}

TEST(Aggregate, RescoringSymmetry) {
  TrialRecord left, right;
  left.participant = right.participant = "p01";
  left.coherence_pct = right.coherence_pct = 2;
  left.condition = right.condition = 1;
  left.rating1 = right.rating1 = 20;
  left.rating2 = right.rating2 = 10;
  left.direction = MotionDirection::Left;
  right.direction = MotionDirection::Right;
  const auto cells = aggregate({left, right});
  ASSERT_EQ(cells.size(), 1u);
  // left trial rescored to (80, 90) -> (H,H); right stays (20, 10) -> (L,L)
  EXPECT_DOUBLE_EQ(cells[0].counts(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(cells[0].counts(0, 0), 1.0);
}

TEST(Aggregate, ConservesTrialCounts) {
  std::vector<TrialRecord> corpus;
  const TimingMap timings = default_timings();
  for (int p = 0; p < 3; ++p)
    for (int level : kCoherenceLevels)
      for (const auto& [condition, timing] : timings.by_condition) {
        const auto trials =
            simulate_trials(ModelParams{MarkovParams{0.3, 5.0}}, timing, 20, 7,
                            {"p" + std::to_string(p), 1, level, condition});
        corpus.insert(corpus.end(), trials.begin(), trials.end());
      }
  const auto cells = aggregate(corpus);
  EXPECT_EQ(cells.size(), 3u * 4u * 3u);
  double total = 0;
  for (const auto& cell : cells) {
    EXPECT_DOUBLE_EQ(cell.counts.sum(), cell.trial_count);
    total += cell.trial_count;
  }
  EXPECT_DOUBLE_EQ(total, static_cast<double>(corpus.size()));
}

TEST(Csv, RoundTrip) {
  const auto trials =
      simulate_trials(ModelParams{QuantumParams{2.0, 8.0}}, {0.5, 1.5}, 50, 3, {"p07", 2, 8, 1});
  const std::string path = temp_csv("bw_roundtrip.csv", "");
  write_trials_csv(path, trials);
  const TrialParseResult parsed = read_trials_csv(path);
  ASSERT_EQ(parsed.trials.size(), trials.size());
  EXPECT_TRUE(parsed.warnings.empty());
  for (size_t i = 0; i < trials.size(); ++i) {
    EXPECT_EQ(parsed.trials[i].participant, trials[i].participant);
    EXPECT_EQ(parsed.trials[i].rating1, trials[i].rating1);
    EXPECT_EQ(parsed.trials[i].rating2, trials[i].rating2);
    EXPECT_EQ(parsed.trials[i].direction, trials[i].direction);
  }
  std::remove(path.c_str());
}

TEST(Csv, ValidationErrorsCarryContext) {
  const std::string path = temp_csv(
      "bw_invalid.csv",
      "participant,session,coherence_pct,direction,condition,t1,t2,rating1,rating2\n"
      "p01,1,2,R,1,0.5,1.5,40,55\n"
      "p01,1,2,X,1,0.5,1.5,40,55\n");
  try {
    read_trials_csv(path);
    FAIL() << "expected data_error";
  } catch (const data_error& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), "direction");
  }
  // same file parses with skip_invalid, dropping the bad row
  const TrialParseResult parsed = read_trials_csv(path, default_timings(), true);
  EXPECT_EQ(parsed.trials.size(), 1u);
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_EQ(parsed.warnings[0].line, 3);
  std::remove(path.c_str());
}

TEST(Csv, RejectsBadValues) {
  const std::string header =
      "participant,session,coherence_pct,direction,condition,t1,t2,rating1,rating2\n";
  for (const char* row :
       {"p01,1,3,R,1,0.5,1.5,40,55",      // bad coherence
        "p01,1,2,R,4,0.5,1.5,40,55",      // unknown condition
        "p01,1,2,R,1,0.6,1.5,40,55",      // timing mismatch
        "p01,1,2,R,1,0.5,1.5,140,55",     // rating range
        "p01,1,2,R,1,0.5,1.5,x,55"}) {    // not an integer
    const std::string path = temp_csv("bw_bad.csv", header + std::string(row) + "\n");
    EXPECT_THROW(read_trials_csv(path), data_error) << row;
    std::remove(path.c_str());
  }
}

TEST(Csv, UnknownColumnWarnsAndMissingColumnFails) {
  const std::string with_extra = temp_csv(
      "bw_extra.csv",
      "participant,session,coherence_pct,direction,condition,t1,t2,rating1,rating2,notes\n"
      "p01,1,2,R,1,0.5,1.5,40,55,hello\n");
  const TrialParseResult parsed = read_trials_csv(with_extra);
  EXPECT_EQ(parsed.trials.size(), 1u);
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_NE(parsed.warnings[0].message.find("notes"), std::string::npos);
  std::remove(with_extra.c_str());

  const std::string missing = temp_csv(
      "bw_missing.csv", "participant,session,coherence_pct,direction,condition,t1,t2,rating1\n");
  EXPECT_THROW(read_trials_csv(missing), data_error);
  std::remove(missing.c_str());
}

TEST(Simulate, DeterministicGivenSeed) {
  const ModelParams params = MarkovParams{0.35, 6.0};
  const auto a = simulate_trials(params, {0.5, 1.5}, 200, 123, {"p01", 1, 4, 1});
  const auto b = simulate_trials(params, {0.5, 1.5}, 200, 123, {"p01", 1, 4, 1});
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rating1, b[i].rating1);
    EXPECT_EQ(a[i].rating2, b[i].rating2);
    EXPECT_EQ(a[i].direction, b[i].direction);
  }
  const auto c = simulate_trials(params, {0.5, 1.5}, 200, 124, {"p01", 1, 4, 1});
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i)
    any_diff = any_diff || a[i].rating1 != c[i].rating1 || a[i].rating2 != c[i].rating2;
  EXPECT_TRUE(any_diff);
}

TEST(Simulate, DirectionBalanceExactForEvenCounts) {
  const auto trials =
      simulate_trials(ModelParams{MarkovParams{0.5, 1.0}}, {0.5, 1.5}, 100, 1, {});
  int left = 0;
  for (const auto& t : trials) left += t.direction == MotionDirection::Left ? 1 : 0;
  EXPECT_EQ(left, 50);
}

TEST(Simulate, ConvergesAtRootNRate) {
  const ModelParams params = MarkovParams{0.3, 8.0};
  const JointTable analytic = markov_joint(std::get<MarkovParams>(params), {0.5, 1.5});
  double previous_tv = 1.0;
  for (int n : {1000, 10000, 100000}) {
    const auto trials = simulate_trials(params, {0.5, 1.5}, n, 31, {"conv", 1, 2, 1});
    const auto cells = aggregate(trials);
    const double tv = total_variation(analytic, to_proportions(cells.front().counts));
    EXPECT_LT(tv, 6.0 / std::sqrt(static_cast<double>(n)));
    if (n > 1000) EXPECT_LT(tv, previous_tv * 2.0);  // noisy, but must not blow up
    previous_tv = tv;
  }
}

TEST(Simulate, QuantumRatingsStayInsideSampledBand) {
  const auto trials =
      simulate_trials(ModelParams{QuantumParams{2.0, 8.0}}, {0.5, 1.5}, 3000, 5, {});
  for (const auto& t : trials) {
    EXPECT_GE(t.rating1, 0);
    EXPECT_LE(t.rating1, 100);
    EXPECT_GE(t.rating2, 0);
    EXPECT_LE(t.rating2, 100);
  }
}

TEST(Simulate, RejectsBadArguments) {
  EXPECT_THROW(simulate_trials(ModelParams{MarkovParams{0.5, 1.0}}, {0.5, 1.5}, 0, 1, {}),
               parameter_error);
  EXPECT_THROW(simulate_trials(ModelParams{MarkovParams{0.5, 1.0}}, {1.5, 0.5}, 10, 1, {}),
               parameter_error);
}
