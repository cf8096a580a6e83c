#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "beliefwalk/error.hpp"
#include "beliefwalk/kernel.hpp"
#include "beliefwalk/models.hpp"
#include "beliefwalk/rng.hpp"

namespace beliefwalk {

enum class MotionDirection { Left, Right };

inline const char* direction_label(MotionDirection d) {
  return d == MotionDirection::Left ? "L" : "R";
}

// One experimental trial with its raw (un-rescored) ratings.
struct TrialRecord {
  std::string participant;
  int session = 1;
  int coherence_pct = 2;  // 2, 4, 8 or 16
  MotionDirection direction = MotionDirection::Right;
  int condition = 1;  // 1, 2 or 3
  double t1_s = 0;
  double t2_s = 0;
  int rating1 = 0;  // 0..100
  int rating2 = 0;
};

inline constexpr std::array<int, 4> kCoherenceLevels{2, 4, 8, 16};

struct TimingMap {
  std::map<int, TimingPair> by_condition;

  const TimingPair& at(int condition) const {
    auto it = by_condition.find(condition);
    if (it == by_condition.end())
      throw config_error("no timing configured for condition " + std::to_string(condition));
    return it->second;
  }
};

// The three-condition design: ratings at (0.5, 1.5), (1.5, 2.5), (0.5, 2.5).
inline TimingMap default_timings() {
  return {{{1, {0.5, 1.5}}, {2, {1.5, 2.5}}, {3, {0.5, 2.5}}}};
}

// --------------------------------------------------------------------------
// Rescoring and categorization

// Map a rating to the correct-direction frame: left-motion trials flip to
// 100 - rating.
inline int rescore(int rating, MotionDirection direction) {
  if (rating < 0 || rating > 100) throw data_error("rating outside 0..100");
  return direction == MotionDirection::Right ? rating : 100 - rating;
}

// Rating bands: 0-33 low, 34-66 mid, 67-100 high.
inline Category categorize(int rating) {
  if (rating < 0 || rating > 100) throw data_error("rating outside 0..100");
  if (rating <= 33) return Category::Low;
  if (rating <= 66) return Category::Mid;
  return Category::High;
}

// --------------------------------------------------------------------------
// Aggregation

struct CellDataset {
  std::string participant;
  int coherence_pct = 0;
  int condition = 0;
  Eigen::Matrix3d counts = Eigen::Matrix3d::Zero();  // rows: first response, cols: second
  int trial_count = 0;
};

// Group trials by (participant, coherence, condition) and tally the
// rescored, categorized rating pairs. Cells come out in canonical key order.
inline std::vector<CellDataset> aggregate(const std::vector<TrialRecord>& trials) {
  std::map<std::tuple<std::string, int, int>, CellDataset> groups;
  for (const TrialRecord& trial : trials) {
    const auto key = std::make_tuple(trial.participant, trial.coherence_pct, trial.condition);
    CellDataset& cell = groups[key];
    if (cell.trial_count == 0) {
      cell.participant = trial.participant;
      cell.coherence_pct = trial.coherence_pct;
      cell.condition = trial.condition;
    }
    const int first = static_cast<int>(categorize(rescore(trial.rating1, trial.direction)));
    const int second = static_cast<int>(categorize(rescore(trial.rating2, trial.direction)));
    cell.counts(first, second) += 1.0;
    cell.trial_count += 1;
  }
  std::vector<CellDataset> out;
  out.reserve(groups.size());
  for (auto& [key, cell] : groups) out.push_back(std::move(cell));
  return out;
}

// --------------------------------------------------------------------------
// CSV ingest / emit
//
// Schema: participant,session,coherence_pct,direction,condition,t1,t2,rating1,rating2
// Header row required. Unknown columns are ignored with a warning, missing
// required columns fail the parse.

struct CsvWarning {
  int line = 0;
  std::string message;
};

struct TrialParseResult {
  std::vector<TrialRecord> trials;
  std::vector<CsvWarning> warnings;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline int parse_int(const std::string& raw, const std::string& file, int line,
                     const std::string& column) {
  try {
    size_t pos = 0;
    const int value = std::stoi(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw data_error(file, line, column, "not an integer: '" + raw + "'");
  }
}

inline double parse_double(const std::string& raw, const std::string& file, int line,
                           const std::string& column) {
  try {
    size_t pos = 0;
    const double value = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw data_error(file, line, column, "not a number: '" + raw + "'");
  }
}

}  // namespace detail

inline constexpr const char* kTrialsCsvHeader =
    "participant,session,coherence_pct,direction,condition,t1,t2,rating1,rating2";

inline TrialParseResult read_trials_csv(const std::string& path,
                                        const TimingMap& timings = default_timings(),
                                        bool skip_invalid = false) {
  std::ifstream in(path);
  if (!in) throw data_error(path, 0, "", "cannot open file");

  TrialParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw data_error(path, 0, "", "empty file, header required");

  const std::vector<std::string> required = {"participant", "session", "coherence_pct",
                                             "direction",   "condition", "t1",
                                             "t2",          "rating1",   "rating2"};
  std::map<std::string, int> column_index;
  {
    const auto header = detail::split_csv_line(line);
    for (size_t i = 0; i < header.size(); ++i) {
      const std::string name = detail::trim(header[i]);
      if (std::find(required.begin(), required.end(), name) == required.end())
        result.warnings.push_back({1, "ignoring unknown column '" + name + "'"});
      column_index[name] = static_cast<int>(i);
    }
    for (const std::string& name : required)
      if (!column_index.count(name)) throw data_error(path, 1, name, "missing required column");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto fields = detail::split_csv_line(line);
      auto field = [&](const std::string& name) -> std::string {
        const int idx = column_index.at(name);
        if (idx >= static_cast<int>(fields.size()))
          throw data_error(path, line_no, name, "row has too few fields");
        return detail::trim(fields[idx]);
      };

      TrialRecord trial;
      trial.participant = field("participant");
      if (trial.participant.empty())
        throw data_error(path, line_no, "participant", "must not be empty");
      trial.session = detail::parse_int(field("session"), path, line_no, "session");
      trial.coherence_pct = detail::parse_int(field("coherence_pct"), path, line_no, "coherence_pct");
      if (std::find(kCoherenceLevels.begin(), kCoherenceLevels.end(), trial.coherence_pct) ==
          kCoherenceLevels.end())
        throw data_error(path, line_no, "coherence_pct", "must be one of 2, 4, 8, 16");

      const std::string dir = field("direction");
      if (dir == "L")
        trial.direction = MotionDirection::Left;
      else if (dir == "R")
        trial.direction = MotionDirection::Right;
      else
        throw data_error(path, line_no, "direction", "must be L or R, got '" + dir + "'");

      trial.condition = detail::parse_int(field("condition"), path, line_no, "condition");
      if (!timings.by_condition.count(trial.condition))
        throw data_error(path, line_no, "condition",
                         "unknown condition " + std::to_string(trial.condition));
      trial.t1_s = detail::parse_double(field("t1"), path, line_no, "t1");
      trial.t2_s = detail::parse_double(field("t2"), path, line_no, "t2");
      const TimingPair& expected = timings.at(trial.condition);
      if (std::abs(trial.t1_s - expected.first_s) > 1e-9 ||
          std::abs(trial.t2_s - expected.second_s) > 1e-9)
        throw data_error(path, line_no, "t1",
                         "timing does not match condition " + std::to_string(trial.condition));

      trial.rating1 = detail::parse_int(field("rating1"), path, line_no, "rating1");
      trial.rating2 = detail::parse_int(field("rating2"), path, line_no, "rating2");
      if (trial.rating1 < 0 || trial.rating1 > 100)
        throw data_error(path, line_no, "rating1", "rating outside 0..100");
      if (trial.rating2 < 0 || trial.rating2 > 100)
        throw data_error(path, line_no, "rating2", "rating outside 0..100");

      result.trials.push_back(std::move(trial));
    } catch (const data_error& e) {
      if (!skip_invalid) throw;
      result.warnings.push_back({line_no, std::string("skipped row: ") + e.what()});
    }
  }
  return result;
}

inline void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials) {
  std::ofstream out(path);
  if (!out) throw data_error(path, 0, "", "cannot open file for writing");
  out << kTrialsCsvHeader << "\n";
  // shortest round-trip formatting keeps re-ingested times bit-identical for
  // any timing override
  auto shortest = [](double value, char* buf, size_t n) {
    const auto result = std::to_chars(buf, buf + n - 1, value);
    *result.ptr = '\0';
    return buf;
  };
  char t1[32], t2[32];
  for (const TrialRecord& t : trials) {
    out << t.participant << ',' << t.session << ',' << t.coherence_pct << ','
        << direction_label(t.direction) << ',' << t.condition << ','
        << shortest(t.t1_s, t1, sizeof(t1)) << ',' << shortest(t.t2_s, t2, sizeof(t2)) << ','
        << t.rating1 << ',' << t.rating2 << "\n";
  }
  if (!out) throw data_error(path, 0, "", "write failed");
}

// --------------------------------------------------------------------------
// Trial simulation (Monte Carlo oracle and synthetic-data factory)

struct TrialLabels {
  std::string participant = "sim";
  int session = 1;
  int coherence_pct = 2;
  int condition = 1;
};

namespace detail {

// Exact event-time walk on states 1..99: exponential holding times at rate
// down+up (boundary states only expose the inward rate), upward moves with
// probability up/(down+up).
inline int walk_to(Rng& rng, int state, double from_s, double to_s, double down, double up) {
  double now = from_s;
  while (true) {
    const double rate_down = state > 1 ? down : 0.0;
    const double rate_up = state < kStateCount ? up : 0.0;
    const double rate = rate_down + rate_up;
    const double hold = rng.exponential(rate);
    if (now + hold >= to_s) return state;
    now += hold;
    state += rng.bernoulli(rate_up / rate) ? 1 : -1;
  }
}

inline int sample_initial_state(Rng& rng, const Eigen::VectorXd& probs) {
  return 1 + rng.categorical(probs, static_cast<int>(probs.size()));
}

// Raw rating recorded for a trial: the model runs in the correct-direction
// frame, so left-motion trials store the flipped value.
inline int raw_rating(int frame_rating, MotionDirection d) {
  return d == MotionDirection::Right ? frame_rating : 100 - frame_rating;
}

// Rating band on the 0..100 scale for a sampled category.
inline std::pair<int, int> rating_band(Category c) {
  switch (c) {
    case Category::Low: return {0, 33};
    case Category::Mid: return {34, 66};
    default: return {67, 100};
  }
}

}  // namespace detail

// Simulate n trials of the given model. Deterministic in (params, timing, n,
// seed, labels); the RNG stream is derived from the seed and the labels, so a
// multi-cell corpus is reproducible regardless of generation order.
inline std::vector<TrialRecord> simulate_trials(const ModelParams& params,
                                                const TimingPair& timing, int n,
                                                std::uint64_t seed,
                                                const TrialLabels& labels = {}) {
  if (n <= 0) throw parameter_error("trial count must be positive");
  validate(params);
  validate(timing);

  std::uint64_t stream = mix_seed(seed, labels.participant);
  stream = mix_seed(stream, static_cast<std::uint64_t>(labels.coherence_pct));
  stream = mix_seed(stream, static_cast<std::uint64_t>(labels.condition));
  stream = mix_seed(stream, static_cast<std::uint64_t>(family_of(params)));
  Rng rng(stream);

  const Eigen::VectorXd start_probs = initial_markov_state().probs;
  const ModelFamily family = family_of(params);

  // Quantum trials share the per-category second-stage distributions.
  Eigen::Vector3d first_probs = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second_given_first = Eigen::Matrix3d::Zero();
  if (family == ModelFamily::Quantum) {
    const auto& qp = std::get<QuantumParams>(params);
    const QuantumPropagator prop(qp.potential_slope, qp.coupling);
    const Eigen::VectorXcd at_first = prop.apply(initial_quantum_state().amps, timing.first_s);
    const double gap = timing.second_s - timing.first_s;
    for (Category k : kCategories) {
      const double mass = band_sqnorm(at_first, k);
      first_probs(static_cast<int>(k)) = mass;
      if (mass < 1e-300) continue;
      const Eigen::VectorXcd collapsed = project(at_first, k) / std::sqrt(mass);
      const Eigen::VectorXcd at_second = prop.apply(collapsed, gap);
      for (Category l : kCategories)
        second_given_first(static_cast<int>(k), static_cast<int>(l)) = band_sqnorm(at_second, l);
    }
  }

  std::vector<TrialRecord> trials;
  trials.reserve(n);
  for (int i = 0; i < n; ++i) {
    TrialRecord trial;
    trial.participant = labels.participant;
    trial.session = labels.session;
    trial.coherence_pct = labels.coherence_pct;
    trial.condition = labels.condition;
    trial.t1_s = timing.first_s;
    trial.t2_s = timing.second_s;
    trial.direction = (i % 2 == 0) ? MotionDirection::Right : MotionDirection::Left;

    if (family == ModelFamily::Quantum) {
      const int k = rng.categorical(first_probs, 3);
      const Eigen::Vector3d row = second_given_first.row(k);
      const int l = rng.categorical(row, 3);
      const auto [lo1, hi1] = detail::rating_band(static_cast<Category>(k));
      const auto [lo2, hi2] = detail::rating_band(static_cast<Category>(l));
      trial.rating1 = detail::raw_rating(rng.uniform_int(lo1, hi1), trial.direction);
      trial.rating2 = detail::raw_rating(rng.uniform_int(lo2, hi2), trial.direction);
    } else {
      double drift, diffusion;
      if (family == ModelFamily::Markov) {
        const auto& mp = std::get<MarkovParams>(params);
        drift = mp.drift;
        diffusion = mp.diffusion;
      } else {
        const auto& vp = std::get<MarkovVParams>(params);
        drift = clamp_drift(static_cast<double>(rng.binomial(kStimulusDots, vp.success_prob)) /
                            kStimulusDots);
        diffusion = vp.diffusion;
      }
      const auto [down, up] = markov_rates(drift, diffusion);
      int state = detail::sample_initial_state(rng, start_probs);
      state = detail::walk_to(rng, state, 0.0, timing.first_s, down, up);
      trial.rating1 = detail::raw_rating(state, trial.direction);
      state = detail::walk_to(rng, state, timing.first_s, timing.second_s, down, up);
      trial.rating2 = detail::raw_rating(state, trial.direction);
    }
    trials.push_back(std::move(trial));
  }
  return trials;
}

// Total variation distance between two probability tables.
inline double total_variation(const JointTable& a, const JointTable& b) {
  return 0.5 * (a.cells - b.cells).cwiseAbs().sum();
}

// Normalize a count table to proportions.
inline JointTable to_proportions(const Eigen::Matrix3d& counts) {
  const double total = counts.sum();
  if (total <= 0) throw data_error("cannot normalize an empty count table");
  return {counts / total};
}

}  // namespace beliefwalk
