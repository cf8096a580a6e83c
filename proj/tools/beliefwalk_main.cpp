// beliefwalk: batch pipeline for the Markov / quantum / Markov-V belief
// dynamics models — synthetic corpora, maximum-likelihood calibration,
// held-out-condition prediction, treatment statistics and report rendering.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "beliefwalk/dataio.hpp"
#include "beliefwalk/error.hpp"
#include "beliefwalk/inference.hpp"
#include "beliefwalk/models.hpp"
#include "beliefwalk/parallel.hpp"
#include "beliefwalk/report.hpp"
#include "beliefwalk/serialize.hpp"
#include "beliefwalk/stats.hpp"

namespace fs = std::filesystem;
using namespace beliefwalk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;
constexpr int kExitCoverage = 4;
constexpr int kExitRender = 5;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<int> coherence;  // empty = all levels
  std::vector<std::string> models{"markov", "quantum"};
  bool skip_invalid = false;
  bool allow_nonconverged = false;
  int threads = default_thread_count();
  std::vector<std::string> timing_overrides;
};

TimingMap resolve_timings(const GlobalOptions& opts) {
  TimingMap map = default_timings();
  for (const std::string& spec : opts.timing_overrides) {
    // format: COND=T1:T2
    const auto eq = spec.find('=');
    const auto colon = spec.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq)
      throw data_error("bad --timing value '" + spec + "', expected COND=T1:T2");
    try {
      const int condition = std::stoi(spec.substr(0, eq));
      const double t1 = std::stod(spec.substr(eq + 1, colon - eq - 1));
      const double t2 = std::stod(spec.substr(colon + 1));
      validate(TimingPair{t1, t2});
      map.by_condition[condition] = {t1, t2};
    } catch (const std::logic_error&) {
      throw data_error("bad --timing value '" + spec + "', expected COND=T1:T2");
    }
  }
  return map;
}

std::vector<int> resolve_coherence(const GlobalOptions& opts) {
  if (opts.coherence.empty())
    return {kCoherenceLevels.begin(), kCoherenceLevels.end()};
  std::vector<int> levels = opts.coherence;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (int level : levels)
    if (std::find(kCoherenceLevels.begin(), kCoherenceLevels.end(), level) ==
        kCoherenceLevels.end())
      throw data_error("coherence must be one of 2, 4, 8, 16; got " + std::to_string(level));
  return levels;
}

std::vector<ModelFamily> resolve_families(const GlobalOptions& opts) {
  std::vector<ModelFamily> families;
  for (const std::string& name : opts.models) {
    const ModelFamily f = parse_family(name);
    if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
  }
  std::sort(families.begin(), families.end());
  if (families.empty()) throw data_error("at least one model family is required");
  return families;
}

void print_warnings(const std::vector<CsvWarning>& warnings) {
  for (const CsvWarning& w : warnings)
    std::cerr << "warning: line " << w.line << ": " << w.message << "\n";
}

std::vector<TrialRecord> load_trials(const std::string& path, const TimingMap& timings,
                                     const GlobalOptions& opts,
                                     const std::vector<int>& levels) {
  TrialParseResult parsed = read_trials_csv(path, timings, opts.skip_invalid);
  print_warnings(parsed.warnings);
  std::vector<TrialRecord> kept;
  kept.reserve(parsed.trials.size());
  for (TrialRecord& t : parsed.trials)
    if (std::find(levels.begin(), levels.end(), t.coherence_pct) != levels.end())
      kept.push_back(std::move(t));
  return kept;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error(path, 0, "", "cannot open file");
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw data_error(path, 0, "", std::string("invalid JSON: ") + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error(path, 0, "", "cannot open file for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw data_error(path, 0, "", "write failed");
}

// --------------------------------------------------------------------------
// Built-in generating parameters for `simulate`, per coherence level. The
// drift toward the correct direction strengthens with coherence, mirroring
// the difficulty manipulation of the design; override with --params-file.
ModelParams default_generating_params(ModelFamily family, int coherence_pct) {
  const int idx = coherence_pct == 2 ? 0 : coherence_pct == 4 ? 1 : coherence_pct == 8 ? 2 : 3;
  switch (family) {
    case ModelFamily::Markov: {
      constexpr double drift[4] = {0.30, 0.25, 0.19, 0.13};
      return MarkovParams{drift[idx], 10.0};
    }
    case ModelFamily::Quantum: {
      constexpr double slope[4] = {4.0, 6.0, 8.0, 10.0};
      return QuantumParams{slope[idx], 10.0};
    }
    default: {
      constexpr double success[4] = {0.30, 0.25, 0.19, 0.13};
      return MarkovVParams{success[idx], 10.0};
    }
  }
}

ModelParams generating_params(ModelFamily family, int coherence_pct, const json* params_file) {
  if (!params_file) return default_generating_params(family, coherence_pct);
  const std::string fam = family_name(family);
  const std::string coh = std::to_string(coherence_pct);
  if (!params_file->contains(fam) || !params_file->at(fam).contains(coh))
    throw data_error("params file lacks entry for " + fam + " at coherence " + coh);
  return params_from_json(family, params_file->at(fam).at(coh));
}

// --------------------------------------------------------------------------
// subcommand: simulate

struct SimulateOptions {
  int trials_per_cell = 84;
  int participants = 11;
  std::string params_file;
};

int cmd_simulate(const GlobalOptions& global, const SimulateOptions& opts, bool models_explicit) {
  const TimingMap timings = resolve_timings(global);
  const std::vector<int> levels = resolve_coherence(global);
  // default family is quantum; an explicit --model must name exactly one
  ModelFamily family = ModelFamily::Quantum;
  if (models_explicit) {
    const std::vector<ModelFamily> families = resolve_families(global);
    if (families.size() != 1)
      throw data_error("simulate generates from exactly one family; pass a single --model");
    family = families.front();
  }
  if (opts.trials_per_cell <= 0) throw parameter_error("--trials-per-cell must be positive");
  if (opts.participants <= 0) throw parameter_error("--participants must be positive");

  json params_doc;
  const json* params_ptr = nullptr;
  if (!opts.params_file.empty()) {
    params_doc = read_json_file(opts.params_file);
    params_ptr = &params_doc;
  }

  std::vector<TrialRecord> corpus;
  for (int p = 0; p < opts.participants; ++p) {
    char id[16];
    std::snprintf(id, sizeof(id), "p%02d", p + 1);
    for (int level : levels) {
      const ModelParams params = generating_params(family, level, params_ptr);
      validate(params);
      for (const auto& [condition, timing] : timings.by_condition) {
        TrialLabels labels{id, 1, level, condition};
        std::vector<TrialRecord> trials =
            simulate_trials(params, timing, opts.trials_per_cell, global.seed, labels);
        for (size_t i = 0; i < trials.size(); ++i)
          trials[i].session = 1 + static_cast<int>(i * 3 / trials.size());
        corpus.insert(corpus.end(), trials.begin(), trials.end());
      }
    }
  }

  fs::create_directories(global.out_dir);
  const std::string path = (fs::path(global.out_dir) / "trials.csv").string();
  write_trials_csv(path, corpus);
  std::cout << "wrote " << corpus.size() << " trials to " << path << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// subcommand: fit

struct FitJob {
  std::string participant;
  int coherence_pct = 0;
  ModelFamily family = ModelFamily::Markov;
  std::vector<ConditionData> conditions;
};

int cmd_fit(const GlobalOptions& global, const std::string& input) {
  const TimingMap timings = resolve_timings(global);
  const std::vector<int> levels = resolve_coherence(global);
  const std::vector<ModelFamily> families = resolve_families(global);
  const std::vector<TrialRecord> trials = load_trials(input, timings, global, levels);
  if (trials.empty()) throw data_error("no trials left after filtering");
  const std::vector<CellDataset> cells = aggregate(trials);

  // calibration uses conditions 1 and 2
  std::map<std::pair<std::string, int>, std::map<int, Eigen::Matrix3d>> calib;
  for (const CellDataset& cell : cells)
    if (cell.condition == 1 || cell.condition == 2)
      calib[{cell.participant, cell.coherence_pct}][cell.condition] = cell.counts;

  std::vector<FitJob> jobs;
  for (const auto& [key, by_condition] : calib) {
    if (!by_condition.count(1) || !by_condition.count(2))
      throw data_error("cell (" + key.first + ", " + std::to_string(key.second) +
                       "%) lacks condition 1 or 2 trials needed for calibration");
    for (ModelFamily family : families) {
      FitJob job;
      job.participant = key.first;
      job.coherence_pct = key.second;
      job.family = family;
      job.conditions = {{by_condition.at(1), timings.at(1)},
                        {by_condition.at(2), timings.at(2)}};
      jobs.push_back(std::move(job));
    }
  }

  std::vector<FitResult> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), global.threads, [&](int i) {
    FitResult r = fit(jobs[i].family, jobs[i].conditions);
    r.participant = jobs[i].participant;
    r.coherence_pct = jobs[i].coherence_pct;
    results[i] = std::move(r);
  });

  std::sort(results.begin(), results.end(), [](const FitResult& a, const FitResult& b) {
    return std::tie(a.participant, a.coherence_pct, a.family) <
           std::tie(b.participant, b.coherence_pct, b.family);
  });

  fs::create_directories(global.out_dir);
  const std::string path = (fs::path(global.out_dir) / "fits.json").string();
  write_json_file(path, fits_file_to_json(results, timings));
  std::cout << "wrote " << results.size() << " fits to " << path << "\n";

  std::vector<std::string> stuck;
  for (const FitResult& r : results)
    if (!r.converged)
      stuck.push_back("(" + r.participant + ", " + std::to_string(r.coherence_pct) + "%, " +
                      family_name(r.family) + ")");
  if (!stuck.empty() && !global.allow_nonconverged) {
    std::cerr << "error: non-converged fits:";
    for (const std::string& s : stuck) std::cerr << " " << s;
    std::cerr << "\n";
    return kExitFit;
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// subcommand: predict

int cmd_predict(const GlobalOptions& global, const std::string& input,
                const std::string& fits_path) {
  const TimingMap timings = resolve_timings(global);
  const std::vector<int> levels = resolve_coherence(global);
  const std::vector<TrialRecord> trials = load_trials(input, timings, global, levels);
  const std::vector<CellDataset> cells = aggregate(trials);
  const std::vector<FitResult> fits = fits_from_json(read_json_file(fits_path));

  const GeneralizationReport report = generalization_test(fits, cells, timings.at(3), 3);
  fs::create_directories(global.out_dir);
  const std::string path = (fs::path(global.out_dir) / "generalization.json").string();
  write_json_file(path, generalization_to_json(report));
  std::cout << "wrote generalization report for " << report.cells.size() << " cells to " << path
            << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// subcommand: test

int cmd_test(const GlobalOptions& global, const std::string& input) {
  const TimingMap timings = resolve_timings(global);
  const std::vector<int> levels = resolve_coherence(global);
  const std::vector<TrialRecord> trials = load_trials(input, timings, global, levels);
  if (trials.empty()) throw data_error("no trials left after filtering");
  const std::vector<CellDataset> cells = aggregate(trials);

  std::set<std::string> participants;
  for (const CellDataset& c : cells) participants.insert(c.participant);
  const Eigen::VectorXd zero3 = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd zero9 = Eigen::VectorXd::Zero(9);

  json analysis;
  analysis["schema"] = kAnalysisSchemaId;

  // Interference on marginals, per coherence: condition-1 second response vs
  // condition-2 first response.
  json marginal_reports = json::array();
  for (int level : levels) {
    LabeledCounts cond1_second, cond2_first;
    for (const std::string& p : participants) {
      cond1_second[p] = zero3;
      cond2_first[p] = zero3;
    }
    bool any = false;
    for (const CellDataset& c : cells) {
      if (c.coherence_pct != level) continue;
      any = true;
      if (c.condition == 1)
        cond1_second[c.participant] = c.counts.colwise().sum().transpose();
      else if (c.condition == 2)
        cond2_first[c.participant] = c.counts.rowwise().sum();
    }
    if (!any) continue;
    const TestReport report = g2_marginal_test(cond1_second, cond2_first);
    json entry;
    entry["coherence_pct"] = level;
    entry["report"] = test_report_to_json(report);
    marginal_reports.push_back(entry);
  }
  analysis["marginal_interference"] = marginal_reports;

  // Joint-distribution differences, pooled across coherence per participant.
  auto joint_counts = [&](int condition) {
    LabeledCounts out;
    for (const std::string& p : participants) out[p] = zero9;
    for (const CellDataset& c : cells) {
      if (c.condition != condition) continue;
      Eigen::VectorXd flat(9);
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) flat(3 * k + l) = c.counts(k, l);
      out[c.participant] += flat;
    }
    return out;
  };
  analysis["joint_1_vs_3"] = test_report_to_json(g2_joint_test(joint_counts(1), joint_counts(3)));
  analysis["joint_2_vs_3"] = test_report_to_json(g2_joint_test(joint_counts(2), joint_counts(3)));

  // Hotelling test on mean rating change (t2 - t1, correct-direction frame)
  // per participant x coherence, averaged over conditions.
  std::map<std::string, Eigen::VectorXd> mean_change;
  {
    std::map<std::string, std::array<std::pair<double, int>, 4>> sums;
    auto level_index = [&](int pct) {
      return static_cast<int>(std::find(levels.begin(), levels.end(), pct) - levels.begin());
    };
    for (const TrialRecord& t : trials) {
      const int idx = level_index(t.coherence_pct);
      auto& slot = sums[t.participant][idx];
      slot.first += rescore(t.rating2, t.direction) - rescore(t.rating1, t.direction);
      slot.second += 1;
    }
    for (const auto& [participant, by_level] : sums) {
      Eigen::VectorXd change(static_cast<int>(levels.size()));
      for (size_t i = 0; i < levels.size(); ++i)
        change(static_cast<int>(i)) =
            by_level[i].second > 0 ? by_level[i].first / by_level[i].second : 0.0;
      mean_change[participant] = change;
    }
  }
  analysis["mean_change_hotelling"] = test_report_to_json(hotelling_change_test(mean_change));

  fs::create_directories(global.out_dir);
  const std::string path = (fs::path(global.out_dir) / "analysis.json").string();
  write_json_file(path, analysis);
  std::cout << "wrote analysis to " << path << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// subcommand: report

Eigen::VectorXd rating_frequencies(const std::vector<TrialRecord>& trials, int coherence,
                                   int condition, bool second_response) {
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(101);
  double total = 0;
  for (const TrialRecord& t : trials) {
    if (t.coherence_pct != coherence || t.condition != condition) continue;
    const int rating = rescore(second_response ? t.rating2 : t.rating1, t.direction);
    freq(rating) += 1;
    total += 1;
  }
  if (total > 0) freq /= total;
  return freq;
}

int cmd_report(const GlobalOptions& global, const std::string& input,
               const std::string& fits_path) {
  const TimingMap timings = resolve_timings(global);
  const std::vector<int> levels = resolve_coherence(global);
  const std::vector<TrialRecord> trials = load_trials(input, timings, global, levels);
  const std::vector<FitResult> fits = fits_from_json(read_json_file(fits_path));

  const fs::path report_dir = fs::path(global.out_dir) / "report";
  fs::create_directories(report_dir);
  if (trials.empty()) {
    std::cerr << "warning: no trials left after filtering; report directory left empty\n";
    return kExitOk;
  }
  const std::vector<CellDataset> cells = aggregate(trials);

  std::vector<std::string> written;
  try {
    // Heatmaps at the mean fitted parameters per family, over the full span
    // of the slowest condition.
    double t_max = 0;
    for (const auto& [cond, pair] : timings.by_condition) t_max = std::max(t_max, pair.second_s);
    const int steps = 60;
    std::map<ModelFamily, std::pair<Eigen::Vector2d, int>> param_sums;
    for (const FitResult& f : fits) {
      auto [it, fresh] =
          param_sums.try_emplace(f.family, Eigen::Vector2d::Zero().eval(), 0);
      it->second.first += params_as_vector(f.params);
      it->second.second += 1;
    }
    for (const auto& [family, sum] : param_sums) {
      const Eigen::Vector2d mean = sum.first / sum.second;
      Eigen::MatrixXd history;
      if (family == ModelFamily::Quantum) {
        history = quantum_state_history(QuantumParams{mean(0), mean(1)}, t_max, steps);
      } else if (family == ModelFamily::Markov) {
        history = markov_state_history(MarkovParams{mean(0), mean(1)}, t_max, steps);
      } else {
        history = markov_v_state_history(MarkovVParams{mean(0), mean(1)}, t_max, steps);
      }
      const std::string name = std::string("heatmap_") + family_name(family) + ".svg";
      const fs::path path = report_dir / name;
      written.push_back(path.string());
      write_text_file(path.string(),
                      render_heatmap_svg(history, std::string("state evolution: ") +
                                                      family_name(family), t_max));
    }

    // Observed vs predicted condition-3 tables per coherence, averaged
    // across participants.
    std::map<std::pair<std::string, int>, std::vector<const FitResult*>> fit_index;
    for (const FitResult& f : fits) fit_index[{f.participant, f.coherence_pct}].push_back(&f);
    for (int level : levels) {
      Eigen::Matrix3d observed = Eigen::Matrix3d::Zero();
      int observed_n = 0;
      std::map<ModelFamily, std::pair<Eigen::Matrix3d, int>> predicted;
      for (const CellDataset& c : cells) {
        if (c.coherence_pct != level || c.condition != 3) continue;
        observed += to_proportions(c.counts).cells;
        ++observed_n;
        auto it = fit_index.find({c.participant, c.coherence_pct});
        if (it == fit_index.end()) continue;
        for (const FitResult* f : it->second) {
          auto [slot, fresh] =
              predicted.try_emplace(f->family, Eigen::Matrix3d::Zero().eval(), 0);
          slot->second.first += model_joint(f->params, timings.at(3)).cells;
          slot->second.second += 1;
        }
      }
      if (observed_n == 0) continue;
      observed /= observed_n;
      std::vector<std::pair<std::string, Eigen::Matrix3d>> blocks;
      for (const auto& [family, slot] : predicted)
        blocks.emplace_back(family_name(family), slot.first / slot.second);

      const std::string heading = "Coherence " + std::to_string(level) + "%";
      const fs::path md_path = report_dir / ("tables_coh" + std::to_string(level) + ".md");
      const fs::path csv_path = report_dir / ("tables_coh" + std::to_string(level) + ".csv");
      written.push_back(md_path.string());
      write_text_file(md_path.string(), render_joint_tables_markdown(heading, observed, blocks));
      written.push_back(csv_path.string());
      write_text_file(csv_path.string(),
                      render_joint_tables_csv(std::to_string(level), observed, blocks));
    }

    // Rating-distribution comparison: condition 1 second response vs
    // condition 2 first response, with difference panel.
    for (int level : levels) {
      const Eigen::VectorXd first = rating_frequencies(trials, level, 1, true);
      const Eigen::VectorXd second = rating_frequencies(trials, level, 2, false);
      if (first.sum() == 0 && second.sum() == 0) continue;
      const fs::path path = report_dir / ("ratings_coh" + std::to_string(level) + ".svg");
      written.push_back(path.string());
      write_text_file(path.string(),
                      render_rating_bars_svg("Rating distributions, coherence " +
                                                 std::to_string(level) + "%",
                                             first, "condition 1 at t2", second,
                                             "condition 2 at t1"));
    }
  } catch (const std::exception& e) {
    for (const std::string& path : written) fs::remove(path);
    std::cerr << "error: report rendering failed: " << e.what() << "\n";
    return kExitRender;
  }
  std::cout << "wrote " << written.size() << " report files to " << report_dir.string() << "\n";
  return kExitOk;
}

int print_schemas() {
  json doc;
  doc["fits"] = fits_schema();
  doc["generalization"] = generalization_schema();
  doc["analysis"] = analysis_schema();
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions global;
  bool want_schema = false;

  CLI::App app{"belief-dynamics model pipeline: simulate, fit, predict, test, report"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.add_option("--seed", global.seed, "RNG seed for simulation");
  app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
  app.add_option("--coherence", global.coherence, "coherence levels to include (default all)")
      ->delimiter(',');
  app.add_option("--model", global.models, "model families (markov, quantum, markovv)")
      ->delimiter(',');
  app.add_flag("--skip-invalid", global.skip_invalid, "skip invalid CSV rows with a warning");
  app.add_flag("--allow-nonconverged", global.allow_nonconverged,
               "do not fail when a fit hits the iteration cap");
  app.add_option("--threads", global.threads, "worker threads for fitting");
  app.add_option("--timing", global.timing_overrides,
                 "override a condition timing, e.g. 3=0.5:2.5 (repeatable)");
  app.add_flag("--print-schema", want_schema, "print the JSON output schemas and exit");

  SimulateOptions sim_opts;
  std::string input_path, fits_path;

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic trial corpus");
  sim->add_option("--trials-per-cell", sim_opts.trials_per_cell,
                  "trials per participant x coherence x condition cell")
      ->capture_default_str();
  sim->add_option("--participants", sim_opts.participants, "number of participants")
      ->capture_default_str();
  sim->add_option("--params-file", sim_opts.params_file,
                  "JSON file with per-family, per-coherence generating parameters");

  CLI::App* fit_cmd = app.add_subcommand("fit", "calibrate models on conditions 1 and 2");
  fit_cmd->add_option("--input", input_path, "trials CSV")->required();

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "score calibrated models on condition 3");
  predict_cmd->add_option("--input", input_path, "trials CSV")->required();
  predict_cmd->add_option("--fits", fits_path, "fits JSON from the fit step")->required();

  CLI::App* test_cmd = app.add_subcommand("test", "treatment-effect statistics");
  test_cmd->add_option("--input", input_path, "trials CSV")->required();

  CLI::App* report_cmd = app.add_subcommand("report", "figures and tables");
  report_cmd->add_option("--input", input_path, "trials CSV")->required();
  report_cmd->add_option("--fits", fits_path, "fits JSON from the fit step")->required();

  CLI11_PARSE(app, argc, argv);

  if (want_schema) return print_schemas();
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kExitOk;
  }

  try {
    if (sim->parsed()) return cmd_simulate(global, sim_opts, app.count("--model") > 0);
    if (fit_cmd->parsed()) return cmd_fit(global, input_path);
    if (predict_cmd->parsed()) return cmd_predict(global, input_path, fits_path);
    if (test_cmd->parsed()) return cmd_test(global, input_path);
    if (report_cmd->parsed()) return cmd_report(global, input_path, fits_path);
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCoverage;
  } catch (const render_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRender;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFit;
  }
  return kExitOk;
}
