#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "beliefwalk/dataio.hpp"
#include "beliefwalk/error.hpp"
#include "beliefwalk/models.hpp"

namespace beliefwalk {

// Floor applied to model probabilities inside logs, so empty-cell predictions
// penalize heavily instead of producing -inf.
inline constexpr double kProbabilityFloor = 1e-12;

struct ConditionData {
  Eigen::Matrix3d counts = Eigen::Matrix3d::Zero();
  TimingPair timing{0.5, 1.5};
};

// Multinomial log-likelihood summed over independent condition tables.
inline double log_likelihood(const ModelParams& params,
                             const std::vector<ConditionData>& conditions) {
  double total_count = 0;
  for (const ConditionData& c : conditions) total_count += c.counts.sum();
  if (total_count <= 0) throw data_error("degenerate data: all counts are zero");

  const JointEvaluator evaluator(params);  // one propagator build per parameter vector
  double loglik = 0;
  for (const ConditionData& c : conditions) {
    if (c.counts.sum() <= 0) continue;
    const JointTable predicted = evaluator.joint(c.timing);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const double count = c.counts(k, l);
        if (count < 0) throw data_error("negative count in data table");
        if (count == 0) continue;
        loglik += count * std::log(std::max(predicted.cells(k, l), kProbabilityFloor));
      }
  }
  return loglik;
}

// Deviance of an a-priori prediction: -2 sum count*ln(p).
inline double g2_discrepancy(const JointTable& predicted, const Eigen::Matrix3d& counts) {
  double loglik = 0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      if (counts(k, l) == 0) continue;
      loglik += counts(k, l) * std::log(std::max(predicted.cells(k, l), kProbabilityFloor));
    }
  return -2.0 * loglik;
}

// --------------------------------------------------------------------------
// Maximum-likelihood fit: coarse grid seed + Nelder-Mead refinement.
//
// The schedule is fixed so identical inputs give bitwise-identical results:
// grid 24x24 (midpoint placement inside open bounds), simplex coefficients
// reflect 1 / expand 2 / contract 0.5 / shrink 0.5, stop when the simplex
// spans less than 1e-5 in every parameter, cap 400 iterations.

struct FitOptions {
  int grid_points = 24;
  double tolerance = 1e-5;
  int max_iterations = 400;
};

struct FitResult {
  std::string participant;
  int coherence_pct = 0;
  ModelFamily family = ModelFamily::Markov;
  ModelParams params = MarkovParams{0.5, 1.0};
  double log_lik = 0;
  double g2 = 0;  // -2 * log_lik
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct SearchBox {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;
  bool lo_closed[2];  // whether the lower edge itself is admissible
};

inline SearchBox search_box(ModelFamily family) {
  switch (family) {
    case ModelFamily::Markov:
    case ModelFamily::MarkovV:
      return {{kDriftClamp, kDriftClamp}, {1.0 - kDriftClamp, 10.0}, {false, false}};
    default:  // quantum: potential in [0,10], coupling in (0,10]
      return {{0.0, kDriftClamp}, {10.0, 10.0}, {true, false}};
  }
}

inline ModelParams decode(ModelFamily family, const Eigen::Vector2d& x) {
  switch (family) {
    case ModelFamily::Markov: return MarkovParams{x(0), x(1)};
    case ModelFamily::Quantum: return QuantumParams{x(0), x(1)};
    default: return MarkovVParams{x(0), x(1)};
  }
}

struct NelderMeadOutcome {
  Eigen::Vector2d best;
  double value;
  int iterations;
  bool converged;
};

// 2-parameter Nelder-Mead with the fixed schedule above. Evaluations outside
// the box return +inf, which folds the box constraint into the simplex moves.
inline NelderMeadOutcome nelder_mead(const std::function<double(const Eigen::Vector2d&)>& f,
                                     const Eigen::Vector2d& start,
                                     const Eigen::Vector2d& step, const FitOptions& opts) {
  std::array<Eigen::Vector2d, 3> xs{start, start, start};
  xs[1](0) += step(0);
  xs[2](1) += step(1);
  std::array<double, 3> fs{f(xs[0]), f(xs[1]), f(xs[2])};

  auto order = [&] {
    // insertion order over 3 vertices; stable for exact ties
    if (fs[0] > fs[1]) { std::swap(fs[0], fs[1]); std::swap(xs[0], xs[1]); }
    if (fs[1] > fs[2]) { std::swap(fs[1], fs[2]); std::swap(xs[1], xs[2]); }
    if (fs[0] > fs[1]) { std::swap(fs[0], fs[1]); std::swap(xs[0], xs[1]); }
  };
  order();

  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iterations; ++iter) {
    const double spread = std::max((xs[1] - xs[0]).cwiseAbs().maxCoeff(),
                                   (xs[2] - xs[0]).cwiseAbs().maxCoeff());
    if (spread <= opts.tolerance) {
      converged = true;
      break;
    }

    const Eigen::Vector2d centroid = 0.5 * (xs[0] + xs[1]);
    const Eigen::Vector2d reflected = centroid + (centroid - xs[2]);
    const double fr = f(reflected);

    if (fr < fs[0]) {
      const Eigen::Vector2d expanded = centroid + 2.0 * (reflected - centroid);
      const double fe = f(expanded);
      if (fe < fr) { xs[2] = expanded; fs[2] = fe; }
      else { xs[2] = reflected; fs[2] = fr; }
    } else if (fr < fs[1]) {
      xs[2] = reflected;
      fs[2] = fr;
    } else {
      const bool outside = fr < fs[2];
      const Eigen::Vector2d contracted =
          outside ? (centroid + 0.5 * (reflected - centroid)).eval()
                  : (centroid + 0.5 * (xs[2] - centroid)).eval();
      const double fc = f(contracted);
      if (fc < (outside ? fr : fs[2])) {
        xs[2] = contracted;
        fs[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  return {xs[0], fs[0], iter, converged};
}

}  // namespace detail

inline FitResult fit(ModelFamily family, const std::vector<ConditionData>& conditions,
                     const FitOptions& opts = {}) {
  if (conditions.empty()) throw data_error("fit requires at least one condition table");
  for (const ConditionData& c : conditions)
    if (c.counts.sum() <= 0) throw data_error("degenerate data: a condition table is empty");

  const detail::SearchBox box = detail::search_box(family);
  auto inside = [&](const Eigen::Vector2d& x) {
    // open lower bounds already carry their clamp value in box.lo
    for (int i = 0; i < 2; ++i)
      if (x(i) < box.lo(i) || x(i) > box.hi(i)) return false;
    return true;
  };
  auto objective = [&](const Eigen::Vector2d& x) -> double {
    if (!inside(x)) return std::numeric_limits<double>::infinity();
    return -log_likelihood(detail::decode(family, x), conditions);
  };

  // Coarse grid seed. Midpoints keep open-interval parameters interior; the
  // quantum potential axis is closed at 0 and sampled inclusively.
  const int g = opts.grid_points;
  Eigen::Vector2d best_x = 0.5 * (box.lo + box.hi);
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      Eigen::Vector2d x;
      x(0) = box.lo_closed[0] ? box.lo(0) + (box.hi(0) - box.lo(0)) * i / (g - 1.0)
                              : box.lo(0) + (box.hi(0) - box.lo(0)) * (i + 0.5) / g;
      x(1) = box.lo(1) + (box.hi(1) - box.lo(1)) * (j + 0.5) / g;
      const double fx = objective(x);
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
  }

  const Eigen::Vector2d step = (box.hi - box.lo) / (2.0 * g);
  const detail::NelderMeadOutcome nm = detail::nelder_mead(objective, best_x, step, opts);

  FitResult result;
  result.family = family;
  result.params = detail::decode(family, nm.best);
  result.log_lik = -nm.value;
  result.g2 = 2.0 * nm.value;
  result.iterations = nm.iterations;
  result.converged = nm.converged;
  return result;
}

// --------------------------------------------------------------------------
// Generalization test: score calibrated parameters against held-out counts.

struct ModelPrediction {
  ModelFamily family = ModelFamily::Markov;
  ModelParams params = MarkovParams{0.5, 1.0};
  JointTable predicted;
  double g2 = 0;
};

struct GeneralizationCell {
  std::string participant;
  int coherence_pct = 0;
  Eigen::Matrix3d observed = Eigen::Matrix3d::Zero();
  std::vector<ModelPrediction> models;  // ordered by family

  const ModelPrediction* find(ModelFamily f) const {
    for (const auto& m : models)
      if (m.family == f) return &m;
    return nullptr;
  }

  // G2(a) - G2(b); positive favors b. Exactly antisymmetric by construction.
  double g2_diff(ModelFamily a, ModelFamily b) const {
    const ModelPrediction* pa = find(a);
    const ModelPrediction* pb = find(b);
    if (!pa || !pb) throw config_error("model pair not present in generalization cell");
    return pa->g2 - pb->g2;
  }
};

struct PairSummary {
  ModelFamily first = ModelFamily::Markov;
  ModelFamily second = ModelFamily::Quantum;
  double diff_sum = 0;      // sum over participants of G2(first) - G2(second)
  int favoring_second = 0;  // participants with positive diff
  int favoring_first = 0;
  int ties = 0;
};

// Comparison order for model pairs: the quantum model sits second, so a
// positive G2 difference always reads "favors quantum".
inline int comparison_rank(ModelFamily f) {
  switch (f) {
    case ModelFamily::Markov: return 0;
    case ModelFamily::MarkovV: return 1;
    default: return 2;
  }
}

struct CoherenceSummary {
  int coherence_pct = 0;
  std::map<ModelFamily, double> g2_sum;
  std::vector<PairSummary> pairs;
};

struct GeneralizationReport {
  int condition = 3;
  TimingPair timing{0.5, 2.5};
  std::vector<GeneralizationCell> cells;
  std::vector<CoherenceSummary> summaries;
};

inline GeneralizationReport generalization_test(const std::vector<FitResult>& fits,
                                                const std::vector<CellDataset>& holdout,
                                                const TimingPair& timing, int condition = 3) {
  validate(timing);
  std::map<std::pair<std::string, int>, std::vector<const FitResult*>> fit_index;
  for (const FitResult& f : fits) fit_index[{f.participant, f.coherence_pct}].push_back(&f);

  GeneralizationReport report;
  report.condition = condition;
  report.timing = timing;

  std::string missing;
  for (const CellDataset& cell : holdout) {
    if (cell.condition != condition) continue;
    auto it = fit_index.find({cell.participant, cell.coherence_pct});
    if (it == fit_index.end()) {
      missing += " (" + cell.participant + ", " + std::to_string(cell.coherence_pct) + "%)";
      continue;
    }
    GeneralizationCell out;
    out.participant = cell.participant;
    out.coherence_pct = cell.coherence_pct;
    out.observed = cell.counts;
    for (const FitResult* f : it->second) {
      ModelPrediction pred;
      pred.family = f->family;
      pred.params = f->params;
      pred.predicted = model_joint(f->params, timing);
      pred.g2 = g2_discrepancy(pred.predicted, cell.counts);
      out.models.push_back(std::move(pred));
    }
    std::sort(out.models.begin(), out.models.end(),
              [](const ModelPrediction& a, const ModelPrediction& b) {
                return static_cast<int>(a.family) < static_cast<int>(b.family);
              });
    report.cells.push_back(std::move(out));
  }
  if (!missing.empty())
    throw config_error("no calibrated fit for condition-" + std::to_string(condition) +
                       " cells:" + missing);

  std::sort(report.cells.begin(), report.cells.end(),
            [](const GeneralizationCell& a, const GeneralizationCell& b) {
              return std::tie(a.coherence_pct, a.participant) <
                     std::tie(b.coherence_pct, b.participant);
            });

  // Per-coherence sums and per-participant sign tallies for every family pair.
  std::map<int, CoherenceSummary> by_coherence;
  for (const GeneralizationCell& cell : report.cells) {
    CoherenceSummary& summary = by_coherence[cell.coherence_pct];
    summary.coherence_pct = cell.coherence_pct;
    for (const ModelPrediction& m : cell.models) summary.g2_sum[m.family] += m.g2;
    std::vector<ModelFamily> ordered;
    for (const ModelPrediction& m : cell.models) ordered.push_back(m.family);
    std::sort(ordered.begin(), ordered.end(),
              [](ModelFamily a, ModelFamily b) { return comparison_rank(a) < comparison_rank(b); });
    for (size_t a = 0; a < ordered.size(); ++a) {
      for (size_t b = a + 1; b < ordered.size(); ++b) {
        const ModelFamily fa = ordered[a];
        const ModelFamily fb = ordered[b];
        PairSummary* pair = nullptr;
        for (PairSummary& p : summary.pairs)
          if (p.first == fa && p.second == fb) pair = &p;
        if (!pair) {
          summary.pairs.push_back({fa, fb, 0, 0, 0, 0});
          pair = &summary.pairs.back();
        }
        const double diff = cell.g2_diff(fa, fb);
        pair->diff_sum += diff;
        if (diff > 0)
          ++pair->favoring_second;
        else if (diff < 0)
          ++pair->favoring_first;
        else
          ++pair->ties;
      }
    }
  }
  for (auto& [coh, summary] : by_coherence) report.summaries.push_back(summary);
  return report;
}

}  // namespace beliefwalk
