#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <optional>
#include <variant>

#include "beliefwalk/error.hpp"
#include "beliefwalk/kernel.hpp"

namespace beliefwalk {

// Number of coherently-moving stimulus dots; the drift-variability model
// mixes the drift over Binomial(kStimulusDots, success)/kStimulusDots.
inline constexpr int kStimulusDots = 70;

// Drift values of 0 or 1 would zero one of the jump rates; nudge inside the
// open interval instead.
inline constexpr double kDriftClamp = 1e-6;

inline double clamp_drift(double drift) {
  return std::clamp(drift, kDriftClamp, 1.0 - kDriftClamp);
}

// --------------------------------------------------------------------------
// Parameter records

struct MarkovParams {
  double drift;      // down_rate / (down_rate + up_rate), in (0,1)
  double diffusion;  // down_rate + up_rate, per second
};

struct QuantumParams {
  double potential_slope;  // diagonal slope of H
  double coupling;         // off-diagonal of H; >= 0 (0 freezes the dynamics)
};

struct MarkovVParams {
  double success_prob;  // binomial success probability for the drift mixture
  double diffusion;
};

enum class ModelFamily : int { Markov = 0, Quantum = 1, MarkovV = 2 };

using ModelParams = std::variant<MarkovParams, QuantumParams, MarkovVParams>;

inline ModelFamily family_of(const ModelParams& p) {
  return static_cast<ModelFamily>(p.index());
}

inline const char* family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Markov: return "markov";
    case ModelFamily::Quantum: return "quantum";
    default: return "markovv";
  }
}

inline ModelFamily parse_family(std::string_view name) {
  if (name == "markov") return ModelFamily::Markov;
  if (name == "quantum") return ModelFamily::Quantum;
  if (name == "markovv" || name == "markov-v" || name == "markov_v") return ModelFamily::MarkovV;
  throw data_error("unknown model family: " + std::string(name));
}

// The two free parameters of any family, in fit-search order.
inline Eigen::Vector2d params_as_vector(const ModelParams& params) {
  switch (family_of(params)) {
    case ModelFamily::Markov: {
      const auto& p = std::get<MarkovParams>(params);
      return {p.drift, p.diffusion};
    }
    case ModelFamily::Quantum: {
      const auto& p = std::get<QuantumParams>(params);
      return {p.potential_slope, p.coupling};
    }
    default: {
      const auto& p = std::get<MarkovVParams>(params);
      return {p.success_prob, p.diffusion};
    }
  }
}

inline std::pair<double, double> markov_rates(double drift, double diffusion) {
  if (!(drift > 0) || !(drift < 1))
    throw parameter_error("markov drift must lie strictly inside (0,1)");
  if (!(diffusion > 0)) throw parameter_error("diffusion rate must be positive");
  return {drift * diffusion, (1.0 - drift) * diffusion};
}

inline void validate(const MarkovParams& p) { markov_rates(p.drift, p.diffusion); }

inline void validate(const QuantumParams& p) {
  if (!std::isfinite(p.potential_slope) || p.potential_slope < 0)
    throw parameter_error("potential slope must be nonnegative and finite");
  if (!std::isfinite(p.coupling) || p.coupling < 0)
    throw parameter_error("coupling must be nonnegative and finite");
}

inline void validate(const MarkovVParams& p) {
  if (!(p.success_prob > 0) || !(p.success_prob < 1))
    throw parameter_error("binomial success probability must lie strictly inside (0,1)");
  if (!(p.diffusion > 0)) throw parameter_error("diffusion rate must be positive");
}

inline void validate(const ModelParams& p) {
  std::visit([](const auto& v) { validate(v); }, p);
}

// --------------------------------------------------------------------------
// Timing and joint tables

struct TimingPair {
  double first_s;
  double second_s;
};

inline void validate(const TimingPair& t) {
  if (!(t.first_s > 0) || !(t.second_s > t.first_s))
    throw parameter_error("timing pair requires 0 < t1 < t2");
}

// 3x3 joint category probabilities (or counts): rows index the first
// response, columns the second.
struct JointTable {
  Eigen::Matrix3d cells = Eigen::Matrix3d::Zero();

  double sum() const { return cells.sum(); }
  Eigen::Vector3d first_marginal() const { return cells.rowwise().sum(); }
  Eigen::Vector3d second_marginal() const { return cells.colwise().sum().transpose(); }
};

// --------------------------------------------------------------------------
// Joint response distributions

// Markov: entry (k,l) sums the distribution propagated to t1, masked to
// category k, propagated for t2-t1 and masked to category l.
inline JointTable markov_joint(const MarkovPropagator& prop, const TimingPair& timing) {
  validate(timing);
  const Eigen::VectorXd start = initial_markov_state().probs;
  const Eigen::VectorXd at_first = prop.apply(start, timing.first_s);
  const double gap = timing.second_s - timing.first_s;
  JointTable joint;
  for (Category k : kCategories) {
    const Eigen::VectorXd masked = project(at_first, k);
    const Eigen::VectorXd at_second = prop.apply(masked, gap);
    for (Category l : kCategories)
      joint.cells(static_cast<int>(k), static_cast<int>(l)) = band_sum(at_second, l);
  }
  return joint;
}

inline JointTable markov_joint(const MarkovParams& p, const TimingPair& timing) {
  const auto [down, up] = markov_rates(p.drift, p.diffusion);
  return markov_joint(MarkovPropagator(down, up), timing);
}

// Quantum: entry (k,l) is the squared norm after propagate / project /
// propagate / project. The first projection is left unnormalized, which makes
// the table itself the joint distribution.
inline JointTable quantum_joint(const QuantumPropagator& prop, const TimingPair& timing) {
  validate(timing);
  const Eigen::VectorXcd start = initial_quantum_state().amps;
  const Eigen::VectorXcd at_first = prop.apply(start, timing.first_s);
  const double gap = timing.second_s - timing.first_s;
  JointTable joint;
  for (Category k : kCategories) {
    const Eigen::VectorXcd collapsed = project(at_first, k);
    const Eigen::VectorXcd at_second = prop.apply(collapsed, gap);
    for (Category l : kCategories)
      joint.cells(static_cast<int>(k), static_cast<int>(l)) = band_sqnorm(at_second, l);
  }
  return joint;
}

inline JointTable quantum_joint(const QuantumParams& p, const TimingPair& timing) {
  validate(p);
  return quantum_joint(QuantumPropagator(p.potential_slope, p.coupling), timing);
}

// Category distribution of a single measurement at time t with no earlier
// measurement.
inline Eigen::Vector3d quantum_marginal_no_first(const QuantumPropagator& prop, double t) {
  const Eigen::VectorXcd psi = prop.apply(initial_quantum_state().amps, t);
  return {band_sqnorm(psi, Category::Low), band_sqnorm(psi, Category::Mid),
          band_sqnorm(psi, Category::High)};
}

inline Eigen::Vector3d quantum_marginal_no_first(const QuantumParams& p, double t) {
  validate(p);
  return quantum_marginal_no_first(QuantumPropagator(p.potential_slope, p.coupling), t);
}

inline Eigen::Vector3d markov_marginal(const MarkovPropagator& prop, double t) {
  const Eigen::VectorXd phi = prop.apply(initial_markov_state().probs, t);
  return {band_sum(phi, Category::Low), band_sum(phi, Category::Mid),
          band_sum(phi, Category::High)};
}

// Binomial(kStimulusDots, success) pmf over n = 0..kStimulusDots, via
// log-gamma for stability at extreme success probabilities.
inline std::array<double, kStimulusDots + 1> binomial_pmf(double success) {
  if (!(success > 0) || !(success < 1))
    throw parameter_error("binomial success probability must lie strictly inside (0,1)");
  std::array<double, kStimulusDots + 1> pmf{};
  const double log_p = std::log(success);
  const double log_q = std::log1p(-success);
  const double lg_n = std::lgamma(kStimulusDots + 1.0);
  for (int n = 0; n <= kStimulusDots; ++n) {
    const double log_choose = lg_n - std::lgamma(n + 1.0) - std::lgamma(kStimulusDots - n + 1.0);
    pmf[n] = std::exp(log_choose + n * log_p + (kStimulusDots - n) * log_q);
  }
  return pmf;
}

// Drift-variability model: binomial mixture of Markov joints over drift
// values n/70, endpoints clamped inside (0,1).
inline JointTable markov_v_joint(const MarkovVParams& p, const TimingPair& timing) {
  validate(p);
  validate(timing);
  const auto weights = binomial_pmf(p.success_prob);
  JointTable mix;
  for (int n = 0; n <= kStimulusDots; ++n) {
    if (weights[n] < 1e-16) continue;
    const double drift = clamp_drift(static_cast<double>(n) / kStimulusDots);
    const auto [down, up] = markov_rates(drift, p.diffusion);
    mix.cells += weights[n] * markov_joint(MarkovPropagator(down, up), timing).cells;
  }
  return mix;
}

inline Eigen::Vector3d markov_v_marginal(const MarkovVParams& p, double t) {
  validate(p);
  const auto weights = binomial_pmf(p.success_prob);
  Eigen::Vector3d mix = Eigen::Vector3d::Zero();
  for (int n = 0; n <= kStimulusDots; ++n) {
    if (weights[n] < 1e-16) continue;
    const double drift = clamp_drift(static_cast<double>(n) / kStimulusDots);
    const auto [down, up] = markov_rates(drift, p.diffusion);
    mix += weights[n] * markov_marginal(MarkovPropagator(down, up), t);
  }
  return mix;
}

// --------------------------------------------------------------------------
// Family dispatch
//
// JointEvaluator builds the (possibly expensive) propagator state once per
// parameter vector and reuses it across every timing it is asked about; the
// likelihood loop over conditions goes through here.

class JointEvaluator {
 public:
  explicit JointEvaluator(const ModelParams& params) : family_(family_of(params)) {
    switch (family_) {
      case ModelFamily::Markov: {
        const auto& p = std::get<MarkovParams>(params);
        const auto [down, up] = markov_rates(p.drift, p.diffusion);
        single_.emplace_back(1.0, MarkovPropagator(down, up));
        break;
      }
      case ModelFamily::Quantum: {
        const auto& p = std::get<QuantumParams>(params);
        validate(p);
        quantum_.emplace(p.potential_slope, p.coupling);
        break;
      }
      default: {
        const auto& p = std::get<MarkovVParams>(params);
        validate(p);
        const auto weights = binomial_pmf(p.success_prob);
        for (int n = 0; n <= kStimulusDots; ++n) {
          if (weights[n] < 1e-16) continue;
          const double drift = clamp_drift(static_cast<double>(n) / kStimulusDots);
          const auto [down, up] = markov_rates(drift, p.diffusion);
          single_.emplace_back(weights[n], MarkovPropagator(down, up));
        }
        break;
      }
    }
  }

  ModelFamily family() const { return family_; }

  JointTable joint(const TimingPair& timing) const {
    if (family_ == ModelFamily::Quantum) return quantum_joint(*quantum_, timing);
    JointTable mix;
    for (const auto& [weight, prop] : single_)
      mix.cells += weight * markov_joint(prop, timing).cells;
    return mix;
  }

  Eigen::Vector3d single_marginal(double t) const {
    if (family_ == ModelFamily::Quantum) return quantum_marginal_no_first(*quantum_, t);
    Eigen::Vector3d mix = Eigen::Vector3d::Zero();
    for (const auto& [weight, prop] : single_) mix += weight * markov_marginal(prop, t);
    return mix;
  }

 private:
  ModelFamily family_;
  std::vector<std::pair<double, MarkovPropagator>> single_;  // weighted mixture
  std::optional<QuantumPropagator> quantum_;
};

inline JointTable model_joint(const ModelParams& params, const TimingPair& timing) {
  return JointEvaluator(params).joint(timing);
}

// Single-measurement category distribution at time t.
inline Eigen::Vector3d single_marginal(const ModelParams& params, double t) {
  return JointEvaluator(params).single_marginal(t);
}

// Second-response marginal pooled over the first response, minus the
// single-measurement marginal at t2. Identically zero for the Markov
// families; generally nonzero for the quantum walk.
inline Eigen::Vector3d interference_effect(const ModelParams& params, const TimingPair& timing) {
  const JointEvaluator evaluator(params);
  const Eigen::Vector3d pooled = evaluator.joint(timing).second_marginal();
  const Eigen::Vector3d direct = evaluator.single_marginal(timing.second_s);
  return pooled - direct;
}

}  // namespace beliefwalk
