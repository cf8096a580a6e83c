#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "beliefwalk/error.hpp"

namespace beliefwalk {

// Evidence scale: states 1..99, split into three equal response categories.
inline constexpr int kStateCount = 99;
inline constexpr int kBandWidth = 33;
inline constexpr int kNeutralState = 50;
inline constexpr double kInitialSd = 5.0;

enum class Category : int { Low = 0, Mid = 1, High = 2 };

inline constexpr std::array<Category, 3> kCategories{Category::Low, Category::Mid,
                                                     Category::High};

inline const char* category_label(Category c) {
  switch (c) {
    case Category::Low: return "L";
    case Category::Mid: return "M";
    default: return "H";
  }
}

// Half-open index range [begin, end) of a category's block in a length-99
// state vector (state j lives at index j-1).
struct Band {
  int begin;
  int end;
};

inline Band category_band(Category c) {
  const int i = static_cast<int>(c);
  return {i * kBandWidth, (i + 1) * kBandWidth};
}

// --------------------------------------------------------------------------
// State representations

// Markov state probabilities over the 99 evidence states.
struct BeliefDistribution {
  Eigen::VectorXd probs;
};

// Quantum amplitudes over the 99 evidence states.
struct AmplitudeVector {
  Eigen::VectorXcd amps;
};

inline void validate(const BeliefDistribution& d) {
  if (d.probs.size() != kStateCount)
    throw parameter_error("belief distribution must have 99 states");
  if ((d.probs.array() < 0).any())
    throw numerical_error("belief distribution has a negative entry");
  if (std::abs(d.probs.sum() - 1.0) > 1e-12)
    throw numerical_error("belief distribution does not sum to 1");
}

inline void validate(const AmplitudeVector& a) {
  if (a.amps.size() != kStateCount) throw parameter_error("amplitude vector must have 99 states");
  if (std::abs(a.amps.squaredNorm() - 1.0) > 1e-12)
    throw numerical_error("amplitude vector is not unit norm");
}

// --------------------------------------------------------------------------
// Generators

// Birth-death intensity matrix. Column j carries rate `down_rate` to state
// j-1 and `up_rate` to state j+1; boundary diagonals absorb the blocked
// direction so every column sums to zero and probability is conserved.
struct IntensityMatrix {
  double down_rate = 0;  // j -> j-1
  double up_rate = 0;    // j -> j+1
  int size = kStateCount;

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
    for (int j = 0; j < size; ++j) {
      double exit = 0;
      if (j > 0) {
        k(j - 1, j) = down_rate;
        exit += down_rate;
      }
      if (j < size - 1) {
        k(j + 1, j) = up_rate;
        exit += up_rate;
      }
      k(j, j) = -exit;
    }
    return k;
  }
};

// Tridiagonal Hamiltonian: linear diagonal potential, constant real coupling
// on the off-diagonals. Kept as a real symmetric matrix (the coupling is
// real), which is Hermitian by construction.
struct Hamiltonian {
  double potential_slope = 0;  // diagonal: slope * j / size for state j
  double coupling = 0;         // off-diagonal
  int size = kStateCount;

  Eigen::VectorXd diagonal() const {
    Eigen::VectorXd d(size);
    for (int j = 0; j < size; ++j) d(j) = potential_slope * static_cast<double>(j + 1) / size;
    return d;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    h.diagonal() = diagonal();
    for (int j = 0; j + 1 < size; ++j) {
      h(j + 1, j) = coupling;
      h(j, j + 1) = coupling;
    }
    return h;
  }
};

inline IntensityMatrix build_intensity(double down_rate, double up_rate, int size = kStateCount) {
  if (!(down_rate > 0) || !std::isfinite(down_rate))
    throw parameter_error("down rate must be positive and finite");
  if (!(up_rate > 0) || !std::isfinite(up_rate))
    throw parameter_error("up rate must be positive and finite");
  if (size < 2) throw parameter_error("intensity matrix needs at least 2 states");
  return {down_rate, up_rate, size};
}

inline Hamiltonian build_hamiltonian(double potential_slope, double coupling,
                                     int size = kStateCount) {
  if (!std::isfinite(potential_slope)) throw parameter_error("potential slope must be finite");
  if (!std::isfinite(coupling)) throw parameter_error("coupling must be finite");
  if (size < 2) throw parameter_error("hamiltonian needs at least 2 states");
  return {potential_slope, coupling, size};
}

// --------------------------------------------------------------------------
// Category projectors

struct Projector {
  Category label;
  Band band;
};

inline Projector projector(Category c) { return {c, category_band(c)}; }

inline Eigen::MatrixXd projector_matrix(Category c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kStateCount, kStateCount);
  const Band b = category_band(c);
  for (int i = b.begin; i < b.end; ++i) m(i, i) = 1.0;
  return m;
}

inline double band_sum(const Eigen::VectorXd& v, Category c) {
  const Band b = category_band(c);
  return v.segment(b.begin, b.end - b.begin).sum();
}

inline double band_sqnorm(const Eigen::VectorXcd& v, Category c) {
  const Band b = category_band(c);
  return v.segment(b.begin, b.end - b.begin).squaredNorm();
}

template <typename Vector>
Vector project(const Vector& v, Category c) {
  Vector out = Vector::Zero(v.size());
  const Band b = category_band(c);
  out.segment(b.begin, b.end - b.begin) = v.segment(b.begin, b.end - b.begin);
  return out;
}

// --------------------------------------------------------------------------
// Markov propagation: T(t) = exp(t K) by uniformization.
//
// With total jump rate L = down + up, K = L (P - I) where P is the embedded
// jump chain, so exp(tK) = sum_m Poisson(m; Lt) P^m. Every term is
// nonnegative, so entries accumulate without cancellation and columns sum to
// one up to the Poisson tail cut. A spectral route through the symmetrizing
// diagonal similarity is exact in theory but scales round-off by
// (down/up)^((j-i)/2), which is astronomically large for strong drift; the
// series form has no such amplification.
class MarkovPropagator {
 public:
  explicit MarkovPropagator(const IntensityMatrix& k)
      : MarkovPropagator(k.down_rate, k.up_rate, k.size) {}

  MarkovPropagator(double down_rate, double up_rate, int size = kStateCount) {
    const IntensityMatrix checked = build_intensity(down_rate, up_rate, size);
    down_ = checked.down_rate;
    up_ = checked.up_rate;
    n_ = checked.size;
    rate_ = down_ + up_;
    down_frac_ = down_ / rate_;
    up_frac_ = up_ / rate_;
  }

  double down_rate() const { return down_; }
  double up_rate() const { return up_; }
  int size() const { return n_; }

  // exp(tK) * v for any vector (not necessarily a probability distribution).
  Eigen::VectorXd apply(const Eigen::VectorXd& v, double t) const {
    check_time(t);
    Eigen::VectorXd cur = v;
    double remaining = t;
    while (remaining > 0) {
      const double chunk = std::min(remaining, kMaxJumpLoad / rate_);
      cur = apply_chunk(cur, chunk);
      remaining -= chunk;
    }
    return cur;
  }

  // Full transition matrix. Entries are clamped/renormalized per the round-off
  // policy: deviations beyond 1e-10 indicate a bug and raise numerical_error.
  Eigen::MatrixXd matrix(double t) const {
    check_time(t);
    Eigen::MatrixXd cur = Eigen::MatrixXd::Identity(n_, n_);
    double remaining = t;
    while (remaining > 0) {
      const double chunk = std::min(remaining, kMaxJumpLoad / rate_);
      cur = matrix_chunk(cur, chunk);
      remaining -= chunk;
    }
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        if (cur(i, j) < 0) {
          if (cur(i, j) < -1e-12) throw numerical_error("transition matrix entry below -1e-12");
          cur(i, j) = 0;
        }
      }
      const double colsum = cur.col(j).sum();
      if (std::abs(colsum - 1.0) > 1e-10)
        throw numerical_error("transition matrix column sum deviates by more than 1e-10");
      cur.col(j) /= colsum;
    }
    return cur;
  }

 private:
  static constexpr double kMaxJumpLoad = 64.0;  // max L*t per series evaluation

  static void check_time(double t) {
    if (t < 0 || !std::isfinite(t)) throw parameter_error("evolution time must be nonnegative");
  }

  // one jump-chain step w = P v (column-stochastic P, reflecting boundaries)
  void jump_step(const Eigen::VectorXd& v, Eigen::VectorXd& w) const {
    w.setZero();
    w.head(n_ - 1) += down_frac_ * v.tail(n_ - 1);
    w.tail(n_ - 1) += up_frac_ * v.head(n_ - 1);
    w(0) += down_frac_ * v(0);
    w(n_ - 1) += up_frac_ * v(n_ - 1);
  }

  void jump_step(const Eigen::MatrixXd& x, Eigen::MatrixXd& w) const {
    w.setZero();
    w.topRows(n_ - 1) += down_frac_ * x.bottomRows(n_ - 1);
    w.bottomRows(n_ - 1) += up_frac_ * x.topRows(n_ - 1);
    w.row(0) += down_frac_ * x.row(0);
    w.row(n_ - 1) += up_frac_ * x.row(n_ - 1);
  }

  static int term_count(double load) {
    // Poisson tail beyond this index is far below 1e-16 of the total mass.
    return static_cast<int>(std::ceil(load + 10.0 * std::sqrt(load + 1.0) + 20.0));
  }

  template <typename State>
  State series(const State& start, double t, State& scratch) const {
    const double load = rate_ * t;
    const int terms = term_count(load);
    double weight = std::exp(-load);
    State acc = weight * start;
    State cur = start;
    for (int m = 1; m <= terms; ++m) {
      jump_step(cur, scratch);
      cur.swap(scratch);
      weight *= load / m;
      acc += weight * cur;
    }
    return acc;
  }

  Eigen::VectorXd apply_chunk(const Eigen::VectorXd& v, double t) const {
    if (t == 0) return v;
    Eigen::VectorXd scratch(n_);
    return series(v, t, scratch);
  }

  Eigen::MatrixXd matrix_chunk(const Eigen::MatrixXd& x, double t) const {
    if (t == 0) return x;
    Eigen::MatrixXd scratch(n_, x.cols());
    return series(x, t, scratch);
  }

  double down_ = 0, up_ = 0, rate_ = 0;
  double down_frac_ = 0, up_frac_ = 0;
  int n_ = kStateCount;
};

// --------------------------------------------------------------------------
// Quantum propagation: U(t) = exp(-i t H) through the spectral decomposition
// of the real symmetric tridiagonal H. The decomposition is computed once and
// reused for every t.
class QuantumPropagator {
 public:
  explicit QuantumPropagator(const Hamiltonian& h) { init(h); }

  QuantumPropagator(double potential_slope, double coupling, int size = kStateCount) {
    init(build_hamiltonian(potential_slope, coupling, size));
  }

  int size() const { return n_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, double t) const {
    check_time(t);
    // V^T psi, phase rotation, back to the state basis; V is real so the
    // complex work splits into two real matvecs per direction.
    Eigen::VectorXd re = evecs_.transpose() * psi.real();
    Eigen::VectorXd im = evecs_.transpose() * psi.imag();
    Eigen::VectorXd rot_re(n_), rot_im(n_);
    for (int k = 0; k < n_; ++k) {
      const double c = std::cos(evals_(k) * t);
      const double s = std::sin(evals_(k) * t);
      rot_re(k) = c * re(k) + s * im(k);
      rot_im(k) = c * im(k) - s * re(k);
    }
    const Eigen::VectorXd out_re = evecs_ * rot_re;
    const Eigen::VectorXd out_im = evecs_ * rot_im;
    Eigen::VectorXcd out(n_);
    for (int i = 0; i < n_; ++i) out(i) = std::complex<double>(out_re(i), out_im(i));
    return out;
  }

  Eigen::MatrixXcd matrix(double t) const {
    check_time(t);
    Eigen::VectorXcd phases(n_);
    for (int k = 0; k < n_; ++k)
      phases(k) = std::complex<double>(std::cos(evals_(k) * t), -std::sin(evals_(k) * t));
    return (evecs_.cast<std::complex<double>>() * phases.asDiagonal()) *
           evecs_.transpose().cast<std::complex<double>>();
  }

 private:
  static void check_time(double t) {
    if (t < 0 || !std::isfinite(t)) throw parameter_error("evolution time must be nonnegative");
  }

  void init(const Hamiltonian& h) {
    n_ = h.size;
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(n_ - 1, h.coupling);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(h.diagonal(), sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
      throw numerical_error("tridiagonal eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
  }

  int n_ = kStateCount;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

// --------------------------------------------------------------------------
// Single-interval evolution entry points

inline Eigen::MatrixXd transition_matrix(const IntensityMatrix& k, double t) {
  return MarkovPropagator(k).matrix(t);
}

inline Eigen::MatrixXcd unitary_matrix(const Hamiltonian& h, double t) {
  return QuantumPropagator(h).matrix(t);
}

// Discrete Gaussian over states 1..99, centered on the neutral state 50 with
// sd 5 states, truncated and renormalized.
inline BeliefDistribution initial_markov_state() {
  Eigen::VectorXd p(kStateCount);
  for (int i = 0; i < kStateCount; ++i) {
    const double z = (i + 1 - kNeutralState) / kInitialSd;
    p(i) = std::exp(-0.5 * z * z);
  }
  p /= p.sum();
  return {p};
}

// Same initial probabilities as the Markov start, entered with zero phase.
inline AmplitudeVector initial_quantum_state() {
  const BeliefDistribution start = initial_markov_state();
  Eigen::VectorXcd amps(kStateCount);
  for (int i = 0; i < kStateCount; ++i) amps(i) = std::sqrt(start.probs(i));
  return {amps};
}

}  // namespace beliefwalk
