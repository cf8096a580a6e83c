#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "beliefwalk/error.hpp"

namespace beliefwalk {

inline double chi_squared_survival(double x, int df) {
  if (x <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

inline double chi_squared_quantile(double p, int df) {
  return boost::math::quantile(boost::math::chi_squared(df), p);
}

inline double f_survival(double x, int df1, int df2) {
  if (x <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), x));
}

struct ParticipantComponent {
  std::string participant;
  double statistic = 0;
  int df = 0;
  bool excluded = false;
};

struct TestReport {
  std::string name;
  double statistic = 0;
  int df = 0;                 // chi-square df; for F tests see f_df
  std::pair<int, int> f_df{0, 0};
  bool is_f_test = false;
  double p_value = 1.0;
  double critical_05 = 0;     // alpha = .05 critical value for the statistic
  double hotelling_t2 = 0;    // raw T^2, only for the hotelling test
  std::vector<ParticipantComponent> components;
  std::vector<std::string> warnings;
};

// Per-participant category or cell counts, keyed by participant id.
using LabeledCounts = std::map<std::string, Eigen::VectorXd>;

namespace detail {

// Two-sample likelihood-ratio G2 against pooled expected proportions.
// Zero-count cells contribute zero; df is cells-1 per participant.
inline double two_sample_g2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.sum();
  const double nb = b.sum();
  double g2 = 0;
  for (int c = 0; c < a.size(); ++c) {
    const double pooled = (a(c) + b(c)) / (na + nb);
    if (pooled <= 0) continue;
    if (a(c) > 0) g2 += 2.0 * a(c) * std::log(a(c) / (na * pooled));
    if (b(c) > 0) g2 += 2.0 * b(c) * std::log(b(c) / (nb * pooled));
  }
  return g2;
}

inline TestReport g2_two_sample_test(const std::string& name, const LabeledCounts& first,
                                     const LabeledCounts& second, int cells) {
  if (first.size() != second.size())
    throw data_error("participant sets differ between the two samples");
  TestReport report;
  report.name = name;
  const int per_df = cells - 1;
  for (const auto& [participant, counts_a] : first) {
    auto it = second.find(participant);
    if (it == second.end())
      throw data_error("participant '" + participant + "' missing from the second sample");
    const Eigen::VectorXd& counts_b = it->second;
    if (counts_a.size() != cells || counts_b.size() != cells)
      throw data_error("count vector size mismatch for participant '" + participant + "'");

    ParticipantComponent part;
    part.participant = participant;
    part.df = per_df;
    if (counts_a.sum() <= 0 || counts_b.sum() <= 0) {
      part.excluded = true;
      report.warnings.push_back("participant '" + participant +
                                "' excluded: empty counts in one condition");
    } else {
      part.statistic = two_sample_g2(counts_a, counts_b);
      report.statistic += part.statistic;
      report.df += per_df;
    }
    report.components.push_back(std::move(part));
  }
  if (report.df == 0) throw data_error("no participant had usable counts in both samples");
  report.p_value = chi_squared_survival(report.statistic, report.df);
  report.critical_05 = chi_squared_quantile(0.95, report.df);
  return report;
}

}  // namespace detail

// Interference test on 3-category marginals (2 df per participant).
inline TestReport g2_marginal_test(const LabeledCounts& first_sample,
                                   const LabeledCounts& second_sample) {
  return detail::g2_two_sample_test("marginal_g2", first_sample, second_sample, 3);
}

// Difference between two 3x3 joint distributions, flattened to 9 cells
// (8 df per participant).
inline TestReport g2_joint_test(const LabeledCounts& first_sample,
                                const LabeledCounts& second_sample) {
  return detail::g2_two_sample_test("joint_g2", first_sample, second_sample, 9);
}

// One-sample Hotelling T^2 of the mean-change vector against zero.
// F has (k, P-k) degrees of freedom for k components and P participants.
inline TestReport hotelling_change_test(const std::map<std::string, Eigen::VectorXd>& changes) {
  const int n = static_cast<int>(changes.size());
  if (n < 5) throw data_error("hotelling test requires at least 5 participants");
  const int k = static_cast<int>(changes.begin()->second.size());
  if (n <= k) throw data_error("hotelling test requires more participants than components");

  Eigen::MatrixXd data(n, k);
  TestReport report;
  report.name = "hotelling_t2";
  report.is_f_test = true;
  int row = 0;
  for (const auto& [participant, change] : changes) {
    if (change.size() != k) throw data_error("change vector size mismatch");
    data.row(row++) = change.transpose();
    report.components.push_back({participant, 0.0, 0, false});
  }

  const Eigen::VectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double max_eig = es.eigenvalues().maxCoeff();
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= 1e-12 * std::max(1.0, max_eig)) {
    const Eigen::VectorXd null_dir = es.eigenvectors().col(0);
    std::string involved;
    for (int c = 0; c < k; ++c)
      if (std::abs(null_dir(c)) > 0.3) involved += " " + std::to_string(c);
    throw data_error("singular covariance; collinear components:" + involved);
  }

  const double t2 = n * mean.dot(cov.ldlt().solve(mean));
  const double f_stat = (static_cast<double>(n - k) / (k * (n - 1.0))) * t2;
  report.hotelling_t2 = t2;
  report.statistic = f_stat;
  report.f_df = {k, n - k};
  report.p_value = f_survival(f_stat, k, n - k);
  report.critical_05 = boost::math::quantile(boost::math::fisher_f(k, n - k), 0.95);
  return report;
}

}  // namespace beliefwalk
