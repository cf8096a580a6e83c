#include "beliefwalk/report.hpp"

#include <gtest/gtest.h>

using namespace beliefwalk;

namespace {

Eigen::VectorXd from_list(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(LocalMaxima, HandCases) {
  EXPECT_EQ(count_local_maxima(from_list({0, 1, 0, 2, 0}), 1e-9), 2);
  EXPECT_EQ(count_local_maxima(from_list({0, 1, 2, 3, 2, 1}), 1e-9), 1);
  EXPECT_EQ(count_local_maxima(from_list({3, 2, 1, 0, 0, 0}), 1e-9), 1);  // edge maximum
  EXPECT_EQ(count_local_maxima(from_list({0, 1, 0, 2e-5, 0}), 1e-4), 1);  // floor suppresses
  EXPECT_EQ(count_local_maxima(Eigen::VectorXd::Zero(10), 1e-4), 0);
}

TEST(StateHistory, MarkovRidgeStaysUnimodalAndDrifts) {
  const Eigen::MatrixXd history = markov_state_history(MarkovParams{0.19, 10.0}, 1.5, 30);
  ASSERT_EQ(history.rows(), 31);
  ASSERT_EQ(history.cols(), kStateCount);
  for (int s = 0; s <= 30; ++s) {
    EXPECT_NEAR(history.row(s).sum(), 1.0, 1e-9);
    EXPECT_EQ(count_local_maxima(history.row(s).transpose(), 1e-4), 1);
  }
  int start_peak, end_peak;
  history.row(0).maxCoeff(&start_peak);
  history.row(30).maxCoeff(&end_peak);
  EXPECT_GT(end_peak, start_peak);  // upward drift at low drift parameter
}

TEST(StateHistory, QuantumWaveSpreads) {
  const Eigen::MatrixXd history = quantum_state_history(QuantumParams{2.0, 10.0}, 1.5, 30);
  for (int s = 0; s <= 30; ++s) EXPECT_NEAR(history.row(s).sum(), 1.0, 1e-9);
  // variance in state index grows under the coupling
  auto variance = [&](int row) {
    double mean = 0, var = 0;
    for (int j = 0; j < kStateCount; ++j) mean += (j + 1) * history(row, j);
    for (int j = 0; j < kStateCount; ++j)
      var += (j + 1 - mean) * (j + 1 - mean) * history(row, j);
    return var;
  };
  EXPECT_GT(variance(30), 1.25 * variance(0));
}

TEST(StateHistory, MarkovVMixtureIsNormalized) {
  const Eigen::MatrixXd history = markov_v_state_history(MarkovVParams{0.3, 8.0}, 1.0, 10);
  for (int s = 0; s <= 10; ++s) EXPECT_NEAR(history.row(s).sum(), 1.0, 1e-9);
}

TEST(HeatmapSvg, DeterministicAndWellFormed) {
  const Eigen::MatrixXd history = markov_state_history(MarkovParams{0.3, 8.0}, 1.0, 5);
  const std::string svg = render_heatmap_svg(history, "test", 1.0);
  EXPECT_EQ(svg, render_heatmap_svg(history, "test", 1.0));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  // one rect per cell
  size_t rects = 0, pos = 0;
  while ((pos = svg.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  EXPECT_EQ(rects, static_cast<size_t>(6 * kStateCount));
}

TEST(JointTables, MarkdownCarriesRowAndColumnLabels) {
  Eigen::Matrix3d obs;
  obs << .20, .02, .07, .04, .23, .05, .05, .02, .32;
  Eigen::Matrix3d pred;
  pred << .09, .07, .04, .11, .27, .16, .03, .08, .16;
  const std::string md =
      render_joint_tables_markdown("Coherence 2%", obs, {{"markov", pred}});
  for (const char* label : {"L1", "M1", "H1", "L2", "M2", "H2", "Obs", "markov"})
    EXPECT_NE(md.find(label), std::string::npos) << label;
  EXPECT_NE(md.find("0.20"), std::string::npos);
}

TEST(JointTables, CsvLongFormat) {
  Eigen::Matrix3d obs = Eigen::Matrix3d::Constant(1.0 / 9.0);
  const std::string csv = render_joint_tables_csv("2", obs, {});
  EXPECT_NE(csv.find("coherence,model,row,L2,M2,H2"), std::string::npos);
  EXPECT_NE(csv.find("2,Obs,L1"), std::string::npos);
  EXPECT_NE(csv.find("2,Obs,H1"), std::string::npos);
}

TEST(RatingBars, RejectsWrongBinCount) {
  EXPECT_THROW(render_rating_bars_svg("t", Eigen::VectorXd::Zero(99), "a",
                                      Eigen::VectorXd::Zero(101), "b"),
               render_error);
}

TEST(RatingBars, RendersThreePanels) {
  Eigen::VectorXd first = Eigen::VectorXd::Zero(101);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(101);
  first(80) = 0.6;
  first(20) = 0.4;
  second(50) = 1.0;
  const std::string svg = render_rating_bars_svg("demo", first, "one", second, "two");
  EXPECT_NE(svg.find("one"), std::string::npos);
  EXPECT_NE(svg.find("two"), std::string::npos);
  EXPECT_NE(svg.find("difference"), std::string::npos);
  EXPECT_EQ(svg, render_rating_bars_svg("demo", first, "one", second, "two"));
}
