#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "beliefwalk/error.hpp"
#include "beliefwalk/kernel.hpp"
#include "beliefwalk/models.hpp"

namespace beliefwalk {

// Strict local maxima above a floor; the floor keeps round-off ripples in
// near-zero tails from counting as modes.
inline int count_local_maxima(const Eigen::VectorXd& v, double min_height = 1e-4) {
  int count = 0;
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) < min_height) continue;
    const bool left_ok = (i == 0) || v(i) > v(i - 1);
    const bool right_ok = (i == static_cast<int>(v.size()) - 1) || v(i) > v(i + 1);
    if (left_ok && right_ok) ++count;
  }
  return count;
}

// State-probability history on a uniform time grid; one row per time step.
inline Eigen::MatrixXd markov_state_history(const MarkovParams& p, double t_max, int steps) {
  const auto [down, up] = markov_rates(p.drift, p.diffusion);
  const MarkovPropagator prop(down, up);
  const Eigen::VectorXd start = initial_markov_state().probs;
  Eigen::MatrixXd history(steps + 1, kStateCount);
  for (int s = 0; s <= steps; ++s)
    history.row(s) = prop.apply(start, t_max * s / steps).transpose();
  return history;
}

// Binomial drift mixture of Markov histories.
inline Eigen::MatrixXd markov_v_state_history(const MarkovVParams& p, double t_max, int steps) {
  validate(p);
  const auto weights = binomial_pmf(p.success_prob);
  Eigen::MatrixXd history = Eigen::MatrixXd::Zero(steps + 1, kStateCount);
  for (int n = 0; n <= kStimulusDots; ++n) {
    if (weights[n] < 1e-16) continue;
    const double drift = clamp_drift(static_cast<double>(n) / kStimulusDots);
    history += weights[n] * markov_state_history(MarkovParams{drift, p.diffusion}, t_max, steps);
  }
  return history;
}

// Squared amplitude history for the quantum walk.
inline Eigen::MatrixXd quantum_state_history(const QuantumParams& p, double t_max, int steps) {
  validate(p);
  const QuantumPropagator prop(p.potential_slope, p.coupling);
  const Eigen::VectorXcd start = initial_quantum_state().amps;
  Eigen::MatrixXd history(steps + 1, kStateCount);
  for (int s = 0; s <= steps; ++s)
    history.row(s) = prop.apply(start, t_max * s / steps).cwiseAbs2().transpose();
  return history;
}

namespace detail {

inline std::string fmt(double value, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

// white -> blue ramp on normalized intensity
inline std::string heat_color(double intensity) {
  const double clamped = std::min(1.0, std::max(0.0, intensity));
  const int r = static_cast<int>(255 * (1.0 - clamped));
  const int g = static_cast<int>(255 * (1.0 - 0.75 * clamped));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02xff", r, g);
  return buf;
}

}  // namespace detail

// Heatmap of a (time x state) matrix: states run left to right, time runs
// bottom to top. Cells are colored relative to the matrix maximum.
inline std::string render_heatmap_svg(const Eigen::MatrixXd& history, const std::string& title,
                                      double t_max) {
  const int rows = static_cast<int>(history.rows());
  const int cols = static_cast<int>(history.cols());
  const double cell_w = 8.0, cell_h = 6.0;
  const double margin_left = 50.0, margin_top = 30.0, margin_bottom = 36.0;
  const double width = margin_left + cols * cell_w + 20.0;
  const double height = margin_top + rows * cell_h + margin_bottom;
  const double peak = history.maxCoeff();

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) +
         "\" height=\"" + detail::fmt(height) + "\">\n";
  svg += "<text x=\"" + detail::fmt(margin_left) + "\" y=\"20\" font-size=\"14\">" + title +
         "</text>\n";
  for (int s = 0; s < rows; ++s) {
    const double y = margin_top + (rows - 1 - s) * cell_h;
    for (int j = 0; j < cols; ++j) {
      const double x = margin_left + j * cell_w;
      const double intensity = peak > 0 ? history(s, j) / peak : 0.0;
      svg += "<rect x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(y) + "\" width=\"" +
             detail::fmt(cell_w) + "\" height=\"" + detail::fmt(cell_h) + "\" fill=\"" +
             detail::heat_color(intensity) + "\"/>\n";
    }
  }
  svg += "<text x=\"" + detail::fmt(margin_left) + "\" y=\"" + detail::fmt(height - 12) +
         "\" font-size=\"11\">belief state 1..99</text>\n";
  svg += "<text x=\"4\" y=\"" + detail::fmt(margin_top + 10) + "\" font-size=\"11\">t=" +
         detail::fmt(t_max) + "s</text>\n";
  svg += "<text x=\"4\" y=\"" + detail::fmt(margin_top + rows * cell_h) +
         "\" font-size=\"11\">t=0</text>\n";
  svg += "</svg>\n";
  return svg;
}

// Observed vs predicted 3x3 tables, one block per model, rows L1/M1/H1 and
// columns L2/M2/H2.
inline std::string render_joint_tables_markdown(
    const std::string& heading, const Eigen::Matrix3d& observed,
    const std::vector<std::pair<std::string, Eigen::Matrix3d>>& predictions) {
  const char* row_labels[3] = {"L1", "M1", "H1"};
  std::string md = "### " + heading + "\n\n";
  auto block = [&](const std::string& name, const Eigen::Matrix3d& table) {
    md += "| " + name + " | L2 | M2 | H2 |\n";
    md += "|---|---|---|---|\n";
    for (int k = 0; k < 3; ++k) {
      md += "| " + std::string(row_labels[k]);
      for (int l = 0; l < 3; ++l) md += " | " + detail::fmt(table(k, l), "%.2f");
      md += " |\n";
    }
    md += "\n";
  };
  block("Obs", observed);
  for (const auto& [name, table] : predictions) block(name, table);
  return md;
}

inline std::string render_joint_tables_csv(
    const std::string& label, const Eigen::Matrix3d& observed,
    const std::vector<std::pair<std::string, Eigen::Matrix3d>>& predictions) {
  const char* row_labels[3] = {"L1", "M1", "H1"};
  std::string csv = "coherence,model,row,L2,M2,H2\n";
  auto block = [&](const std::string& name, const Eigen::Matrix3d& table) {
    for (int k = 0; k < 3; ++k) {
      csv += label + "," + name + "," + row_labels[k];
      for (int l = 0; l < 3; ++l) csv += "," + detail::fmt(table(k, l), "%.6f");
      csv += "\n";
    }
  };
  block("Obs", observed);
  for (const auto& [name, table] : predictions) block(name, table);
  return csv;
}

// Rating-distribution comparison: two panels of relative frequencies over
// ratings 0..100 plus a difference panel (first minus second).
inline std::string render_rating_bars_svg(const std::string& title,
                                          const Eigen::VectorXd& first_freq,
                                          const std::string& first_label,
                                          const Eigen::VectorXd& second_freq,
                                          const std::string& second_label) {
  if (first_freq.size() != 101 || second_freq.size() != 101)
    throw render_error("rating frequency vectors must have 101 bins");
  const double bar_w = 7.0;
  const double panel_h = 120.0, panel_gap = 34.0;
  const double margin_left = 46.0, margin_top = 28.0;
  const double width = margin_left + 101 * bar_w + 16.0;
  const double height = margin_top + 3 * panel_h + 3 * panel_gap + 20.0;
  const double peak = std::max(first_freq.maxCoeff(), second_freq.maxCoeff());
  const Eigen::VectorXd diff = first_freq - second_freq;
  const double diff_peak = std::max(1e-12, diff.cwiseAbs().maxCoeff());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) +
         "\" height=\"" + detail::fmt(height) + "\">\n";
  svg += "<text x=\"8\" y=\"18\" font-size=\"14\">" + title + "</text>\n";

  auto panel = [&](int index, const Eigen::VectorXd& freqs, const std::string& label) {
    const double base = margin_top + index * (panel_h + panel_gap) + panel_h;
    svg += "<text x=\"8\" y=\"" + detail::fmt(base - panel_h - 6) + "\" font-size=\"11\">" +
           label + "</text>\n";
    svg += "<line x1=\"" + detail::fmt(margin_left) + "\" y1=\"" + detail::fmt(base) +
           "\" x2=\"" + detail::fmt(margin_left + 101 * bar_w) + "\" y2=\"" + detail::fmt(base) +
           "\" stroke=\"#444\"/>\n";
    for (int r = 0; r <= 100; ++r) {
      const double h = peak > 0 ? panel_h * freqs(r) / peak : 0.0;
      if (h <= 0) continue;
      svg += "<rect x=\"" + detail::fmt(margin_left + r * bar_w) + "\" y=\"" +
             detail::fmt(base - h) + "\" width=\"" + detail::fmt(bar_w - 1) + "\" height=\"" +
             detail::fmt(h) + "\" fill=\"#3465a4\"/>\n";
    }
  };
  panel(0, first_freq, first_label);
  panel(1, second_freq, second_label);

  // difference panel, centered axis
  const double base = margin_top + 2 * (panel_h + panel_gap) + panel_h / 2;
  svg += "<text x=\"8\" y=\"" + detail::fmt(base - panel_h / 2 - 6) +
         "\" font-size=\"11\">difference (" + first_label + " - " + second_label + ")</text>\n";
  svg += "<line x1=\"" + detail::fmt(margin_left) + "\" y1=\"" + detail::fmt(base) + "\" x2=\"" +
         detail::fmt(margin_left + 101 * bar_w) + "\" y2=\"" + detail::fmt(base) +
         "\" stroke=\"#444\"/>\n";
  for (int r = 0; r <= 100; ++r) {
    const double h = (panel_h / 2) * diff(r) / diff_peak;
    if (h == 0) continue;
    const double y = h > 0 ? base - h : base;
    svg += "<rect x=\"" + detail::fmt(margin_left + r * bar_w) + "\" y=\"" + detail::fmt(y) +
           "\" width=\"" + detail::fmt(bar_w - 1) + "\" height=\"" + detail::fmt(std::abs(h)) +
           "\" fill=\"" + (h > 0 ? std::string("#3465a4") : std::string("#a40000")) + "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw render_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw render_error("write failed for '" + path + "'");
}

}  // namespace beliefwalk
