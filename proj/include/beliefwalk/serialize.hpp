#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "beliefwalk/dataio.hpp"
#include "beliefwalk/error.hpp"
#include "beliefwalk/inference.hpp"
#include "beliefwalk/models.hpp"
#include "beliefwalk/stats.hpp"

namespace beliefwalk {

using json = nlohmann::ordered_json;  // insertion-ordered; emission order is fixed below

inline constexpr const char* kFitsSchemaId = "beliefwalk/fits/v1";
inline constexpr const char* kGeneralizationSchemaId = "beliefwalk/generalization/v1";
inline constexpr const char* kAnalysisSchemaId = "beliefwalk/analysis/v1";

// --------------------------------------------------------------------------
// Matrices and params

inline json matrix3_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int k = 0; k < 3; ++k) {
    json row = json::array();
    for (int l = 0; l < 3; ++l) row.push_back(m(k, l));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::Matrix3d matrix3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw data_error("expected a 3x3 array");
  Eigen::Matrix3d m;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_array() || j[k].size() != 3) throw data_error("expected a 3x3 array");
    for (int l = 0; l < 3; ++l) m(k, l) = j[k][l].get<double>();
  }
  return m;
}

inline json params_to_json(const ModelParams& params) {
  json j;
  switch (family_of(params)) {
    case ModelFamily::Markov: {
      const auto& p = std::get<MarkovParams>(params);
      j["drift"] = p.drift;
      j["diffusion"] = p.diffusion;
      break;
    }
    case ModelFamily::Quantum: {
      const auto& p = std::get<QuantumParams>(params);
      j["potential_slope"] = p.potential_slope;
      j["coupling"] = p.coupling;
      break;
    }
    default: {
      const auto& p = std::get<MarkovVParams>(params);
      j["success_prob"] = p.success_prob;
      j["diffusion"] = p.diffusion;
      break;
    }
  }
  return j;
}

inline ModelParams params_from_json(ModelFamily family, const json& j) {
  auto need = [&](const char* key) -> double {
    if (!j.contains(key)) throw data_error(std::string("missing parameter '") + key + "'");
    return j.at(key).get<double>();
  };
  switch (family) {
    case ModelFamily::Markov: return MarkovParams{need("drift"), need("diffusion")};
    case ModelFamily::Quantum: return QuantumParams{need("potential_slope"), need("coupling")};
    default: return MarkovVParams{need("success_prob"), need("diffusion")};
  }
}

// --------------------------------------------------------------------------
// Fits file

inline json timings_to_json(const TimingMap& timings) {
  json j;
  for (const auto& [condition, pair] : timings.by_condition)
    j[std::to_string(condition)] = json::array({pair.first_s, pair.second_s});
  return j;
}

inline TimingMap timings_from_json(const json& j) {
  TimingMap map;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_array() || value.size() != 2) throw data_error("timing entries must be [t1,t2]");
    map.by_condition[std::stoi(key)] = {value[0].get<double>(), value[1].get<double>()};
  }
  return map;
}

inline json fit_to_json(const FitResult& fit) {
  json j;
  j["participant"] = fit.participant;
  j["coherence_pct"] = fit.coherence_pct;
  j["family"] = family_name(fit.family);
  j["params"] = params_to_json(fit.params);
  j["log_lik"] = fit.log_lik;
  j["g2"] = fit.g2;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

inline FitResult fit_from_json(const json& j) {
  FitResult fit;
  fit.participant = j.at("participant").get<std::string>();
  fit.coherence_pct = j.at("coherence_pct").get<int>();
  fit.family = parse_family(j.at("family").get<std::string>());
  fit.params = params_from_json(fit.family, j.at("params"));
  fit.log_lik = j.at("log_lik").get<double>();
  fit.g2 = j.at("g2").get<double>();
  fit.iterations = j.at("iterations").get<int>();
  fit.converged = j.at("converged").get<bool>();
  return fit;
}

inline json fits_file_to_json(const std::vector<FitResult>& fits, const TimingMap& timings) {
  json j;
  j["schema"] = kFitsSchemaId;
  j["timings"] = timings_to_json(timings);
  json arr = json::array();
  for (const FitResult& f : fits) arr.push_back(fit_to_json(f));
  j["fits"] = arr;
  return j;
}

inline std::vector<FitResult> fits_from_json(const json& j) {
  if (!j.contains("schema") || j.at("schema") != kFitsSchemaId)
    throw data_error("not a recognized fits file (expected schema " + std::string(kFitsSchemaId) +
                     ")");
  std::vector<FitResult> fits;
  for (const json& f : j.at("fits")) fits.push_back(fit_from_json(f));
  return fits;
}

// --------------------------------------------------------------------------
// Generalization file

inline std::string pair_key(ModelFamily a, ModelFamily b) {
  return std::string(family_name(a)) + "_vs_" + family_name(b);
}

inline json generalization_to_json(const GeneralizationReport& report) {
  json j;
  j["schema"] = kGeneralizationSchemaId;
  j["condition"] = report.condition;
  j["timing"] = json::array({report.timing.first_s, report.timing.second_s});
  json cells = json::array();
  for (const GeneralizationCell& cell : report.cells) {
    json c;
    c["participant"] = cell.participant;
    c["coherence_pct"] = cell.coherence_pct;
    c["observed"] = matrix3_to_json(cell.observed);
    json models = json::array();
    for (const ModelPrediction& m : cell.models) {
      json mj;
      mj["family"] = family_name(m.family);
      mj["params"] = params_to_json(m.params);
      mj["g2"] = m.g2;
      mj["predicted"] = matrix3_to_json(m.predicted.cells);
      models.push_back(mj);
    }
    c["models"] = models;
    std::vector<ModelFamily> ordered;
    for (const ModelPrediction& m : cell.models) ordered.push_back(m.family);
    std::sort(ordered.begin(), ordered.end(),
              [](ModelFamily a, ModelFamily b) { return comparison_rank(a) < comparison_rank(b); });
    json diffs;
    for (size_t a = 0; a < ordered.size(); ++a)
      for (size_t b = a + 1; b < ordered.size(); ++b)
        diffs[pair_key(ordered[a], ordered[b])] = cell.g2_diff(ordered[a], ordered[b]);
    c["g2_diff"] = diffs;
    cells.push_back(c);
  }
  j["cells"] = cells;

  json summaries = json::array();
  for (const CoherenceSummary& s : report.summaries) {
    json sj;
    sj["coherence_pct"] = s.coherence_pct;
    json sums;
    for (const auto& [family, sum] : s.g2_sum) sums[family_name(family)] = sum;
    sj["g2_sum"] = sums;
    json pairs = json::array();
    for (const PairSummary& p : s.pairs) {
      json pj;
      pj["pair"] = pair_key(p.first, p.second);
      pj["g2_diff_sum"] = p.diff_sum;
      pj["participants_favoring_first"] = p.favoring_first;
      pj["participants_favoring_second"] = p.favoring_second;
      pj["ties"] = p.ties;
      pairs.push_back(pj);
    }
    sj["pairs"] = pairs;
    summaries.push_back(sj);
  }
  j["summary"] = summaries;
  return j;
}

// --------------------------------------------------------------------------
// Analysis file

inline json test_report_to_json(const TestReport& report) {
  json j;
  j["name"] = report.name;
  j["statistic"] = report.statistic;
  if (report.is_f_test) {
    j["df"] = json::array({report.f_df.first, report.f_df.second});
    j["hotelling_t2"] = report.hotelling_t2;
  } else {
    j["df"] = report.df;
  }
  j["p_value"] = report.p_value;
  j["critical_05"] = report.critical_05;
  json components = json::array();
  for (const ParticipantComponent& c : report.components) {
    json cj;
    cj["participant"] = c.participant;
    cj["statistic"] = c.statistic;
    cj["df"] = c.df;
    cj["excluded"] = c.excluded;
    components.push_back(cj);
  }
  j["components"] = components;
  j["warnings"] = report.warnings;
  return j;
}

// --------------------------------------------------------------------------
// Embedded output schemas (subset of JSON Schema: type, const, enum,
// required, properties, items) plus a structural validator for them.

inline json fits_schema() {
  return json::parse(R"({
    "$id": "beliefwalk/fits/v1",
    "type": "object",
    "required": ["schema", "timings", "fits"],
    "properties": {
      "schema": {"const": "beliefwalk/fits/v1"},
      "timings": {"type": "object"},
      "fits": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["participant", "coherence_pct", "family", "params",
                       "log_lik", "g2", "iterations", "converged"],
          "properties": {
            "participant": {"type": "string"},
            "coherence_pct": {"type": "integer"},
            "family": {"enum": ["markov", "quantum", "markovv"]},
            "params": {"type": "object"},
            "log_lik": {"type": "number"},
            "g2": {"type": "number"},
            "iterations": {"type": "integer"},
            "converged": {"type": "boolean"}
          }
        }
      }
    }
  })");
}

inline json generalization_schema() {
  return json::parse(R"({
    "$id": "beliefwalk/generalization/v1",
    "type": "object",
    "required": ["schema", "condition", "timing", "cells", "summary"],
    "properties": {
      "schema": {"const": "beliefwalk/generalization/v1"},
      "condition": {"type": "integer"},
      "timing": {"type": "array"},
      "cells": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["participant", "coherence_pct", "observed", "models", "g2_diff"],
          "properties": {
            "participant": {"type": "string"},
            "coherence_pct": {"type": "integer"},
            "observed": {"type": "array"},
            "models": {"type": "array"},
            "g2_diff": {"type": "object"}
          }
        }
      },
      "summary": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["coherence_pct", "g2_sum", "pairs"],
          "properties": {
            "coherence_pct": {"type": "integer"},
            "g2_sum": {"type": "object"},
            "pairs": {"type": "array"}
          }
        }
      }
    }
  })");
}

inline json analysis_schema() {
  return json::parse(R"({
    "$id": "beliefwalk/analysis/v1",
    "type": "object",
    "required": ["schema", "marginal_interference", "joint_1_vs_3", "joint_2_vs_3",
                 "mean_change_hotelling"],
    "properties": {
      "schema": {"const": "beliefwalk/analysis/v1"},
      "marginal_interference": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["coherence_pct", "report"],
          "properties": {
            "coherence_pct": {"type": "integer"},
            "report": {"type": "object"}
          }
        }
      },
      "joint_1_vs_3": {"type": "object"},
      "joint_2_vs_3": {"type": "object"},
      "mean_change_hotelling": {"type": "object"}
    }
  })");
}

// Validate a document against the schema subset above. Returns the first
// violation, or an empty string when the document conforms.
inline std::string schema_violation(const json& doc, const json& schema,
                                    const std::string& path = "$") {
  if (schema.contains("const")) {
    if (doc != schema.at("const")) return path + ": expected constant value";
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const json& v : schema.at("enum"))
      if (doc == v) found = true;
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("type")) {
    const std::string type = schema.at("type").get<std::string>();
    const bool ok = (type == "object" && doc.is_object()) || (type == "array" && doc.is_array()) ||
                    (type == "string" && doc.is_string()) ||
                    (type == "number" && doc.is_number()) ||
                    (type == "integer" && doc.is_number_integer()) ||
                    (type == "boolean" && doc.is_boolean());
    if (!ok) return path + ": expected type " + type;
  }
  if (schema.contains("required")) {
    for (const json& key : schema.at("required"))
      if (!doc.contains(key.get<std::string>()))
        return path + ": missing required key '" + key.get<std::string>() + "'";
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (const auto& [key, sub] : schema.at("properties").items()) {
      if (!doc.contains(key)) continue;
      const std::string err = schema_violation(doc.at(key), sub, path + "." + key);
      if (!err.empty()) return err;
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    int i = 0;
    for (const json& element : doc) {
      const std::string err =
          schema_violation(element, schema.at("items"), path + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
      ++i;
    }
  }
  return "";
}

}  // namespace beliefwalk
