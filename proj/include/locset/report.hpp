#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "locset/engine.hpp"
#include "locset/graph_cut.hpp"
#include "locset/logistic.hpp"
#include "locset/roc.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

enum class SweepAxis { gamma, lambda, c };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::c: return "C";
  }
  return "?";
}

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "gamma") return SweepAxis::gamma;
  if (s == "lambda") return SweepAxis::lambda;
  if (s == "C" || s == "c") return SweepAxis::c;
  throw ConfigError("unknown sweep axis: " + s + " (want gamma|lambda|C)");
}

struct SweepCell {
  double value = 0.0;
  bool ok = false;
  double auc = 0.0;
  std::string error;  // set when !ok
};

struct SweepReport {
  SweepAxis axis = SweepAxis::gamma;
  std::vector<SweepCell> cells;
  std::optional<SweepCell> gamma_zero_baseline;
};

// Everything a sweep needs besides the snapshot: the base energy and model
// configuration that stays fixed while one axis varies.
struct SweepInputs {
  LinkEnergyParams link;
  ProfileModelMode mode = ProfileModelMode::fixed_odds;
  CategorizerConfig categorizer;
  FeatureSchema schema;
  TrainConfig train;
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
};

namespace detail {

inline TrainingSet truth_training_set(const Snapshot& snap,
                                      const FeatureSchema& schema) {
  TrainingSet data{{}, {}, schema};
  for (const auto& u : snap.users) {
    GroundTruth g = snap.truth_of(u.id);
    if (g == GroundTruth::unknown) continue;
    data.x.push_back(extract_features(u, schema));
    data.y.push_back(g == GroundTruth::inside ? 1 : 0);
  }
  return data;
}

inline double classify_auc(const Snapshot& snap, const ProfileEnergyModel& model,
                           const LinkEnergyParams& link) {
  ClassificationResult r = classify(snap, model, link);
  std::vector<std::pair<double, int>> scored;
  for (const auto& u : snap.users) {
    GroundTruth g = snap.truth_of(u.id);
    if (g == GroundTruth::unknown) continue;
    scored.emplace_back(r.membership_probability.at(u.id),
                        g == GroundTruth::inside ? 1 : 0);
  }
  return roc_auc(std::move(scored)).auc;
}

}  // namespace detail

// Reclassifies the frozen snapshot once per axis value, holding everything
// else at the base configuration, and reports the AUC against the stored
// ground truth. A failing cell is recorded, not fatal. Sweeping C refits
// the logistic model per cell; sweeping gamma/lambda fits the profile model
// once (it does not depend on the link energy). A gamma=0 baseline (pure
// profile-model ranking) is always included.
inline SweepReport sweep(const Snapshot& snap, const SweepInputs& base,
                         SweepAxis axis, const std::vector<double>& values) {
  base.link.validate();
  base.categorizer.validate();
  SweepReport report;
  report.axis = axis;

  // The base profile model, shared by every gamma/lambda cell and by the
  // baseline. C cells build their own.
  auto base_model = [&]() -> ProfileEnergyModel {
    if (base.mode == ProfileModelMode::logistic) {
      ValidationResult vr = fit_with_validation(
          detail::truth_training_set(snap, base.schema), base.c_grid, base.train);
      return vr.model;
    }
    return FixedOddsModel{base.categorizer};
  };

  std::optional<ProfileEnergyModel> shared_model;
  auto shared = [&]() -> const ProfileEnergyModel& {
    if (!shared_model.has_value()) shared_model = base_model();
    return *shared_model;
  };

  for (double v : values) {
    SweepCell cell;
    cell.value = v;
    try {
      LinkEnergyParams link = base.link;
      if (axis == SweepAxis::gamma) {
        link.gamma = v;
        cell.auc = detail::classify_auc(snap, shared(), link);
      } else if (axis == SweepAxis::lambda) {
        link.lambda = v;
        cell.auc = detail::classify_auc(snap, shared(), link);
      } else {
        if (base.mode != ProfileModelMode::logistic)
          throw ConfigError("sweeping C requires the logistic profile model");
        TrainConfig tc = base.train;
        tc.c = v;
        FitResult fr =
            fit_logistic(detail::truth_training_set(snap, base.schema), tc);
        ProfileEnergyModel m = LinearModel{base.schema, fr.beta};
        cell.auc = detail::classify_auc(snap, m, link);
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    report.cells.push_back(std::move(cell));
  }

  SweepCell baseline;
  baseline.value = 0.0;
  try {
    LinkEnergyParams link = base.link;
    link.gamma = 0.0;
    baseline.auc = detail::classify_auc(snap, shared(), link);
    baseline.ok = true;
  } catch (const std::exception& e) {
    baseline.error = e.what();
  }
  report.gamma_zero_baseline = std::move(baseline);
  return report;
}

// Case-folded token counts over posts in a date range. Tokens split on
// ASCII non-alphanumerics; multi-byte UTF-8 sequences stay intact. Dates
// compare as ISO 8601 prefixes (YYYY-MM-DD), inclusive on both ends; an
// empty bound is open.
inline std::vector<std::pair<std::string, std::size_t>> term_frequencies(
    const Snapshot& snap, const std::string& from_date,
    const std::string& to_date, const std::vector<std::string>& stopwords,
    std::size_t top_k) {
  auto in_range = [&](const std::string& ts) {
    std::string day = ts.substr(0, std::min<std::size_t>(10, ts.size()));
    if (!from_date.empty() && day < from_date) return false;
    if (!to_date.empty() && day > to_date) return false;
    return true;
  };
  auto is_word_byte = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c >= 0x80;
  };

  std::map<std::string, std::size_t> counts;
  for (const auto& u : snap.users) {
    const auto* posts = snap.posts_of(u.id);
    if (!posts) continue;
    for (const auto& p : *posts) {
      if (!in_range(p.timestamp)) continue;
      std::size_t i = 0;
      const std::string& text = p.text;
      while (i < text.size()) {
        while (i < text.size() && !is_word_byte(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && is_word_byte(text[i])) ++i;
        if (i == start) continue;
        std::string tok = to_lower(text.substr(start, i - start));
        bool stop = false;
        for (const auto& s : stopwords)
          if (equals_ci(tok, s)) { stop = true; break; }
        if (!stop) ++counts[tok];
      }
    }
  }

  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(),
                                                       counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

// ---- Report writers -------------------------------------------------------
// All doubles print via "%.17g" so identical runs produce identical bytes.

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace detail

inline void write_labels_csv(const Snapshot& snap,
                             const ClassificationResult& result,
                             const std::string& path) {
  auto out = detail::open_out(path);
  out << "user_id,label,p1\n";
  for (const auto& [id, label] : result.labels) {
    out << id << ',' << label << ','
        << detail::fmt_double(result.membership_probability.at(id)) << '\n';
  }
  (void)snap;
}

inline void write_roc_csv(const RocReport& roc, const std::string& path) {
  auto out = detail::open_out(path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : roc.points)
    out << detail::fmt_double(p.threshold) << ',' << detail::fmt_double(p.fpr)
        << ',' << detail::fmt_double(p.tpr) << '\n';
}

inline void write_sweep_csv(const SweepReport& report, const std::string& path) {
  auto out = detail::open_out(path);
  out << "axis,value,auc,error\n";
  auto sanitize = [](std::string s) {
    for (char& c : s)
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
  };
  auto row = [&](const char* axis, const SweepCell& cell) {
    out << axis << ',' << detail::fmt_double(cell.value) << ',';
    if (cell.ok) out << detail::fmt_double(cell.auc);
    out << ',' << sanitize(cell.error) << '\n';
  };
  if (report.gamma_zero_baseline.has_value())
    row("gamma_baseline", *report.gamma_zero_baseline);
  for (const auto& cell : report.cells) row(sweep_axis_name(report.axis), cell);
}

inline void write_freq_csv(
    const std::vector<std::pair<std::string, std::size_t>>& freq,
    const std::string& path) {
  auto out = detail::open_out(path);
  out << "term,count\n";
  for (const auto& [term, count] : freq) out << term << ',' << count << '\n';
}

inline nlohmann::json metrics_to_json(const IterationMetrics& m) {
  nlohmann::json j;
  j["iteration"] = m.iteration;
  j["users"] = m.user_count;
  j["edges"] = m.edge_count;
  j["labeled_in"] = m.labeled_in;
  j["truth_known"] = m.truth_known;
  j["truth_inside"] = m.truth_inside;
  j["truth_outside"] = m.truth_outside;
  j["auc"] = m.auc.has_value() ? nlohmann::json(*m.auc) : nlohmann::json();
  j["chosen_c"] =
      m.chosen_c.has_value() ? nlohmann::json(*m.chosen_c) : nlohmann::json();
  j["fixed_odds_fallback"] = m.fixed_odds_fallback;
  j["energy"] = m.energy;
  j["cut_value"] = m.cut_value;
  return j;
}

inline nlohmann::json link_params_to_json(const LinkEnergyParams& p) {
  nlohmann::json j;
  j["gamma"] = p.gamma;
  j["alpha1"] = p.alpha1;
  j["alpha2"] = p.alpha2;
  j["lambda"] = p.lambda;
  return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace locset
