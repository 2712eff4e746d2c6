#pragma once

// End-to-end onset benchmark: anchors and features per show, show-level
// split, text PCA fitted on training anchors, and one train / tune / evaluate
// cycle per feature group.

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/onset/classifier.hpp"
#include "mmalign/onset/features.hpp"
#include "mmalign/onset/metrics.hpp"
#include "mmalign/onset/pca.hpp"
#include "mmalign/onset/split.hpp"
#include "mmalign/random.hpp"
#include "mmalign/show_json.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::onset {

enum class FeatureSet { history, text, vision, text_vision, all };

inline constexpr std::array<FeatureSet, 5> kAllFeatureSets = {FeatureSet::history, FeatureSet::text,
                                                              FeatureSet::vision, FeatureSet::text_vision,
                                                              FeatureSet::all};

/// Row label used in the ablation table.
inline std::string table_name(FeatureSet s) {
  switch (s) {
    case FeatureSet::history: return "history-only";
    case FeatureSet::text: return "text-only";
    case FeatureSet::vision: return "vision-only";
    case FeatureSet::text_vision: return "text+vision";
    case FeatureSet::all: return "text+vision+history";
  }
  return "?";
}

/// Name accepted on the command line.
inline std::string cli_name(FeatureSet s) {
  switch (s) {
    case FeatureSet::history: return "history";
    case FeatureSet::text: return "text";
    case FeatureSet::vision: return "vision";
    case FeatureSet::text_vision: return "text+vision";
    case FeatureSet::all: return "all";
  }
  return "?";
}

inline FeatureSet parse_feature_set(const std::string& s) {
  for (auto f : kAllFeatureSets) {
    if (s == cli_name(f) || s == table_name(f)) return f;
  }
  throw InputError("unknown feature set '" + s + "' (expected all, history, text, vision or text+vision)");
}

inline constexpr std::size_t kFullDim = kHistoryDim + kTextDim + kVisionDim;

/// Column indices into the concatenated [history | text | vision] vector.
inline std::vector<std::size_t> feature_columns(FeatureSet s) {
  std::vector<std::size_t> cols;
  auto add = [&](std::size_t from, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) cols.push_back(from + i);
  };
  const bool hist = s == FeatureSet::history || s == FeatureSet::all;
  const bool text = s == FeatureSet::text || s == FeatureSet::text_vision || s == FeatureSet::all;
  const bool vis = s == FeatureSet::vision || s == FeatureSet::text_vision || s == FeatureSet::all;
  if (hist) add(0, kHistoryDim);
  if (text) add(kHistoryDim, kTextDim);
  if (vis) add(kHistoryDim + kTextDim, kVisionDim);
  return cols;
}

inline std::vector<std::string> full_feature_names() {
  std::vector<std::string> names(history_feature_names().begin(), history_feature_names().end());
  for (auto& n : text_feature_names()) names.push_back(n);
  names.insert(names.end(), vision_feature_names().begin(), vision_feature_names().end());
  return names;
}

inline std::vector<double> full_features(const AnchorSample& a) {
  std::vector<double> v;
  v.reserve(kFullDim);
  v.insert(v.end(), a.history.begin(), a.history.end());
  v.insert(v.end(), a.text.begin(), a.text.end());
  v.insert(v.end(), a.vision.begin(), a.vision.end());
  return v;
}

/// One show's inputs: the unified timeline and its (unsmoothed) kinematics.
struct BenchShow {
  const ShowTimeline* show = nullptr;
  std::span<const KinematicSample> kinematics;
};

struct BenchConfig {
  double step = kDefaultStep;
  double delta = kDefaultDelta;
  double window = kDefaultHistoryWindow;
  SplitRatios ratios = kDefaultSplitRatios;
  std::uint64_t seed = 0;
  ClassifierConfig classifier;
  std::size_t text_dim = kTextDim;
  /// Shuffle training labels (a chance-level control).
  bool permute_train_labels = false;
  int jobs = 1;
};

struct AnchorTable {
  std::vector<AnchorSample> anchors;
  std::vector<std::size_t> show_index;  // into the BenchShow list
  std::vector<int> block_index;         // block holding t with an embedding, or -1
};

namespace detail {

inline AnchorTable anchors_for_show(const BenchShow& in, std::size_t index, const BenchConfig& cfg) {
  const ShowTimeline& show = *in.show;
  const auto events = all_laugh_events(show);
  const auto shots = all_shot_frames(show);
  for (std::size_t i = 1; i < in.kinematics.size(); ++i) {
    if (in.kinematics[i].time < in.kinematics[i - 1].time) throw InvariantError("kinematics not sorted by time");
  }
  AnchorTable out;
  out.anchors = sample_anchors(show.show_id, events, show.end_time(), cfg.step, cfg.delta);
  for (auto& a : out.anchors) {
    a.history = history_features(events, a.t, cfg.window);
    a.vision = vision_features(shots, in.kinematics, a.t, cfg.window);
    const auto b = block_at(show, a.t);
    const bool has_emb = b && !show.timeline[*b].embedding.empty();
    out.block_index.push_back(has_emb ? static_cast<int>(*b) : -1);
    out.show_index.push_back(index);
  }
  return out;
}

}  // namespace detail

/// Anchors with history and vision features for every show, in input order.
inline AnchorTable build_anchor_table(std::span<const BenchShow> shows, const BenchConfig& cfg) {
  std::vector<AnchorTable> parts(shows.size());
  const auto jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
  if (jobs == 1 || shows.size() < 2) {
    for (std::size_t i = 0; i < shows.size(); ++i) parts[i] = detail::anchors_for_show(shows[i], i, cfg);
  } else {
    for (std::size_t lo = 0; lo < shows.size(); lo += jobs) {
      std::vector<std::future<AnchorTable>> tasks;
      for (std::size_t i = lo; i < std::min(shows.size(), lo + jobs); ++i) {
        tasks.push_back(std::async(std::launch::async, detail::anchors_for_show, std::cref(shows[i]), i, std::cref(cfg)));
      }
      for (std::size_t k = 0; k < tasks.size(); ++k) parts[lo + k] = tasks[k].get();
    }
  }
  AnchorTable all;
  for (auto& p : parts) {
    std::move(p.anchors.begin(), p.anchors.end(), std::back_inserter(all.anchors));
    all.show_index.insert(all.show_index.end(), p.show_index.begin(), p.show_index.end());
    all.block_index.insert(all.block_index.end(), p.block_index.begin(), p.block_index.end());
  }
  return all;
}

/// Fits the text PCA on anchors whose show is accepted by `use`; each anchor
/// contributes its block's embedding once.
template <class Use>
Pca fit_text_pca(std::span<const BenchShow> shows, const AnchorTable& table, std::size_t k, Use use,
                 Warnings* warnings = nullptr) {
  std::map<std::pair<std::size_t, int>, double> counts;
  for (std::size_t i = 0; i < table.anchors.size(); ++i) {
    if (table.block_index[i] < 0 || !use(table.show_index[i])) continue;
    counts[{table.show_index[i], table.block_index[i]}] += 1.0;
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  for (const auto& [key, w] : counts) {
    rows.push_back(shows[key.first].show->timeline[static_cast<std::size_t>(key.second)].embedding);
    weights.push_back(w);
  }
  if (rows.empty()) throw InvariantError("no training anchors have a text embedding");
  return fit_pca(rows, weights, k, warnings);
}

inline void fill_text_features(std::span<const BenchShow> shows, AnchorTable& table, const Pca& pca) {
  std::map<std::pair<std::size_t, int>, std::vector<double>> cache;
  for (std::size_t i = 0; i < table.anchors.size(); ++i) {
    auto& text = table.anchors[i].text;
    if (table.block_index[i] < 0) {
      text.fill(0.0);
      continue;
    }
    const auto key = std::make_pair(table.show_index[i], table.block_index[i]);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto& emb = shows[key.first].show->timeline[static_cast<std::size_t>(key.second)].embedding;
      it = cache.emplace(key, pca.transform_padded(emb, kTextDim)).first;
    }
    std::copy_n(it->second.begin(), kTextDim, text.begin());
  }
}

struct AblationRow {
  FeatureSet set = FeatureSet::all;
  MetricsReport metrics;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  double val_f1 = 0.0;
};

struct AblationResult {
  SplitAssignment split;
  std::vector<AblationRow> rows;
  std::size_t n_anchors = 0;
  double positive_rate = 0.0;  // over all anchors
  std::size_t pca_components = 0;
  std::optional<Classifier> model;  // for the requested feature set
  FeatureSet model_set = FeatureSet::all;
  std::vector<std::string> model_features;
};

inline Matrix gather_matrix(const AnchorTable& table, std::span<const std::size_t> rows,
                            std::span<const std::size_t> cols) {
  Matrix m(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto full = full_features(table.anchors[rows[r]]);
    for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = full[cols[c]];
  }
  return m;
}

/// Runs the benchmark on `input` (any order; show ids must be unique).
/// Shows are processed in id order, so results do not depend on input order.
/// `model_set` picks which trained model is returned.
inline AblationResult run_ablation(std::span<const BenchShow> input, std::span<const FeatureSet> sets,
                                   const BenchConfig& cfg, FeatureSet model_set = FeatureSet::all,
                                   Warnings* warnings = nullptr) {
  std::vector<BenchShow> ordered(input.begin(), input.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const BenchShow& a, const BenchShow& b) { return a.show->show_id < b.show->show_id; });
  const std::span<const BenchShow> shows(ordered);
  std::vector<std::string> ids;
  for (const auto& s : shows) ids.push_back(s.show->show_id);
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("duplicate show ids");

  AblationResult result;
  result.split = group_split(ids, cfg.ratios, cfg.seed);
  AnchorTable table = build_anchor_table(shows, cfg);
  result.n_anchors = table.anchors.size();
  if (table.anchors.empty()) throw InvariantError("corpus produced no anchors");
  std::size_t pos = 0;
  for (const auto& a : table.anchors) pos += a.label ? 1 : 0;
  result.positive_rate = static_cast<double>(pos) / static_cast<double>(table.anchors.size());

  std::vector<Fold> fold_of_show(shows.size());
  for (std::size_t i = 0; i < shows.size(); ++i) fold_of_show[i] = result.split.fold_of.at(ids[i]);

  const Pca pca = fit_text_pca(
      shows, table, cfg.text_dim, [&](std::size_t s) { return fold_of_show[s] == Fold::train; }, warnings);
  result.pca_components = pca.components();
  fill_text_features(shows, table, pca);

  std::array<std::vector<std::size_t>, 3> rows;
  std::array<std::vector<int>, 3> labels;
  for (std::size_t i = 0; i < table.anchors.size(); ++i) {
    const auto f = static_cast<std::size_t>(fold_of_show[table.show_index[i]]);
    rows[f].push_back(i);
    labels[f].push_back(table.anchors[i].label ? 1 : 0);
  }
  if (cfg.permute_train_labels) {
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    shuffle(std::span<int>(labels[0]), rng);
  }

  const auto names = full_feature_names();
  for (FeatureSet set : sets) {
    const auto cols = feature_columns(set);
    const Matrix xtr = gather_matrix(table, rows[0], cols);
    const Matrix xva = gather_matrix(table, rows[1], cols);
    const Matrix xte = gather_matrix(table, rows[2], cols);
    ClassifierConfig ccfg = cfg.classifier;
    ccfg.gbdt.jobs = cfg.jobs;
    Classifier model = train_classifier(xtr, labels[0], ccfg);
    const auto choice = tune_threshold(model.score_all(xva), labels[1]);
    AblationRow row;
    row.set = set;
    row.metrics = compute_metrics(model.score_all(xte), labels[2], choice.threshold);
    row.n_train = rows[0].size();
    row.n_val = rows[1].size();
    row.n_test = rows[2].size();
    row.val_f1 = choice.f1;
    result.rows.push_back(row);
    if (set == model_set) {
      result.model = std::move(model);
      result.model_set = set;
      result.model_features.clear();
      for (auto c : cols) result.model_features.push_back(names[c]);
    }
  }
  return result;
}

inline Json split_to_json(const SplitAssignment& split, const SplitRatios& ratios, std::uint64_t seed) {
  Json j = Json::object();
  j["seed"] = seed;
  j["ratios"] = Json::array({ratios[0], ratios[1], ratios[2]});
  for (Fold f : {Fold::train, Fold::val, Fold::test}) j[to_string(f)] = split.shows(f);
  return j;
}

}  // namespace mmalign::onset
