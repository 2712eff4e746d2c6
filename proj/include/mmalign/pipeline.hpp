#pragma once

// Pipeline stages over corpus directories. Each stage reads its inputs,
// returns in-memory results, and has a writer that renders the on-disk
// artifact. The CLI is a thin layer over these.
//
// Raw corpus layout, one directory per show:
//   <corpus>/<show_id>/subtitles.srt | subtitles.vtt
//   <corpus>/<show_id>/laughter.jsonl   window scores or merged events
//   <corpus>/<show_id>/shots.jsonl
//   <corpus>/<show_id>/poses.jsonl
//   <corpus>/<show_id>/topics.jsonl     {block_index, topic_id, embedding}
//   <corpus>/descriptors.json           optional topic descriptors

#include <algorithm>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmalign/analysis.hpp"
#include "mmalign/error.hpp"
#include "mmalign/io.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/onset/bench.hpp"
#include "mmalign/show_json.hpp"
#include "mmalign/stopwords.hpp"
#include "mmalign/subtitles.hpp"
#include "mmalign/synthetic.hpp"
#include "mmalign/timeline.hpp"
#include "mmalign/topic_eval.hpp"

namespace mmalign::pipeline {

// ---------------------------------------------------------------------------
// Inputs

struct ShowFiles {
  std::string show_id;
  fs::path dir;
  std::optional<fs::path> subtitles;
  std::optional<fs::path> laughter;
  std::optional<fs::path> shots;
  std::optional<fs::path> poses;
  std::optional<fs::path> topics;
};

/// Show directories of a raw corpus, sorted by id. Missing modalities are
/// reported as warnings, not errors.
inline std::vector<ShowFiles> discover_corpus(const fs::path& corpus, Warnings* warnings = nullptr) {
  if (!fs::is_directory(corpus)) throw InputError(corpus.string() + ": not a directory");
  std::vector<ShowFiles> shows;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    if (!entry.is_directory()) continue;
    ShowFiles s;
    s.show_id = entry.path().filename().string();
    s.dir = entry.path();
    auto pick = [&](std::initializer_list<const char*> names) -> std::optional<fs::path> {
      for (const char* n : names) {
        if (fs::is_regular_file(s.dir / n)) return s.dir / n;
      }
      return std::nullopt;
    };
    s.subtitles = pick({"subtitles.srt", "subtitles.vtt"});
    s.laughter = pick({"laughter.jsonl"});
    s.shots = pick({"shots.jsonl"});
    s.poses = pick({"poses.jsonl"});
    s.topics = pick({"topics.jsonl"});
    if (warnings) {
      if (!s.subtitles) warnings->add(s.show_id + ": no subtitles; show skipped");
      if (!s.laughter) warnings->add(s.show_id + ": no laughter.jsonl");
      if (!s.shots) warnings->add(s.show_id + ": no shots.jsonl");
      if (!s.poses) warnings->add(s.show_id + ": no poses.jsonl");
      if (!s.topics) warnings->add(s.show_id + ": no topics.jsonl; blocks left as outliers without embeddings");
    }
    if (s.subtitles) shows.push_back(std::move(s));
  }
  std::sort(shows.begin(), shows.end(), [](const auto& a, const auto& b) { return a.show_id < b.show_id; });
  if (shows.empty()) throw InputError(corpus.string() + ": no show directories with subtitles");
  return shows;
}

/// Each entry is a built-in list name or a file path.
inline StopwordSet load_stopword_sources(const std::vector<std::string>& sources) {
  StopwordSet set;
  for (const auto& src : sources) {
    if (src == "english" || src == "fillers-v1") {
      set.merge(builtin_stopwords(src));
    } else {
      set.merge(load_stopwords(read_file(src)));
    }
  }
  return set;
}

template <class T, class Fn>
std::vector<T> read_records(const fs::path& path, Fn fn, Warnings* warnings) {
  const auto text = read_file(path);
  const auto records = parse_jsonl(text, path.string());
  std::vector<T> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back(fn(records[i], path.string() + ":" + std::to_string(i + 1), warnings));
  }
  return out;
}

template <class T>
void sort_by_time(std::vector<T>& v) {
  std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.time < b.time; });
}

inline std::vector<ShotFrame> read_shots(const fs::path& path, Warnings* warnings) {
  auto v = read_records<ShotFrame>(path, shot_frame_from_json, warnings);
  sort_by_time(v);
  return v;
}

inline std::vector<PoseFrame> read_poses(const fs::path& path, Warnings* warnings) {
  auto v = read_records<PoseFrame>(path, pose_frame_from_json, warnings);
  sort_by_time(v);
  return v;
}

inline std::vector<TopicAssignment> read_assignments(const fs::path& path, Warnings* warnings) {
  auto v = read_records<TopicAssignment>(path, topic_assignment_from_json, warnings);
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.block_index < b.block_index; });
  return v;
}

// ---------------------------------------------------------------------------
// Stages

inline std::vector<TextBlock> parse_subs(const fs::path& path, double target_duration, const StopwordSet& stopwords,
                                         Warnings* warnings) {
  const auto bytes = read_file(path);
  std::vector<SubtitleCue> cues;
  try {
    cues = path.extension() == ".vtt" ? parse_vtt(bytes, warnings) : parse_srt(bytes, warnings);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
  return build_blocks(cues, target_duration, stopwords);
}

inline std::set<ShotLabel> parse_shot_filter(const std::vector<std::string>& names) {
  std::set<ShotLabel> out;
  for (const auto& n : names) {
    const auto l = parse_shot_label(n);
    if (!l) throw InputError("unknown shot label '" + n + "' in shot filter");
    out.insert(*l);
  }
  return out;
}

/// Single performer, shot filter, per-frame signals; smoothed when
/// `window` is set.
inline std::vector<KinematicSample> kinematics(std::span<const PoseFrame> poses, std::span<const ShotFrame> shots,
                                               const std::set<ShotLabel>& allowed, std::optional<double> window,
                                               Warnings* warnings) {
  const auto single = single_performer(poses, warnings);
  const auto filtered = filter_by_shot(single, shots, allowed, warnings);
  auto raw = compute_kinematics(filtered);
  if (!window) return raw;
  return smooth(raw, *window);
}

/// Centroid reassignment of outliers followed by single-pass gap filling
/// in block order. Centroids come from `descriptors` when they carry one,
/// otherwise from the assignments themselves.
inline std::vector<TopicAssignment> postprocess_topics(std::span<const TopicAssignment> assignments,
                                                       std::span<const TopicDescriptor> descriptors,
                                                       double threshold) {
  std::vector<TopicDescriptor> centroids;
  for (const auto& d : descriptors) {
    if (!d.centroid.empty()) centroids.push_back(d);
  }
  if (centroids.empty()) centroids = compute_centroids(assignments);
  std::vector<TopicAssignment> out(assignments.begin(), assignments.end());
  if (!centroids.empty()) out = centroid_reassign(out, centroids, threshold);
  std::vector<int> seq;
  for (const auto& a : out) seq.push_back(a.topic_id);
  const auto filled = gap_fill(seq);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].topic_id = filled[i];
  return out;
}

/// Topic blocks from text blocks and per-block assignments, then containment
/// of the three event streams.
inline ShowTimeline build_show(const std::string& show_id, std::span<const TextBlock> text_blocks,
                               std::span<const TopicAssignment> assignments, std::span<const LaughterEvent> laughs,
                               std::span<const ShotFrame> shots, std::span<const PoseFrame> poses,
                               Warnings* warnings) {
  std::map<int, const TopicAssignment*> by_block;
  for (const auto& a : assignments) {
    if (a.block_index < 0 || static_cast<std::size_t>(a.block_index) >= text_blocks.size()) {
      if (warnings) warnings->add(show_id + ": topic assignment for unknown block " + std::to_string(a.block_index));
      continue;
    }
    by_block[a.block_index] = &a;
  }
  std::vector<TopicBlock> blocks;
  std::size_t missing = 0;
  for (std::size_t i = 0; i < text_blocks.size(); ++i) {
    TopicBlock b;
    b.block_id = static_cast<int>(i);
    b.span = text_blocks[i].span;
    b.text = text_blocks[i].text;
    auto it = by_block.find(static_cast<int>(i));
    if (it != by_block.end()) {
      b.topic_id = it->second->topic_id;
      if (!it->second->embedding.empty()) b.embedding = normalize_embedding(it->second->embedding);
    } else {
      ++missing;
    }
    blocks.push_back(std::move(b));
  }
  if (missing > 0 && warnings && !assignments.empty()) {
    warnings->add(show_id + ": " + std::to_string(missing) + " blocks without a topic assignment");
  }
  auto show = align_show(show_id, std::move(blocks), laughs, shots, poses);
  validate(show);
  return show;
}

/// Descriptors with a centroid for every topic: centroids missing from
/// `descriptors` are computed from the assignments of the whole corpus.
inline std::vector<TopicDescriptor> with_corpus_centroids(std::span<const ShowFiles> files,
                                                          std::vector<TopicDescriptor> descriptors,
                                                          Warnings* warnings) {
  const bool complete = !descriptors.empty() && std::all_of(descriptors.begin(), descriptors.end(),
                                                            [](const auto& d) { return !d.centroid.empty(); });
  if (complete) return descriptors;
  std::vector<TopicAssignment> all;
  for (const auto& f : files) {
    if (!f.topics) continue;
    auto rows = read_assignments(*f.topics, nullptr);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  for (auto& c : compute_centroids(all)) {
    auto it = std::find_if(descriptors.begin(), descriptors.end(),
                           [&](const TopicDescriptor& d) { return d.topic_id == c.topic_id; });
    if (it == descriptors.end()) {
      descriptors.push_back(std::move(c));
    } else if (it->centroid.empty()) {
      it->centroid = std::move(c.centroid);
    }
  }
  if (warnings && all.empty()) warnings->add("no topic assignments in corpus; outlier reassignment skipped");
  return descriptors;
}

struct AlignedShow {
  ShowTimeline show;
  std::vector<TextBlock> blocks;
  std::vector<LaughterEvent> laughs;
  std::vector<TopicAssignment> raw_topics;
  std::vector<TopicAssignment> topics;  // post-processed
  std::vector<KinematicSample> kinematics;  // smoothed
};

inline AlignedShow process_show(const ShowFiles& files, const PipelineConfig& cfg, const StopwordSet& stopwords,
                                std::span<const TopicDescriptor> descriptors, Warnings* warnings) {
  AlignedShow out;
  out.blocks = parse_subs(*files.subtitles, cfg.target_duration, stopwords, warnings);
  if (files.laughter) {
    out.laughs = laughter_from_jsonl(read_file(*files.laughter), files.laughter->string(), cfg.laugh_threshold,
                                     warnings);
  }
  std::vector<ShotFrame> shots;
  std::vector<PoseFrame> poses;
  if (files.shots) shots = read_shots(*files.shots, warnings);
  if (files.poses) poses = read_poses(*files.poses, warnings);
  if (files.topics) {
    out.raw_topics = read_assignments(*files.topics, warnings);
    out.topics = postprocess_topics(out.raw_topics, descriptors, cfg.centroid_threshold);
  }
  out.show = build_show(files.show_id, out.blocks, out.topics, out.laughs, shots, poses, warnings);
  out.kinematics = kinematics(poses, shots, parse_shot_filter(cfg.shot_filter), cfg.smoothing_window, warnings);
  return out;
}

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; results keep index
/// order. Each task gets its own Warnings, merged in index order.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, int jobs, Fn fn, Warnings* warnings) {
  std::vector<R> out(n);
  std::vector<Warnings> local(n);
  const auto width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t lo = 0; lo < n; lo += width) {
    const std::size_t hi = std::min(n, lo + width);
    if (width == 1) {
      out[lo] = fn(lo, &local[lo]);
      continue;
    }
    std::vector<std::future<R>> tasks;
    for (std::size_t i = lo; i < hi; ++i) tasks.push_back(std::async(std::launch::async, fn, i, &local[i]));
    for (std::size_t i = lo; i < hi; ++i) out[i] = tasks[i - lo].get();
  }
  if (warnings) {
    for (auto& w : local) {
      for (auto& m : w.messages) warnings->add(std::move(m));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Topic evaluation

struct TopicEvalResult {
  TopicModelDiagnostics diagnostics;
  std::optional<CoherenceResult> coherence;
};

/// Diagnostics over every block of the corpus; coherence when descriptors
/// with top words are available, using block tokens as documents.
inline TopicEvalResult evaluate_topics(std::span<const std::vector<TopicAssignment>> per_show,
                                       std::span<const std::vector<TextBlock>> blocks_per_show,
                                       std::span<const TopicDescriptor> descriptors, std::uint64_t seed) {
  std::vector<int> ids;
  std::vector<std::vector<std::string>> docs;
  for (std::size_t s = 0; s < per_show.size(); ++s) {
    for (const auto& a : per_show[s]) ids.push_back(a.topic_id);
    for (const auto& b : blocks_per_show[s]) docs.push_back(b.tokens);
  }
  TopicEvalResult r;
  r.diagnostics = diagnostics_from_topics(ids);
  bool have_words = false;
  for (const auto& d : descriptors) have_words = have_words || !d.top_words.empty();
  if (have_words && !docs.empty()) {
    NpmiOptions opt;
    opt.seed = seed;
    r.coherence = npmi_coherence_detail(descriptors, docs, opt);
    r.diagnostics = with_coherence(r.diagnostics, r.coherence->C_npmi);
  }
  return r;
}

inline Json topic_eval_json(const TopicEvalResult& r) {
  Json j = Json::object();
  j["diagnostics"] = to_json(r.diagnostics);
  if (r.coherence) {
    Json per = Json::object();
    for (const auto& [k, v] : r.coherence->per_topic) per[std::to_string(k)] = v;
    j["coherence_per_topic"] = std::move(per);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Analysis outputs

struct AnalysisTables {
  std::string topic_profiles_csv;
  std::string correlations_csv;
  std::string clustermap_csv;
};

inline AnalysisTables analyze(std::span<const ShowTimeline> shows, std::span<const std::vector<KinematicSample>> kin,
                              Warnings* warnings) {
  const auto profiles = topic_profiles(shows, kin);
  AnalysisTables t;

  std::vector<std::string> header = {"topic_id",     "n_blocks", "mean_laughter_rate", "has_laughter_rate",
                                     "belly_rate",   "events_per_10s", "mean_E", "mean_A", "mean_theta"};
  for (auto name : kShotLabelNames) header.push_back("prop_" + std::string(name));
  t.topic_profiles_csv = csv_row(header);
  for (const auto& p : profiles) {
    std::vector<std::string> row = {std::to_string(p.topic_id),         std::to_string(p.n_blocks),
                                    format_double(p.mean_laughter_rate), format_double(p.has_laughter_rate),
                                    format_double(p.belly_rate),         format_double(p.events_per_10s),
                                    format_optional(p.mean_E),           format_optional(p.mean_A),
                                    format_optional(p.mean_theta)};
    for (double v : p.shot_proportions) row.push_back(format_double(v));
    t.topic_profiles_csv += csv_row(row);
  }

  const auto matrix = feature_matrix(profiles);
  t.correlations_csv = csv_row({"feature", "r", "N"});
  if (profiles.size() >= 3) {
    for (const auto& c : correlations(matrix)) {
      t.correlations_csv += csv_row({c.feature, format_optional(c.r), std::to_string(c.n)});
    }
  } else if (warnings) {
    warnings->add("analysis: fewer than 3 topics; correlations left empty");
  }

  std::vector<std::string> ch = {"topic", "order"};
  ch.insert(ch.end(), matrix.col_labels.begin(), matrix.col_labels.end());
  t.clustermap_csv = csv_row(ch);
  if (!profiles.empty()) {
    auto z = zscore_rows(matrix, warnings);
    // Missing modalities sit at the row mean for clustering only.
    auto filled = z;
    for (auto& row : filled.values) {
      for (double& v : row) {
        if (std::isnan(v)) v = 0.0;
      }
    }
    const auto order = profiles.size() >= 2 ? cluster_order(filled) : std::vector<std::size_t>{0};
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const auto r = order[pos];
      std::vector<std::string> row = {z.row_labels[r], std::to_string(pos)};
      for (double v : z.values[r]) row.push_back(format_double(v));
      t.clustermap_csv += csv_row(row);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Onset benchmark outputs

struct OnsetArtifacts {
  onset::AblationResult result;
  std::string ablation_csv;
  std::string split_json;
  std::string model_json;
};

inline std::string ablation_csv(const onset::AblationResult& r) {
  std::string out = csv_row({"feature_set", "auroc", "auprc", "f1", "precision", "recall", "threshold",
                             "positive_rate", "n_train", "n_val", "n_test"});
  for (const auto& row : r.rows) {
    const auto& m = row.metrics;
    out += csv_row({onset::table_name(row.set), format_double(m.auroc), format_double(m.auprc), format_double(m.f1),
                    format_double(m.precision), format_double(m.recall), format_double(m.threshold),
                    format_double(m.positive_rate), std::to_string(row.n_train), std::to_string(row.n_val),
                    std::to_string(row.n_test)});
  }
  return out;
}

/// Onset features use unsmoothed kinematics so no window looks ahead of t.
inline std::vector<KinematicSample> onset_kinematics(const ShowTimeline& show, const std::set<ShotLabel>& allowed,
                                                     Warnings* warnings) {
  const auto poses = all_pose_frames(show);
  const auto shots = all_shot_frames(show);
  return kinematics(poses, shots, allowed, std::nullopt, warnings);
}

inline onset::BenchConfig bench_config(const PipelineConfig& cfg) {
  onset::BenchConfig b;
  b.step = cfg.step;
  b.delta = cfg.delta;
  b.window = cfg.history_window;
  b.ratios = cfg.split_ratios;
  b.seed = cfg.seed;
  b.classifier.kind = onset::parse_classifier_kind(cfg.classifier);
  b.jobs = cfg.jobs;
  return b;
}

inline OnsetArtifacts run_onset(std::span<const ShowTimeline> shows, const PipelineConfig& cfg, Warnings* warnings) {
  const auto allowed = parse_shot_filter(cfg.shot_filter);
  std::vector<std::vector<KinematicSample>> kin;
  for (const auto& s : shows) kin.push_back(onset_kinematics(s, allowed, warnings));
  std::vector<onset::BenchShow> inputs;
  for (std::size_t i = 0; i < shows.size(); ++i) inputs.push_back(onset::BenchShow{&shows[i], kin[i]});
  const auto bcfg = bench_config(cfg);
  const auto model_set = onset::parse_feature_set(cfg.feature_set);

  OnsetArtifacts a;
  a.result = onset::run_ablation(inputs, onset::kAllFeatureSets, bcfg, model_set, warnings);
  a.ablation_csv = ablation_csv(a.result);
  Json split = onset::split_to_json(a.result.split, cfg.split_ratios, cfg.seed);
  split["n_anchors"] = a.result.n_anchors;
  split["positive_rate"] = a.result.positive_rate;
  split["pca_components"] = a.result.pca_components;
  a.split_json = split.dump(1) + "\n";
  Json model = onset::to_json(*a.result.model, a.result.model_features);
  model["feature_set"] = onset::cli_name(a.result.model_set);
  a.model_json = model.dump() + "\n";
  return a;
}

/// Unified show JSONs (`*.json`) in a directory, sorted by show id.
inline std::vector<ShowTimeline> load_unified_dir(const fs::path& dir, Warnings* warnings) {
  if (!fs::is_directory(dir)) throw InputError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ShowTimeline> shows;
  for (const auto& f : files) {
    try {
      shows.push_back(deserialize_show(read_file(f), warnings));
    } catch (const InputError& e) {
      throw InputError(f.string() + ": " + e.what());
    }
  }
  if (shows.empty()) throw InputError(dir.string() + ": no unified show JSON files");
  std::sort(shows.begin(), shows.end(), [](const auto& a, const auto& b) { return a.show_id < b.show_id; });
  return shows;
}

// ---------------------------------------------------------------------------
// Synthetic corpus on disk

inline void write_synthetic_corpus(const fs::path& dir, const synth::Config& cfg, bool vtt_for_odd = true) {
  const auto shows = synth::generate_corpus(cfg);
  for (std::size_t i = 0; i < shows.size(); ++i) {
    const auto& s = shows[i];
    const fs::path d = dir / s.show_id;
    if (vtt_for_odd && i % 2 == 1) {
      write_file_atomic(d / "subtitles.vtt", write_vtt(s.cues));
    } else {
      write_file_atomic(d / "subtitles.srt", write_srt(s.cues));
    }
    write_file_atomic(d / "laughter.jsonl", write_jsonl(s.windows));
    write_file_atomic(d / "shots.jsonl", write_jsonl(s.shots));
    write_file_atomic(d / "poses.jsonl", write_jsonl(s.poses));
    std::vector<TopicAssignment> topics;
    for (std::size_t b = 0; b < s.blocks.size(); ++b) {
      topics.push_back(TopicAssignment{static_cast<int>(b), s.block_topics[b], s.block_embeddings[b]});
    }
    write_file_atomic(d / "topics.jsonl", write_jsonl(topics));
  }
  Json desc = Json::array();
  for (const auto& d : synth::descriptors(cfg)) desc.push_back(to_json(d));
  write_file_atomic(dir / "descriptors.json", desc.dump(1) + "\n");
}

}  // namespace mmalign::pipeline
