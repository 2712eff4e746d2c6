#pragma once

// File helpers, number formatting, CSV and JSON-lines converters for the
// intermediate artifacts, and the key=value pipeline configuration.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/onset/split.hpp"
#include "mmalign/show_json.hpp"
#include "mmalign/subtitles.hpp"
#include "mmalign/topic_eval.hpp"

namespace mmalign {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary sibling and renames it into place.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(tmp.string() + ": cannot write");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Numbers

/// Shortest representation that reads back to the same double; "nan" for
/// NaN.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorKind::internal, "number formatting failed");
  return {buf, end};
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

/// CSV field, quoted when needed.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

// ---------------------------------------------------------------------------
// JSON-lines records

inline Json to_json(const TextBlock& b) {
  Json j = Json::object();
  j["start"] = b.span.start();
  j["end"] = b.span.end();
  j["text"] = b.text;
  j["tokens"] = b.tokens;
  return j;
}

inline TextBlock text_block_from_json(const Json& j, const std::string& path, Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  TextBlock b;
  b.span = detail::read_span(r, path);
  b.text = r.string("text");
  if (auto t = r.optional("tokens")) {
    if (!t->is_array()) throw InputError(path + ".tokens: expected array");
    for (const auto& w : *t) {
      if (!w.is_string()) throw InputError(path + ".tokens: expected strings");
      b.tokens.push_back(w.get<std::string>());
    }
  } else {
    b.tokens = tokenize(b.text);
  }
  r.finish();
  return b;
}

inline Json to_json(const LaughWindow& w) {
  Json j = Json::object();
  j["start"] = w.start;
  j["stride"] = w.stride;
  j["label"] = std::string(to_string(w.label));
  j["probability"] = w.probability;
  return j;
}

/// Laughter input is either window scores or already merged events; returns
/// events. Window records are recognised by a "stride" field.
inline std::vector<LaughterEvent> laughter_from_jsonl(std::string_view text, const std::string& source,
                                                      double threshold, Warnings* warnings = nullptr) {
  const auto records = parse_jsonl(text, source);
  std::vector<LaughWindow> windows;
  std::vector<LaughterEvent> events;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& j = records[i];
    const std::string path = source + ":" + std::to_string(i + 1);
    if (j.is_object() && j.contains("stride")) {
      detail::FieldReader r(j, path, warnings);
      LaughWindow w;
      w.start = r.number("start");
      w.stride = r.number("stride");
      const auto label = r.string("label");
      const auto t = parse_laugh_type(label);
      if (!t) throw InputError(path + ".label: unknown laughter type '" + label + "'");
      w.label = *t;
      w.probability = r.unit_interval("probability");
      r.finish();
      if (!(w.stride > 0.0)) throw InputError(path + ".stride: must be > 0");
      windows.push_back(w);
    } else {
      events.push_back(laugh_event_from_json(j, path, warnings));
    }
  }
  if (!windows.empty() && !events.empty()) throw InputError(source + ": mixes window scores and merged events");
  if (!windows.empty()) return merge_windows(windows, threshold);
  std::stable_sort(events.begin(), events.end(),
                   [](const LaughterEvent& a, const LaughterEvent& b) { return a.span.start() < b.span.start(); });
  return events;
}

inline Json to_json(const KinematicSample& s) {
  Json j = Json::object();
  j["time"] = s.time;
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  j["arm_spread"] = opt(s.arm_spread);
  j["kinetic_energy"] = opt(s.kinetic_energy);
  j["trunk_lean"] = opt(s.trunk_lean);
  return j;
}

inline KinematicSample kinematic_sample_from_json(const Json& j, const std::string& path, Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  KinematicSample s;
  s.time = r.number("time");
  auto opt = [&](const char* key) -> std::optional<double> {
    auto v = r.optional(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number()) throw InputError(path + "." + key + ": expected number or null");
    return v->get<double>();
  };
  s.arm_spread = opt("arm_spread");
  s.kinetic_energy = opt("kinetic_energy");
  s.trunk_lean = opt("trunk_lean");
  s.detected = s.arm_spread || s.kinetic_energy || s.trunk_lean;
  r.finish();
  return s;
}

inline Json to_json(const TopicAssignment& a) {
  Json j = Json::object();
  j["block_index"] = a.block_index;
  j["topic_id"] = a.topic_id;
  j["embedding"] = a.embedding;
  return j;
}

inline TopicAssignment topic_assignment_from_json(const Json& j, const std::string& path,
                                                  Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  TopicAssignment a;
  a.block_index = static_cast<int>(r.integer("block_index"));
  a.topic_id = static_cast<int>(r.integer("topic_id"));
  if (a.topic_id < kOutlierTopic) throw InputError(path + ".topic_id: must be >= -1");
  if (auto e = r.optional("embedding")) {
    if (!e->is_array()) throw InputError(path + ".embedding: expected array");
    for (const auto& v : *e) {
      if (!v.is_number()) throw InputError(path + ".embedding: expected numbers");
      a.embedding.push_back(v.get<double>());
    }
  }
  // Extra per-block fields (show_id, tokens, text) are allowed.
  r.optional("show_id");
  r.optional("tokens");
  r.optional("text");
  r.finish();
  return a;
}

inline Json to_json(const TopicDescriptor& d) {
  Json j = Json::object();
  j["topic_id"] = d.topic_id;
  j["top_words"] = d.top_words;
  if (!d.centroid.empty()) j["centroid"] = d.centroid;
  return j;
}

inline std::vector<TopicDescriptor> descriptors_from_json(const Json& doc, const std::string& source,
                                                          Warnings* warnings = nullptr) {
  if (!doc.is_array()) throw InputError(source + ": expected an array of topic descriptors");
  std::vector<TopicDescriptor> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = source + "[" + std::to_string(i) + "]";
    detail::FieldReader r(doc[i], path, warnings);
    TopicDescriptor d;
    d.topic_id = static_cast<int>(r.integer("topic_id"));
    for (const auto& w : r.array("top_words")) {
      if (!w.is_string()) throw InputError(path + ".top_words: expected strings");
      d.top_words.push_back(w.get<std::string>());
    }
    if (auto c = r.optional("centroid")) {
      if (!c->is_null()) {
        if (!c->is_array()) throw InputError(path + ".centroid: expected array");
        for (const auto& v : *c) {
          if (!v.is_number()) throw InputError(path + ".centroid: expected numbers");
          d.centroid.push_back(v.get<double>());
        }
      }
    }
    r.finish();
    out.push_back(std::move(d));
  }
  return out;
}

inline Json to_json(const TopicModelDiagnostics& d) {
  Json j = Json::object();
  j["K"] = d.K;
  j["s_max"] = d.s_max;
  j["H_norm"] = d.H_norm;
  j["C_npmi"] = d.C_npmi ? Json(*d.C_npmi) : Json(nullptr);
  j["S"] = d.S ? Json(*d.S) : Json(nullptr);
  j["valid"] = d.valid;
  Json counts = Json::object();
  for (const auto& [k, n] : d.counts) counts[std::to_string(k)] = n;
  j["counts"] = std::move(counts);
  return j;
}

// ---------------------------------------------------------------------------
// Configuration

struct PipelineConfig {
  double target_duration = 60.0;
  double smoothing_window = kDefaultSmoothingWindow;
  double laugh_threshold = kDefaultLaughThreshold;
  double centroid_threshold = kDefaultCentroidThreshold;
  double delta = 2.0;
  double step = 1.0;
  double history_window = 10.0;
  onset::SplitRatios split_ratios = onset::kDefaultSplitRatios;
  std::uint64_t seed = 0;
  std::vector<std::string> shot_filter = {"full_shot", "medium_long_shot"};
  /// Built-in list names or file paths; the default is their union.
  std::vector<std::string> stopword_files = {"english", "fillers-v1"};
  std::string classifier = "gbdt";
  std::string feature_set = "all";
  int jobs = 1;

  void validate() const {
    for (double d : {target_duration, smoothing_window, delta, step, history_window}) {
      if (!(d > 0.0)) throw InputError("config: durations must be > 0");
    }
    const double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("config: split_ratios must sum to 1");
    if (jobs < 1) throw InputError("config: jobs must be >= 1");
  }
};

namespace detail {

inline double parse_number(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw InputError("config: " + std::string(key) + ": not a number: '" + std::string(v) + "'");
  }
  return out;
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= v.size()) {
    const auto comma = v.find(',', i);
    auto item = trim(v.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    i = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Applies one key=value setting. Unknown keys are input errors.
inline void apply_setting(PipelineConfig& c, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (k == "target_duration") {
    c.target_duration = detail::parse_number(key, value);
  } else if (k == "smoothing_window") {
    c.smoothing_window = detail::parse_number(key, value);
  } else if (k == "laugh_threshold") {
    c.laugh_threshold = detail::parse_number(key, value);
  } else if (k == "centroid_threshold") {
    c.centroid_threshold = detail::parse_number(key, value);
  } else if (k == "delta") {
    c.delta = detail::parse_number(key, value);
  } else if (k == "step") {
    c.step = detail::parse_number(key, value);
  } else if (k == "history_window") {
    c.history_window = detail::parse_number(key, value);
  } else if (k == "split_ratios") {
    const auto parts = detail::split_list(value);
    if (parts.size() != 3) throw InputError("config: split_ratios needs three comma-separated values");
    for (std::size_t i = 0; i < 3; ++i) c.split_ratios[i] = detail::parse_number(key, parts[i]);
  } else if (k == "seed") {
    std::uint64_t s = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
    if (ec != std::errc{} || p != value.data() + value.size()) throw InputError("config: seed: not an integer");
    c.seed = s;
  } else if (k == "shot_filter") {
    c.shot_filter = detail::split_list(value);
  } else if (k == "stopwords") {
    c.stopword_files = detail::split_list(value);
  } else if (k == "classifier") {
    c.classifier = std::string(value);
  } else if (k == "feature_set") {
    c.feature_set = std::string(value);
  } else if (k == "jobs") {
    const double j = detail::parse_number(key, value);
    if (j != std::floor(j) || j < 1.0 || j > 1024.0) throw InputError("config: jobs: expected an integer in 1..1024");
    c.jobs = static_cast<int>(j);
  } else {
    throw InputError("config: unknown key '" + k + "'");
  }
}

/// `key = value` lines; '#' starts a comment.
inline PipelineConfig parse_config(std::string_view text, const PipelineConfig& base = {}) {
  PipelineConfig c = base;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return c;
}

}  // namespace mmalign
