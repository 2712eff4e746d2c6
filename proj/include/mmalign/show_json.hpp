#pragma once

// Unified per-show JSON and the JSON-lines ingest formats of the nested
// streams. Field order follows the corpus layout:
//
//   {"ID_<show>": {"metadata": {...}, "timeline": [block, ...], "_overflow": {...}}}
//
// "_overflow" is a reserved key holding items outside every block.

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmalign/error.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kOverflowKey = "_overflow";

// ---------------------------------------------------------------------------
// Writers

inline Json to_json(const LaughterEvent& e) {
  return Json{{"start", e.span.start()}, {"end", e.span.end()}, {"type", to_string(e.type)}, {"confidence", e.confidence}};
}

inline Json to_json(const ShotFrame& s) {
  return Json{{"time", s.time}, {"label", to_string(s.label)}, {"class_id", s.class_id}, {"score", s.score}};
}

inline Json to_json(const PoseFrame& p) {
  Json kp = Json::object();
  for (std::size_t j = 0; j < kJointCount; ++j) {
    kp[std::string(kJointNames[j])] = Json::array({p.keypoints[j].x, p.keypoints[j].y});
  }
  return Json{{"time", p.time},
              {"has_detection", p.has_detection},
              {"bbox", {{"xmin", p.bbox.xmin}, {"ymin", p.bbox.ymin}, {"xmax", p.bbox.xmax}, {"ymax", p.bbox.ymax}}},
              {"keypoints", std::move(kp)}};
}

template <class T>
Json to_json_array(const std::vector<T>& items) {
  Json arr = Json::array();
  for (const auto& x : items) arr.push_back(to_json(x));
  return arr;
}

inline Json to_json(const TopicBlock& b) {
  return Json{{"block_id", b.block_id},
              {"start", b.span.start()},
              {"end", b.span.end()},
              {"topic_id", b.topic_id},
              {"text", b.text},
              {"embedding", b.embedding},
              {"laugh_events", to_json_array(b.laugh_events)},
              {"pose_keypoints", to_json_array(b.pose_keypoints)},
              {"shot_events", to_json_array(b.shot_events)}};
}

inline Json to_json(const ShowTimeline& show) {
  Json body;
  body["metadata"] = Json{{"show_id", show.show_id},
                          {"n_blocks", show.n_blocks()},
                          {"embedding_dim", show.embedding_dim()},
                          {"keypoint_joints", show.keypoint_joints}};
  body["timeline"] = to_json_array(show.timeline);
  body[std::string(kOverflowKey)] = Json{{"laugh_events", to_json_array(show.overflow.laugh_events)},
                                         {"pose_keypoints", to_json_array(show.overflow.pose_keypoints)},
                                         {"shot_events", to_json_array(show.overflow.shot_events)}};
  Json root;
  root["ID_" + show.show_id] = std::move(body);
  return root;
}

inline std::string serialize_show(const ShowTimeline& show, int indent = 1) {
  return to_json(show).dump(indent) + "\n";
}

// ---------------------------------------------------------------------------
// Readers

namespace detail {

/// Schema-checked access into a JSON object; errors name the offending path.
class FieldReader {
 public:
  FieldReader(const Json& obj, std::string path, Warnings* warnings) : obj_(obj), path_(std::move(path)), warnings_(warnings) {
    if (!obj_.is_object()) fail(path_, "expected object");
  }

  ~FieldReader() = default;
  FieldReader(const FieldReader&) = delete;
  FieldReader& operator=(const FieldReader&) = delete;

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw InputError(path + ": " + what);
  }

  std::string at(std::string_view key) const { return path_ + "." + std::string(key); }

  const Json& require(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    if (it == obj_.end()) fail(at(key), "missing field");
    return *it;
  }

  const Json* optional(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  double number(std::string_view key) {
    const Json& v = require(key);
    if (!v.is_number()) fail(at(key), "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(at(key), "expected finite number");
    return d;
  }

  double unit_interval(std::string_view key) {
    const double d = number(key);
    if (d < 0.0 || d > 1.0) fail(at(key), "expected number in [0,1]");
    return d;
  }

  long long integer(std::string_view key) {
    const Json& v = require(key);
    if (!v.is_number_integer()) fail(at(key), "expected integer");
    return v.get<long long>();
  }

  bool boolean(std::string_view key) {
    const Json& v = require(key);
    if (!v.is_boolean()) fail(at(key), "expected boolean");
    return v.get<bool>();
  }

  std::string string(std::string_view key) {
    const Json& v = require(key);
    if (!v.is_string()) fail(at(key), "expected string");
    return v.get<std::string>();
  }

  const Json& array(std::string_view key) {
    const Json& v = require(key);
    if (!v.is_array()) fail(at(key), "expected array");
    return v;
  }

  /// Reports every field that was never asked for.
  void finish() {
    if (!warnings_) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) warnings_->add(path_ + "." + it.key() + ": unknown field ignored");
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  Warnings* warnings_;
  std::set<std::string> seen_;
};

inline TimedSpan read_span(FieldReader& r, const std::string& path) {
  const double start = r.number("start");
  const double end = r.number("end");
  if (start < 0.0 || !(start < end)) FieldReader::fail(path, "expected 0 <= start < end");
  return TimedSpan(start, end);
}

}  // namespace detail

inline LaughterEvent laugh_event_from_json(const Json& j, const std::string& path, Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  const TimedSpan span = detail::read_span(r, path);
  const std::string type = r.string("type");
  const auto parsed = parse_laugh_type(type);
  if (!parsed) detail::FieldReader::fail(r.at("type"), "unknown laughter type '" + type + "'");
  LaughterEvent e{span, *parsed, r.unit_interval("confidence")};
  r.finish();
  return e;
}

inline ShotFrame shot_frame_from_json(const Json& j, const std::string& path, Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  ShotFrame s;
  s.time = r.number("time");
  const std::string label = r.string("label");
  const auto parsed = parse_shot_label(label);
  if (!parsed) detail::FieldReader::fail(r.at("label"), "unknown shot label '" + label + "'");
  s.label = *parsed;
  const long long cid = r.integer("class_id");
  if (cid < 0 || cid >= static_cast<long long>(kShotClassCount)) {
    detail::FieldReader::fail(r.at("class_id"), "expected integer in 0..5");
  }
  s.class_id = static_cast<int>(cid);
  s.score = r.unit_interval("score");
  r.finish();
  return s;
}

/// Joints absent from the keypoints object read as the invalid (0,0) sentinel.
inline PoseFrame pose_frame_from_json(const Json& j, const std::string& path, Warnings* warnings = nullptr) {
  detail::FieldReader r(j, path, warnings);
  PoseFrame p;
  p.time = r.number("time");
  p.has_detection = r.boolean("has_detection");
  {
    const std::string bpath = r.at("bbox");
    detail::FieldReader b(r.require("bbox"), bpath, warnings);
    p.bbox = BoundingBox{b.number("xmin"), b.number("ymin"), b.number("xmax"), b.number("ymax")};
    b.finish();
  }
  const std::string kpath = r.at("keypoints");
  const Json& kp = r.require("keypoints");
  if (!kp.is_object()) detail::FieldReader::fail(kpath, "expected object");
  for (auto it = kp.begin(); it != kp.end(); ++it) {
    const auto idx = joint_index(it.key());
    if (!idx) {
      if (warnings) warnings->add(kpath + "." + it.key() + ": unknown joint ignored");
      continue;
    }
    const Json& xy = it.value();
    if (!xy.is_array() || xy.size() != 2 || !xy[0].is_number() || !xy[1].is_number()) {
      detail::FieldReader::fail(kpath + "." + it.key(), "expected [x, y]");
    }
    p.keypoints[*idx] = Point2{xy[0].get<double>(), xy[1].get<double>()};
  }
  r.finish();
  return p;
}

namespace detail {

template <class T, class Fn>
std::vector<T> read_list(FieldReader& r, std::string_view key, Fn fn, Warnings* warnings) {
  const Json& arr = r.array(key);
  std::vector<T> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(fn(arr[i], r.at(key) + "[" + std::to_string(i) + "]", warnings));
  }
  return out;
}

inline TopicBlock block_from_json(const Json& j, const std::string& path, Warnings* warnings) {
  FieldReader r(j, path, warnings);
  TopicBlock b;
  b.block_id = static_cast<int>(r.integer("block_id"));
  b.span = read_span(r, path);
  b.topic_id = static_cast<int>(r.integer("topic_id"));
  if (b.topic_id < -1) FieldReader::fail(r.at("topic_id"), "expected -1 or a non-negative topic id");
  b.text = r.string("text");
  const Json& emb = r.array("embedding");
  b.embedding.reserve(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (!emb[i].is_number()) FieldReader::fail(r.at("embedding") + "[" + std::to_string(i) + "]", "expected number");
    b.embedding.push_back(emb[i].get<double>());
  }
  if (!b.embedding.empty()) {
    if (b.embedding.size() != kEmbeddingDim) {
      FieldReader::fail(r.at("embedding"), "expected " + std::to_string(kEmbeddingDim) + " values");
    }
    double ss = 0.0;
    for (double v : b.embedding) ss += v * v;
    if (std::abs(std::sqrt(ss) - 1.0) > 1e-6) FieldReader::fail(r.at("embedding"), "expected unit L2 norm");
  }
  b.laugh_events = read_list<LaughterEvent>(r, "laugh_events", laugh_event_from_json, warnings);
  b.pose_keypoints = read_list<PoseFrame>(r, "pose_keypoints", pose_frame_from_json, warnings);
  b.shot_events = read_list<ShotFrame>(r, "shot_events", shot_frame_from_json, warnings);
  r.finish();

  for (std::size_t i = 0; i < b.laugh_events.size(); ++i) {
    if (!b.span.contains(timestamp_of(b.laugh_events[i]))) {
      FieldReader::fail(path + ".laugh_events[" + std::to_string(i) + "]", "onset outside block span");
    }
  }
  for (std::size_t i = 0; i < b.pose_keypoints.size(); ++i) {
    if (!b.span.contains(b.pose_keypoints[i].time)) {
      FieldReader::fail(path + ".pose_keypoints[" + std::to_string(i) + "]", "time outside block span");
    }
  }
  for (std::size_t i = 0; i < b.shot_events.size(); ++i) {
    if (!b.span.contains(b.shot_events[i].time)) {
      FieldReader::fail(path + ".shot_events[" + std::to_string(i) + "]", "time outside block span");
    }
  }
  return b;
}

}  // namespace detail

/// Parses a unified show document, accepting either the {"ID_x": {...}}
/// wrapper or the bare show object. Throws InputError naming the offending
/// path on any schema violation.
inline ShowTimeline show_from_json(const Json& doc, Warnings* warnings = nullptr) {
  if (!doc.is_object()) throw InputError("$: expected object");
  const Json* body = &doc;
  std::string path = "$";
  if (!doc.contains("metadata")) {
    if (doc.size() != 1) throw InputError("$: expected a single show entry");
    body = &doc.begin().value();
    path = "$." + doc.begin().key();
  }

  detail::FieldReader r(*body, path, warnings);
  ShowTimeline show;
  std::size_t n_blocks = 0;
  std::size_t embedding_dim = 0;
  {
    const std::string mpath = r.at("metadata");
    detail::FieldReader m(r.require("metadata"), mpath, warnings);
    show.show_id = m.string("show_id");
    const long long nb = m.integer("n_blocks");
    const long long ed = m.integer("embedding_dim");
    if (nb < 0) detail::FieldReader::fail(m.at("n_blocks"), "expected non-negative integer");
    if (ed < 0) detail::FieldReader::fail(m.at("embedding_dim"), "expected non-negative integer");
    n_blocks = static_cast<std::size_t>(nb);
    embedding_dim = static_cast<std::size_t>(ed);
    const Json& joints = m.array("keypoint_joints");
    show.keypoint_joints.clear();
    for (const auto& name : joints) {
      if (!name.is_string()) detail::FieldReader::fail(m.at("keypoint_joints"), "expected strings");
      show.keypoint_joints.push_back(name.get<std::string>());
    }
    if (show.keypoint_joints != std::vector<std::string>(kJointNames.begin(), kJointNames.end())) {
      detail::FieldReader::fail(m.at("keypoint_joints"), "expected the 17 corpus joint names in COCO order");
    }
    m.finish();
  }
  show.timeline = detail::read_list<TopicBlock>(r, "timeline", detail::block_from_json, warnings);
  if (show.timeline.size() != n_blocks) {
    detail::FieldReader::fail(path + ".metadata.n_blocks", "does not match timeline length " +
                                                               std::to_string(show.timeline.size()));
  }
  if (show.embedding_dim() != 0 && embedding_dim != show.embedding_dim()) {
    detail::FieldReader::fail(path + ".metadata.embedding_dim", "does not match block embeddings");
  }
  if (const Json* ov = r.optional(kOverflowKey)) {
    detail::FieldReader o(*ov, r.at(kOverflowKey), warnings);
    show.overflow.laugh_events = detail::read_list<LaughterEvent>(o, "laugh_events", laugh_event_from_json, warnings);
    show.overflow.pose_keypoints = detail::read_list<PoseFrame>(o, "pose_keypoints", pose_frame_from_json, warnings);
    show.overflow.shot_events = detail::read_list<ShotFrame>(o, "shot_events", shot_frame_from_json, warnings);
    o.finish();
  }
  r.finish();

  try {
    check_block_spans(block_spans(show.timeline));
  } catch (const InvariantError& e) {
    throw InputError(path + ".timeline: " + e.what());
  }
  return show;
}

inline ShowTimeline deserialize_show(std::string_view bytes, Warnings* warnings = nullptr) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  return show_from_json(doc, warnings);
}

// ---------------------------------------------------------------------------
// JSON-lines

/// Parses one JSON value per non-blank line. Errors carry the line number.
inline std::vector<Json> parse_jsonl(std::string_view text, std::string_view source = "<input>") {
  std::vector<Json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(Json::parse(line.begin(), line.end()));
      } catch (const Json::parse_error& e) {
        throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

template <class T, class Fn>
std::vector<T> read_jsonl_records(std::string_view text, std::string_view source, Fn parse_one,
                                  Warnings* warnings = nullptr) {
  std::vector<T> out;
  const auto rows = parse_jsonl(text, source);
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(parse_one(rows[i], std::string(source) + "[" + std::to_string(i) + "]", warnings));
  }
  return out;
}

template <class T>
std::string write_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& x : items) {
    out += to_json(x).dump();
    out += '\n';
  }
  return out;
}

}  // namespace mmalign
