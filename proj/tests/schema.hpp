#pragma once

// Structural check of a unified show document, written against the
// documented output layout rather than the library's reader.

#include <nlohmann/json.hpp>

#include <set>
#include <string>
#include <vector>

namespace schema {

using nlohmann::json;

inline void need(std::vector<std::string>& errs, bool ok, const std::string& what) {
  if (!ok) errs.push_back(what);
}

inline bool has_keys(const json& j, std::initializer_list<const char*> keys) {
  if (!j.is_object()) return false;
  for (const char* k : keys) {
    if (!j.contains(k)) return false;
  }
  return true;
}

inline void check_event_lists(const json& owner, const std::string& where, std::vector<std::string>& errs) {
  static const std::set<std::string> laugh_types = {"laughter", "belly_laugh", "giggle", "chuckle",
                                                    "snicker",  "baby_laughter", "other"};
  static const std::set<std::string> shot_labels = {"full_shot",   "medium_close_up", "medium_long_shot",
                                                    "medium_shot", "other_angles",    "other"};
  for (const auto& e : owner["laugh_events"]) {
    need(errs, has_keys(e, {"start", "end", "type", "confidence"}), where + ": laugh event keys");
    if (!has_keys(e, {"start", "end", "type", "confidence"})) continue;
    need(errs, e["start"].is_number() && e["end"].is_number() && e["start"] < e["end"], where + ": laugh span");
    need(errs, e["type"].is_string() && laugh_types.count(e["type"].get<std::string>()), where + ": laugh type");
    need(errs, e["confidence"].is_number() && e["confidence"] >= 0.0 && e["confidence"] <= 1.0,
         where + ": laugh confidence");
  }
  for (const auto& p : owner["pose_keypoints"]) {
    need(errs, has_keys(p, {"time", "has_detection", "bbox", "keypoints"}), where + ": pose keys");
    if (!has_keys(p, {"time", "has_detection", "bbox", "keypoints"})) continue;
    need(errs, p["time"].is_number() && p["has_detection"].is_boolean(), where + ": pose time/detection");
    need(errs, has_keys(p["bbox"], {"xmin", "ymin", "xmax", "ymax"}), where + ": bbox keys");
    need(errs, p["keypoints"].is_object(), where + ": keypoints object");
    for (const auto& xy : p["keypoints"]) {
      need(errs, xy.is_array() && xy.size() == 2 && xy[0].is_number() && xy[1].is_number(), where + ": keypoint [x, y]");
    }
  }
  for (const auto& s : owner["shot_events"]) {
    need(errs, has_keys(s, {"time", "label", "class_id", "score"}), where + ": shot keys");
    if (!has_keys(s, {"time", "label", "class_id", "score"})) continue;
    need(errs, s["label"].is_string() && shot_labels.count(s["label"].get<std::string>()), where + ": shot label");
    need(errs, s["class_id"].is_number_integer(), where + ": shot class_id");
  }
}

/// Empty when the document conforms; otherwise one message per problem.
inline std::vector<std::string> validate(const json& doc) {
  std::vector<std::string> errs;
  if (!doc.is_object() || doc.size() != 1) return {"root: expected one ID_<show> entry"};
  const std::string key = doc.begin().key();
  const json& body = doc.begin().value();
  need(errs, key.rfind("ID_", 0) == 0, "root key must start with ID_");
  if (!has_keys(body, {"metadata", "timeline"})) return {"show: missing metadata or timeline"};
  const json& m = body["metadata"];
  need(errs, has_keys(m, {"show_id", "n_blocks", "embedding_dim", "keypoint_joints"}), "metadata keys");
  if (!errs.empty()) return errs;
  need(errs, "ID_" + m["show_id"].get<std::string>() == key, "metadata.show_id matches root key");
  need(errs, m["n_blocks"].is_number_integer() && m["n_blocks"] == body["timeline"].size(), "n_blocks");
  need(errs, m["keypoint_joints"].is_array() && m["keypoint_joints"].size() == 17, "17 keypoint joints");
  const auto dim = m["embedding_dim"];
  double prev_end = -1.0;
  for (std::size_t i = 0; i < body["timeline"].size(); ++i) {
    const json& b = body["timeline"][i];
    const std::string where = "timeline[" + std::to_string(i) + "]";
    if (!has_keys(b, {"block_id", "start", "end", "topic_id", "text", "embedding", "laugh_events", "pose_keypoints",
                      "shot_events"})) {
      errs.push_back(where + ": block keys");
      continue;
    }
    need(errs, b["block_id"].is_number_integer() && b["topic_id"].is_number_integer(), where + ": integer ids");
    need(errs, b["topic_id"] >= -1, where + ": topic_id >= -1");
    need(errs, b["start"] < b["end"] && b["start"] >= prev_end, where + ": ordered non-overlapping span");
    prev_end = b["end"].get<double>();
    need(errs, b["text"].is_string(), where + ": text");
    need(errs, b["embedding"].is_array() && (b["embedding"].empty() || b["embedding"].size() == dim),
         where + ": embedding length");
    check_event_lists(b, where, errs);
    for (const auto& e : b["laugh_events"]) {
      if (e.is_object() && e.contains("start")) need(errs, e["start"] >= b["start"] && e["start"] < b["end"], where + ": onset inside block");
    }
  }
  if (body.contains("_overflow")) {
    const json& o = body["_overflow"];
    need(errs, has_keys(o, {"laugh_events", "pose_keypoints", "shot_events"}), "_overflow keys");
    if (errs.empty()) check_event_lists(o, "_overflow", errs);
  }
  return errs;
}

}  // namespace schema
