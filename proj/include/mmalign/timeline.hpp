#pragma once

// Shared temporal data model and hierarchical containment alignment.
//
// Every stream keeps its native timestamps. Topic blocks are the anchor
// level; a nested item with timestamp t lands in block [start, end) iff
// start <= t < end. Items outside every block are kept in an overflow list
// so per-show totals are conserved.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmalign/error.hpp"

namespace mmalign {

/// Half-open time interval [start, end) in seconds.
class TimedSpan {
 public:
  TimedSpan(double start, double end) : start_(start), end_(end) {
    if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0 || !(start < end)) {
      throw InvariantError("invalid span [" + std::to_string(start) + ", " + std::to_string(end) + ")");
    }
  }

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  double duration() const noexcept { return end_ - start_; }
  bool contains(double t) const noexcept { return start_ <= t && t < end_; }

  /// Length of the intersection with [lo, hi).
  double overlap(double lo, double hi) const noexcept {
    return std::max(0.0, std::min(end_, hi) - std::max(start_, lo));
  }

  friend bool operator==(const TimedSpan&, const TimedSpan&) = default;

 private:
  double start_;
  double end_;
};

// ---------------------------------------------------------------------------
// Laughter

enum class LaughType { laughter, belly_laugh, giggle, chuckle, snicker, baby_laughter, other };

inline constexpr std::array<std::string_view, 7> kLaughTypeNames = {
    "laughter", "belly_laugh", "giggle", "chuckle", "snicker", "baby_laughter", "other"};

inline std::string_view to_string(LaughType t) { return kLaughTypeNames[static_cast<std::size_t>(t)]; }

inline std::optional<LaughType> parse_laugh_type(std::string_view s) {
  for (std::size_t i = 0; i < kLaughTypeNames.size(); ++i) {
    if (kLaughTypeNames[i] == s) return static_cast<LaughType>(i);
  }
  return std::nullopt;
}

struct LaughterEvent {
  TimedSpan span;
  LaughType type = LaughType::laughter;
  double confidence = 0.0;

  friend bool operator==(const LaughterEvent&, const LaughterEvent&) = default;
};

// ---------------------------------------------------------------------------
// Shots

enum class ShotLabel { full_shot, medium_close_up, medium_long_shot, medium_shot, other_angles, other };

inline constexpr std::size_t kShotClassCount = 6;
inline constexpr std::array<std::string_view, kShotClassCount> kShotLabelNames = {
    "full_shot", "medium_close_up", "medium_long_shot", "medium_shot", "other_angles", "other"};

inline std::string_view to_string(ShotLabel s) { return kShotLabelNames[static_cast<std::size_t>(s)]; }

inline std::optional<ShotLabel> parse_shot_label(std::string_view s) {
  for (std::size_t i = 0; i < kShotLabelNames.size(); ++i) {
    if (kShotLabelNames[i] == s) return static_cast<ShotLabel>(i);
  }
  return std::nullopt;
}

/// One classified frame. class_id is the upstream classifier's own index and
/// is stored verbatim; it is not derived from the label.
struct ShotFrame {
  double time = 0.0;
  ShotLabel label = ShotLabel::other;
  int class_id = 0;
  double score = 0.0;

  friend bool operator==(const ShotFrame&, const ShotFrame&) = default;
};

// ---------------------------------------------------------------------------
// Pose

inline constexpr std::size_t kJointCount = 17;

/// Corpus joint names in COCO-17 order.
inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "Nez",      "Oeil_1",    "Oeil_2",   "Oreille_1", "Oreille_2", "Epaule_1",
    "Epaule_2", "Coude_1",   "Coude_2",  "Poignet_1", "Poignet_2", "Hanche_1",
    "Hanche_2", "Genou_1",   "Genou_2",  "Cheville_1", "Cheville_2"};

namespace joint {
inline constexpr std::size_t nose = 0;
inline constexpr std::size_t left_shoulder = 5;
inline constexpr std::size_t right_shoulder = 6;
inline constexpr std::size_t left_wrist = 9;
inline constexpr std::size_t right_wrist = 10;
inline constexpr std::size_t left_hip = 11;
inline constexpr std::size_t right_hip = 12;
}  // namespace joint

inline std::optional<std::size_t> joint_index(std::string_view name) {
  for (std::size_t i = 0; i < kJointNames.size(); ++i) {
    if (kJointNames[i] == name) return i;
  }
  return std::nullopt;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  /// (0, 0) is the "not detected" sentinel.
  bool valid() const noexcept { return !(x == 0.0 && y == 0.0); }

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct BoundingBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct PoseFrame {
  double time = 0.0;
  bool has_detection = false;
  BoundingBox bbox;
  std::array<Point2, kJointCount> keypoints{};

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

// ---------------------------------------------------------------------------
// Blocks and shows

inline constexpr std::size_t kEmbeddingDim = 384;

struct TopicBlock {
  int block_id = 0;
  TimedSpan span{0.0, 60.0};
  int topic_id = -1;  // -1 = outlier
  std::string text;
  std::vector<double> embedding;  // empty or kEmbeddingDim, unit norm
  std::vector<LaughterEvent> laugh_events;
  std::vector<PoseFrame> pose_keypoints;
  std::vector<ShotFrame> shot_events;

  friend bool operator==(const TopicBlock&, const TopicBlock&) = default;
};

/// Items that fell outside every block.
struct Overflow {
  std::vector<LaughterEvent> laugh_events;
  std::vector<PoseFrame> pose_keypoints;
  std::vector<ShotFrame> shot_events;

  bool empty() const noexcept {
    return laugh_events.empty() && pose_keypoints.empty() && shot_events.empty();
  }
  friend bool operator==(const Overflow&, const Overflow&) = default;
};

struct ShowTimeline {
  std::string show_id;
  std::vector<std::string> keypoint_joints{kJointNames.begin(), kJointNames.end()};
  std::vector<TopicBlock> timeline;
  Overflow overflow;

  std::size_t n_blocks() const noexcept { return timeline.size(); }

  std::size_t embedding_dim() const noexcept {
    for (const auto& b : timeline) {
      if (!b.embedding.empty()) return b.embedding.size();
    }
    return 0;
  }

  /// End of the last block, or 0 for an empty show.
  double end_time() const noexcept { return timeline.empty() ? 0.0 : timeline.back().span.end(); }

  friend bool operator==(const ShowTimeline&, const ShowTimeline&) = default;
};

// ---------------------------------------------------------------------------
// Timestamp selectors

/// Laughter events are placed by onset.
inline double timestamp_of(const LaughterEvent& e) noexcept { return e.span.start(); }
inline double timestamp_of(const ShotFrame& s) noexcept { return s.time; }
inline double timestamp_of(const PoseFrame& p) noexcept { return p.time; }

struct DefaultTimestamp {
  template <class T>
  double operator()(const T& item) const noexcept {
    return timestamp_of(item);
  }
};

/// Sorted, non-overlapping check; throws InvariantError on violation.
inline void check_block_spans(std::span<const TimedSpan> blocks) {
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].start() < blocks[i - 1].start()) {
      throw InvariantError("blocks not sorted by start at index " + std::to_string(i));
    }
    if (blocks[i].start() < blocks[i - 1].end()) {
      throw InvariantError("blocks " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
    }
  }
}

template <class Event>
struct Containment {
  std::vector<std::vector<Event>> per_block;
  std::vector<Event> overflow;
};

/// Places each event in the unique block whose [start, end) contains its
/// timestamp. Output lists are stably sorted by timestamp, so the result does
/// not depend on input order.
template <class Event, class TimeOf = DefaultTimestamp>
Containment<Event> assign_by_containment(std::span<const Event> events, std::span<const TimedSpan> blocks,
                                         TimeOf time_of = {}) {
  check_block_spans(blocks);
  Containment<Event> out;
  out.per_block.resize(blocks.size());

  for (const Event& e : events) {
    const double t = time_of(e);
    // First block starting after t; the candidate is the one before it.
    auto it = std::upper_bound(blocks.begin(), blocks.end(), t,
                               [](double v, const TimedSpan& b) { return v < b.start(); });
    if (it != blocks.begin()) {
      const auto j = static_cast<std::size_t>(std::distance(blocks.begin(), it) - 1);
      if (blocks[j].contains(t)) {
        out.per_block[j].push_back(e);
        continue;
      }
    }
    out.overflow.push_back(e);
  }

  auto by_time = [&](const Event& a, const Event& b) { return time_of(a) < time_of(b); };
  for (auto& list : out.per_block) std::stable_sort(list.begin(), list.end(), by_time);
  std::stable_sort(out.overflow.begin(), out.overflow.end(), by_time);
  return out;
}

inline std::vector<TimedSpan> block_spans(std::span<const TopicBlock> blocks) {
  std::vector<TimedSpan> spans;
  spans.reserve(blocks.size());
  for (const auto& b : blocks) spans.push_back(b.span);
  return spans;
}

/// Builds a unified show from anchor blocks (nested lists are replaced) and
/// the three event streams.
inline ShowTimeline align_show(std::string show_id, std::vector<TopicBlock> blocks,
                               std::span<const LaughterEvent> laughs, std::span<const ShotFrame> shots,
                               std::span<const PoseFrame> poses) {
  const auto spans = block_spans(blocks);
  auto laugh_fit = assign_by_containment(laughs, std::span<const TimedSpan>(spans));
  auto shot_fit = assign_by_containment(shots, std::span<const TimedSpan>(spans));
  auto pose_fit = assign_by_containment(poses, std::span<const TimedSpan>(spans));

  ShowTimeline show;
  show.show_id = std::move(show_id);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    blocks[j].laugh_events = std::move(laugh_fit.per_block[j]);
    blocks[j].shot_events = std::move(shot_fit.per_block[j]);
    blocks[j].pose_keypoints = std::move(pose_fit.per_block[j]);
  }
  show.timeline = std::move(blocks);
  show.overflow.laugh_events = std::move(laugh_fit.overflow);
  show.overflow.shot_events = std::move(shot_fit.overflow);
  show.overflow.pose_keypoints = std::move(pose_fit.overflow);
  return show;
}

namespace detail {
template <class T, class Member>
std::vector<T> gather(const ShowTimeline& show, Member member, const std::vector<T>& overflow) {
  std::vector<T> out;
  for (const auto& b : show.timeline) out.insert(out.end(), (b.*member).begin(), (b.*member).end());
  out.insert(out.end(), overflow.begin(), overflow.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const T& a, const T& b) { return timestamp_of(a) < timestamp_of(b); });
  return out;
}
}  // namespace detail

/// Every laughter event of the show (nested and overflow), sorted by onset.
inline std::vector<LaughterEvent> all_laugh_events(const ShowTimeline& show) {
  return detail::gather(show, &TopicBlock::laugh_events, show.overflow.laugh_events);
}
inline std::vector<ShotFrame> all_shot_frames(const ShowTimeline& show) {
  return detail::gather(show, &TopicBlock::shot_events, show.overflow.shot_events);
}
inline std::vector<PoseFrame> all_pose_frames(const ShowTimeline& show) {
  return detail::gather(show, &TopicBlock::pose_keypoints, show.overflow.pose_keypoints);
}

/// Index of the block containing t, if any.
inline std::optional<std::size_t> block_at(const ShowTimeline& show, double t) {
  const auto& blocks = show.timeline;
  auto it = std::upper_bound(blocks.begin(), blocks.end(), t,
                             [](double v, const TopicBlock& b) { return v < b.span.start(); });
  if (it == blocks.begin()) return std::nullopt;
  const auto j = static_cast<std::size_t>(std::distance(blocks.begin(), it) - 1);
  if (blocks[j].span.contains(t)) return j;
  return std::nullopt;
}

/// Full invariant check of a show; throws InvariantError naming the problem.
inline void validate(const ShowTimeline& show, double unit_tol = 1e-6) {
  check_block_spans(block_spans(show.timeline));
  for (std::size_t j = 0; j < show.timeline.size(); ++j) {
    const auto& b = show.timeline[j];
    const std::string where = "timeline[" + std::to_string(j) + "]";
    if (!b.embedding.empty()) {
      if (b.embedding.size() != kEmbeddingDim) {
        throw InvariantError(where + ".embedding: expected " + std::to_string(kEmbeddingDim) + " values, got " +
                             std::to_string(b.embedding.size()));
      }
      double ss = 0.0;
      for (double v : b.embedding) ss += v * v;
      if (std::abs(std::sqrt(ss) - 1.0) > unit_tol) throw InvariantError(where + ".embedding: not unit norm");
    }
    for (const auto& e : b.laugh_events) {
      if (!b.span.contains(timestamp_of(e))) throw InvariantError(where + ".laugh_events: containment violated");
      if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) throw InvariantError(where + ".laugh_events: confidence");
    }
    for (const auto& s : b.shot_events) {
      if (!b.span.contains(s.time)) throw InvariantError(where + ".shot_events: containment violated");
    }
    for (const auto& p : b.pose_keypoints) {
      if (!b.span.contains(p.time)) throw InvariantError(where + ".pose_keypoints: containment violated");
    }
  }
}

}  // namespace mmalign
