#pragma once

// Kinematic signals from raw keypoints: arm spread, kinetic energy and trunk
// lean, plus the centered sliding-window smoother.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign {

struct KinematicSample {
  double time = 0.0;
  bool detected = false;
  std::optional<double> arm_spread;
  std::optional<double> kinetic_energy;
  std::optional<double> trunk_lean;  // degrees

  friend bool operator==(const KinematicSample&, const KinematicSample&) = default;
};

/// Guard on shoulder distance and torso height, in pixels.
inline constexpr double kGeometryEpsilon = 1e-6;
/// Longest gap for which two detected frames count as consecutive.
inline constexpr double kMaxPairGap = 2.0;
inline constexpr double kDefaultSmoothingWindow = 30.0;

inline std::optional<double> arm_spread(const PoseFrame& f) {
  if (!f.has_detection) return std::nullopt;
  const auto& k = f.keypoints;
  const Point2 w1 = k[joint::left_wrist], w2 = k[joint::right_wrist];
  const Point2 s1 = k[joint::left_shoulder], s2 = k[joint::right_shoulder];
  if (!w1.valid() || !w2.valid() || !s1.valid() || !s2.valid()) return std::nullopt;
  const double shoulders = distance(s1, s2);
  if (shoulders < kGeometryEpsilon) return std::nullopt;
  return distance(w1, w2) / shoulders;
}

/// Sum of displacements of joints valid in both frames, over the current
/// frame's bounding-box height.
inline std::optional<double> kinetic_energy(const PoseFrame& curr, const PoseFrame& prev) {
  if (!curr.has_detection || !prev.has_detection || !(curr.time > prev.time)) return std::nullopt;
  const double h = curr.bbox.height();
  if (!(h > 0.0)) return std::nullopt;
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (!curr.keypoints[j].valid() || !prev.keypoints[j].valid()) continue;
    total += distance(curr.keypoints[j], prev.keypoints[j]);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / h;
}

/// Signed torso angle from vertical in degrees, atan(dx / dy) with image
/// coordinates (y down): hips to the right of the shoulders give a positive
/// angle.
inline std::optional<double> trunk_lean(const PoseFrame& f) {
  if (!f.has_detection) return std::nullopt;
  const auto& k = f.keypoints;
  const Point2 s1 = k[joint::left_shoulder], s2 = k[joint::right_shoulder];
  const Point2 h1 = k[joint::left_hip], h2 = k[joint::right_hip];
  if (!s1.valid() || !s2.valid() || !h1.valid() || !h2.valid()) return std::nullopt;
  const double x_sho = (s1.x + s2.x) / 2.0, y_sho = (s1.y + s2.y) / 2.0;
  const double x_hip = (h1.x + h2.x) / 2.0, y_hip = (h1.y + h2.y) / 2.0;
  const double dy = y_hip - y_sho;
  if (std::abs(dy) < kGeometryEpsilon) return std::nullopt;
  return std::atan((x_hip - x_sho) / dy) * 180.0 / std::numbers::pi;
}

/// Keeps one frame per timestamp: the detection with the largest bounding
/// box. Input must be sorted by time.
inline std::vector<PoseFrame> single_performer(std::span<const PoseFrame> frames, Warnings* warnings = nullptr) {
  std::vector<PoseFrame> out;
  std::size_t dropped = 0;
  for (const auto& f : frames) {
    if (!out.empty() && out.back().time == f.time) {
      ++dropped;
      const bool better = f.has_detection && (!out.back().has_detection || f.bbox.area() > out.back().bbox.area());
      if (better) out.back() = f;
      continue;
    }
    out.push_back(f);
  }
  if (dropped > 0 && warnings) {
    warnings->add(std::to_string(dropped) + " extra detections dropped (largest bounding box kept)");
  }
  return out;
}

/// Keeps pose frames whose nearest shot frame (within half a second) has a
/// label in `allowed`. With no shot frames at all, frames pass unfiltered.
inline std::vector<PoseFrame> filter_by_shot(std::span<const PoseFrame> frames, std::span<const ShotFrame> shots,
                                             const std::set<ShotLabel>& allowed, Warnings* warnings = nullptr) {
  if (shots.empty()) {
    if (warnings && !frames.empty()) warnings->add("no shot frames; pose frames left unfiltered");
    return {frames.begin(), frames.end()};
  }
  std::vector<ShotFrame> sorted(shots.begin(), shots.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  std::vector<PoseFrame> out;
  for (const auto& f : frames) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), f.time,
                               [](const ShotFrame& s, double t) { return s.time < t; });
    const ShotFrame* nearest = nullptr;
    if (it != sorted.end()) nearest = &*it;
    if (it != sorted.begin()) {
      const ShotFrame* before = &*std::prev(it);
      if (!nearest || f.time - before->time <= nearest->time - f.time) nearest = before;
    }
    if (nearest && std::abs(nearest->time - f.time) <= 0.5 && allowed.count(nearest->label)) out.push_back(f);
  }
  return out;
}

/// Per-frame signals. Kinetic energy pairs each frame with the preceding
/// detected frame when the gap is at most kMaxPairGap seconds.
inline std::vector<KinematicSample> compute_kinematics(std::span<const PoseFrame> frames) {
  std::vector<KinematicSample> out;
  out.reserve(frames.size());
  const PoseFrame* prev = nullptr;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (i > 0 && f.time < frames[i - 1].time) throw InvariantError("pose frames not sorted by time");
    KinematicSample s;
    s.time = f.time;
    s.detected = f.has_detection;
    if (f.has_detection) {
      s.arm_spread = arm_spread(f);
      s.trunk_lean = trunk_lean(f);
      if (prev && f.time - prev->time <= kMaxPairGap) s.kinetic_energy = kinetic_energy(f, *prev);
      prev = &f;
    }
    out.push_back(s);
  }
  return out;
}

namespace detail {

/// Running sum with Neumaier compensation; supports removal.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void remove(double x) { add(-x); }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class Field>
void smooth_field(std::span<const KinematicSample> in, std::vector<KinematicSample>& out, Field field, double half) {
  CompensatedSum sum;
  std::size_t count = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double t = in[i].time;
    while (hi < in.size() && in[hi].time <= t + half) {
      if (const auto& v = in[hi].*field) {
        sum.add(*v);
        ++count;
      }
      ++hi;
    }
    while (lo < hi && in[lo].time < t - half) {
      if (const auto& v = in[lo].*field) {
        sum.remove(*v);
        --count;
      }
      ++lo;
    }
    if (in[i].*field) {
      // A present centre sample guarantees count >= 1.
      out[i].*field = sum.value() / static_cast<double>(count);
    }
  }
}

}  // namespace detail

/// Centered moving average over [t - window/2, t + window/2]. Absent values
/// are skipped and stay absent.
inline std::vector<KinematicSample> smooth(std::span<const KinematicSample> samples,
                                           double window = kDefaultSmoothingWindow) {
  if (!(window > 0.0)) throw InvariantError("smoothing window must be > 0");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].time < samples[i - 1].time) throw InvariantError("kinematic samples not sorted by time");
  }
  std::vector<KinematicSample> out(samples.begin(), samples.end());
  const double half = window / 2.0;
  detail::smooth_field(samples, out, &KinematicSample::arm_spread, half);
  detail::smooth_field(samples, out, &KinematicSample::kinetic_energy, half);
  detail::smooth_field(samples, out, &KinematicSample::trunk_lean, half);
  return out;
}

}  // namespace mmalign
