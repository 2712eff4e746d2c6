#pragma once

// Brute-force reference implementations and random fixtures for the tests.
// Nothing here calls into the code under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mmalign/timeline.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/subtitles.hpp"

namespace oracle {

using namespace mmalign;

// ---------------------------------------------------------------------------
// Containment

/// Index of every block whose [start, end) holds t, by exhaustive scan.
inline std::vector<std::size_t> blocks_holding(double t, const std::vector<TimedSpan>& blocks) {
  std::vector<std::size_t> hits;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].start() <= t && t < blocks[j].end()) hits.push_back(j);
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Coverage

/// Covered fraction of [lo, hi) sampled at the centre of each 1 ms cell.
inline double raster_coverage(const std::vector<LaughterEvent>& events, double lo, double hi) {
  const auto cells = static_cast<long long>(std::llround((hi - lo) * 1000.0));
  long long hit = 0;
  for (long long k = 0; k < cells; ++k) {
    const double t = lo + (static_cast<double>(k) + 0.5) / 1000.0;
    for (const auto& e : events) {
      if (e.span.start() <= t && t < e.span.end()) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(cells);
}

// ---------------------------------------------------------------------------
// Kinematics

inline bool joint_ok(const Point2& p) { return p.x != 0.0 || p.y != 0.0; }

inline std::optional<double> arm_spread(const PoseFrame& f) {
  if (!f.has_detection) return std::nullopt;
  const auto& k = f.keypoints;
  for (std::size_t j : {joint::left_wrist, joint::right_wrist, joint::left_shoulder, joint::right_shoulder}) {
    if (!joint_ok(k[j])) return std::nullopt;
  }
  const double wx = k[joint::left_wrist].x - k[joint::right_wrist].x;
  const double wy = k[joint::left_wrist].y - k[joint::right_wrist].y;
  const double sx = k[joint::left_shoulder].x - k[joint::right_shoulder].x;
  const double sy = k[joint::left_shoulder].y - k[joint::right_shoulder].y;
  const double shoulders = std::sqrt(sx * sx + sy * sy);
  if (shoulders < 1e-6) return std::nullopt;
  return std::sqrt(wx * wx + wy * wy) / shoulders;
}

inline std::optional<double> kinetic_energy(const PoseFrame& cur, const PoseFrame& prev) {
  if (!cur.has_detection || !prev.has_detection) return std::nullopt;
  const double h = cur.bbox.ymax - cur.bbox.ymin;
  if (h <= 0.0) return std::nullopt;
  double total = 0.0;
  int used = 0;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const Point2 a = cur.keypoints[j];
    const Point2 b = prev.keypoints[j];
    if (!joint_ok(a) || !joint_ok(b)) continue;
    total += std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / h;
}

/// Angle of the shoulder-to-hip axis from vertical, folded into (-90, 90).
inline std::optional<double> trunk_lean(const PoseFrame& f) {
  if (!f.has_detection) return std::nullopt;
  const auto& k = f.keypoints;
  for (std::size_t j : {joint::left_shoulder, joint::right_shoulder, joint::left_hip, joint::right_hip}) {
    if (!joint_ok(k[j])) return std::nullopt;
  }
  double dx = 0.5 * (k[joint::left_hip].x + k[joint::right_hip].x) - 0.5 * (k[joint::left_shoulder].x + k[joint::right_shoulder].x);
  double dy = 0.5 * (k[joint::left_hip].y + k[joint::right_hip].y) - 0.5 * (k[joint::left_shoulder].y + k[joint::right_shoulder].y);
  if (std::abs(dy) < 1e-6) return std::nullopt;
  if (dy < 0.0) dx = -dx, dy = -dy;
  return std::atan2(dx, dy) * 180.0 / std::numbers::pi;
}

/// O(n * w) centred mean over present values within +-window/2.
inline std::vector<std::optional<double>> windowed_mean(const std::vector<double>& t,
                                                        const std::vector<std::optional<double>>& v,
                                                        double window) {
  std::vector<std::optional<double>> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i]) continue;
    double sum = 0.0;
    int n = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] && std::abs(t[j] - t[i]) <= window / 2.0) {
        sum += *v[j];
        ++n;
      }
    }
    out[i] = sum / n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ranking metrics

/// AUROC by comparing every positive with every negative; ties count half.
inline double pairwise_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pos = 0.0;
  double neg = 0.0;
  for (int v : y) (v == 1 ? pos : neg) += 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] == 1) continue;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / (pos * neg);
}

/// Average precision by thresholding at each distinct score from scratch.
inline double sweep_average_precision(const std::vector<double>& s, const std::vector<int>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  double pos = 0.0;
  for (int v : y) pos += v == 1 ? 1.0 : 0.0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (double thr : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= thr) (y[i] == 1 ? tp : fp) += 1.0;
    }
    const double recall = tp / pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

// ---------------------------------------------------------------------------
// Random fixtures

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// A detected frame with every joint valid, coordinates on a 1/8 pixel grid.
inline PoseFrame random_pose(std::mt19937_64& g, double time) {
  std::uniform_int_distribution<int> coord(8, 8 * 1000);
  PoseFrame f;
  f.time = time;
  f.has_detection = true;
  for (auto& p : f.keypoints) p = Point2{coord(g) / 8.0, coord(g) / 8.0};
  const double y0 = coord(g) / 8.0;
  f.bbox = BoundingBox{coord(g) / 8.0, y0, 2000.0, y0 + 8.0 + coord(g) / 8.0};
  return f;
}

/// Random subtitle cues with non-overlapping timings on a millisecond grid.
inline std::vector<SubtitleCue> random_cues(std::mt19937_64& g, int n) {
  static const std::vector<std::string> words = {"hello", "world", "so",   "my",    "wife",  "café", "naïve",
                                                 "it's",  "ok",    "right", "funny", "dog",   "plane", "why"};
  std::uniform_int_distribution<int> gap(0, 3000), len(300, 6000), nw(1, 8), pick(0, static_cast<int>(words.size()) - 1),
      two(0, 3);
  std::vector<SubtitleCue> cues;
  long long t = gap(g);
  for (int i = 0; i < n; ++i) {
    const long long d = len(g);
    std::string text;
    const int lines = two(g) == 0 ? 2 : 1;
    for (int l = 0; l < lines; ++l) {
      if (l > 0) text += "\n";
      const int k = nw(g);
      for (int w = 0; w < k; ++w) text += (w ? " " : "") + words[static_cast<std::size_t>(pick(g))];
    }
    SubtitleCue c;
    c.index = i + 1;
    c.span = TimedSpan(static_cast<double>(t) / 1000.0, static_cast<double>(t + d) / 1000.0);
    c.raw_text = text;
    cues.push_back(c);
    t += d + gap(g);
  }
  return cues;
}

}  // namespace oracle
