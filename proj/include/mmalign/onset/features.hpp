#pragma once

// Anchor sampling and the history / vision feature groups for onset
// prediction. Text features are filled in later from a fitted PCA.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::onset {

inline constexpr std::size_t kHistoryDim = 10;
inline constexpr std::size_t kTextDim = 64;
inline constexpr std::size_t kVisionDim = 20;

inline constexpr double kDefaultDelta = 2.0;
inline constexpr double kDefaultStep = 1.0;
inline constexpr double kDefaultHistoryWindow = 10.0;
/// Value of the time-since features when nothing happened before t.
inline constexpr double kTimeSinceCap = 600.0;

using HistoryFeatures = std::array<double, kHistoryDim>;
using TextFeatures = std::array<double, kTextDim>;
using VisionFeatures = std::array<double, kVisionDim>;

struct AnchorSample {
  std::string show_id;
  double t = 0.0;
  bool label = false;
  HistoryFeatures history{};
  TextFeatures text{};
  VisionFeatures vision{};
};

inline const std::array<std::string, kHistoryDim>& history_feature_names() {
  static const std::array<std::string, kHistoryDim> names = {
      "hist_count",    "hist_rate",     "hist_coverage",    "hist_max_duration", "hist_mean_conf",
      "hist_max_conf", "hist_cov_2s",   "hist_cov_5s",      "hist_since_onset",  "hist_since_end"};
  return names;
}

inline const std::array<std::string, kVisionDim>& vision_feature_names() {
  static const std::array<std::string, kVisionDim> names = {
      "shot_full_shot",  "shot_medium_close_up", "shot_medium_long_shot", "shot_medium_shot",
      "shot_other_angles", "shot_other",         "shot_change_rate",      "shot_mean_conf",
      "arm_mean",        "arm_std",              "arm_max",               "arm_trend",
      "lean_mean",       "lean_std",             "lean_trend",            "energy_mean",
      "energy_std",      "energy_max",           "energy_trend",          "pose_detection_rate"};
  return names;
}

inline std::vector<std::string> text_feature_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kTextDim; ++i) names.push_back("text_pc" + std::to_string(i + 1));
  return names;
}

/// Anchors at 0, step, 2 step, ... below `end`, skipping instants inside an
/// event (start <= t < end). Label: some event starts in [t, t + delta).
/// `events` need not be sorted.
inline std::vector<AnchorSample> sample_anchors(const std::string& show_id, std::span<const LaughterEvent> events,
                                                double end, double step = kDefaultStep,
                                                double delta = kDefaultDelta) {
  if (!(step > 0.0)) throw InvariantError("anchor step must be > 0");
  if (!(delta > 0.0)) throw InvariantError("onset horizon must be > 0");
  std::vector<std::pair<double, double>> spans;
  spans.reserve(events.size());
  for (const auto& e : events) spans.emplace_back(e.span.start(), e.span.end());
  std::sort(spans.begin(), spans.end());

  std::vector<AnchorSample> out;
  std::size_t next = 0;       // first event with start > t
  double max_end = -1.0;      // latest end among events with start <= t
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * step;
    if (!(t < end)) break;
    while (next < spans.size() && spans[next].first <= t) {
      max_end = std::max(max_end, spans[next].second);
      ++next;
    }
    if (max_end > t) continue;
    AnchorSample a;
    a.show_id = show_id;
    a.t = t;
    // Events in [next, ...) start after t; events at index < next start <= t,
    // and one starting exactly at t would have made t in-event.
    a.label = next < spans.size() && spans[next].first < t + delta;
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<AnchorSample> sample_anchors(const ShowTimeline& show, double step = kDefaultStep,
                                                double delta = kDefaultDelta) {
  const auto events = all_laugh_events(show);
  return sample_anchors(show.show_id, events, show.end_time(), step, delta);
}

/// History statistics at t over events sorted by start. Window statistics
/// cover events intersecting [t - window, t), clipped to the window;
/// time-since values look at onsets before t and ends at or before t.
inline HistoryFeatures history_features(std::span<const LaughterEvent> events, double t,
                                        double window = kDefaultHistoryWindow) {
  if (!(window > 0.0)) throw InvariantError("history window must be > 0");
  HistoryFeatures f{};
  const double lo = t - window;

  // Events that can reach into the window start before t.
  const auto upper = static_cast<std::size_t>(
      std::lower_bound(events.begin(), events.end(), t,
                       [](const LaughterEvent& e, double v) { return e.span.start() < v; }) -
      events.begin());

  double max_dur_all = 0.0;
  for (std::size_t i = 0; i < upper; ++i) max_dur_all = std::max(max_dur_all, events[i].span.duration());

  std::size_t count = 0;
  double conf_sum = 0.0;
  double conf_max = 0.0;
  double dur_max = 0.0;
  double since_end = kTimeSinceCap;
  bool have_end = false;
  double best_end = 0.0;
  for (std::size_t k = upper; k-- > 0;) {
    const auto& e = events[k];
    if (e.span.end() > lo) {
      ++count;
      conf_sum += e.confidence;
      conf_max = std::max(conf_max, e.confidence);
      dur_max = std::max(dur_max, std::min(e.span.end(), t) - std::max(e.span.start(), lo));
    }
    if (e.span.end() <= t && (!have_end || e.span.end() > best_end)) {
      best_end = e.span.end();
      have_end = true;
    }
    // Nothing earlier can still intersect the window or beat best_end.
    const double reach = e.span.start() + max_dur_all;
    if (reach <= lo && (!have_end || reach <= best_end)) break;
  }
  if (have_end) since_end = std::min(kTimeSinceCap, t - best_end);

  const auto slice = events.subspan(0, upper);
  f[0] = static_cast<double>(count);
  f[1] = static_cast<double>(count) / window;
  f[2] = covered_length(slice, lo, t) / window;
  f[3] = dur_max;
  f[4] = count > 0 ? conf_sum / static_cast<double>(count) : 0.0;
  f[5] = conf_max;
  f[6] = covered_length(slice, std::max(lo, t - 2.0), t) / std::min(window, 2.0);
  f[7] = covered_length(slice, std::max(lo, t - 5.0), t) / std::min(window, 5.0);
  f[8] = upper > 0 ? std::min(kTimeSinceCap, t - events[upper - 1].span.start()) : kTimeSinceCap;
  f[9] = since_end;
  return f;
}

namespace detail {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  double trend = 0.0;
};

/// Mean, population SD, max and least-squares slope against time.
inline Moments moments(std::span<const double> ts, std::span<const double> vs) {
  Moments m;
  m.n = vs.size();
  if (m.n == 0) return m;
  double sum = 0.0, tsum = 0.0;
  m.max = vs[0];
  for (std::size_t i = 0; i < m.n; ++i) {
    sum += vs[i];
    tsum += ts[i];
    m.max = std::max(m.max, vs[i]);
  }
  const double n = static_cast<double>(m.n);
  m.mean = sum / n;
  const double tmean = tsum / n;
  double ss = 0.0, stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double dv = vs[i] - m.mean;
    const double dt = ts[i] - tmean;
    ss += dv * dv;
    stt += dt * dt;
    stv += dt * dv;
  }
  m.std = std::sqrt(ss / n);
  m.trend = stt > 0.0 ? stv / stt : 0.0;
  return m;
}

template <class T>
std::pair<std::size_t, std::size_t> time_range(std::span<const T> items, double lo, double hi) {
  auto first = std::lower_bound(items.begin(), items.end(), lo, [](const T& x, double v) { return x.time < v; });
  auto last = std::lower_bound(first, items.end(), hi, [](const T& x, double v) { return x.time < v; });
  return {static_cast<std::size_t>(first - items.begin()), static_cast<std::size_t>(last - items.begin())};
}

}  // namespace detail

/// Vision statistics over [t - window, t). Both inputs sorted by time.
inline VisionFeatures vision_features(std::span<const ShotFrame> shots, std::span<const KinematicSample> kinematics,
                                      double t, double window = kDefaultHistoryWindow) {
  if (!(window > 0.0)) throw InvariantError("vision window must be > 0");
  VisionFeatures f{};
  const double lo = t - window;

  const auto [s0, s1] = detail::time_range(shots, lo, t);
  if (s1 > s0) {
    const double n = static_cast<double>(s1 - s0);
    std::size_t changes = 0;
    double conf = 0.0;
    for (std::size_t i = s0; i < s1; ++i) {
      f[static_cast<std::size_t>(shots[i].label)] += 1.0;
      conf += shots[i].score;
      if (i > s0 && shots[i].label != shots[i - 1].label) ++changes;
    }
    for (std::size_t c = 0; c < kShotClassCount; ++c) f[c] /= n;
    f[6] = static_cast<double>(changes) / n;
    f[7] = conf / n;
  }

  const auto [k0, k1] = detail::time_range(kinematics, lo, t);
  std::vector<double> ta, va, tl, vl, te, ve;
  std::size_t detected = 0;
  for (std::size_t i = k0; i < k1; ++i) {
    const auto& k = kinematics[i];
    if (k.detected) ++detected;
    if (k.arm_spread) {
      ta.push_back(k.time);
      va.push_back(*k.arm_spread);
    }
    if (k.trunk_lean) {
      tl.push_back(k.time);
      vl.push_back(*k.trunk_lean);
    }
    if (k.kinetic_energy) {
      te.push_back(k.time);
      ve.push_back(*k.kinetic_energy);
    }
  }
  const auto arm = detail::moments(ta, va);
  const auto lean = detail::moments(tl, vl);
  const auto energy = detail::moments(te, ve);
  f[8] = arm.mean;
  f[9] = arm.std;
  f[10] = arm.max;
  f[11] = arm.trend;
  f[12] = lean.mean;
  f[13] = lean.std;
  f[14] = lean.trend;
  f[15] = energy.mean;
  f[16] = energy.std;
  f[17] = energy.max;
  f[18] = energy.trend;
  f[19] = k1 > k0 ? static_cast<double>(detected) / static_cast<double>(k1 - k0) : 0.0;
  return f;
}

}  // namespace mmalign::onset
