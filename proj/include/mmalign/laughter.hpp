#pragma once

// Stride-window laughter scores to merged events, and coverage of a span.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign {

inline constexpr double kDefaultStride = 0.8;
inline constexpr double kDefaultLaughThreshold = 0.3;

/// One window score. The window covers [start, start + stride).
struct LaughWindow {
  double start = 0.0;
  double stride = kDefaultStride;
  LaughType label = LaughType::laughter;
  double probability = 0.0;
};

/// Merges positive windows into events.
///
/// A window is positive when its probability is >= threshold. When several
/// labels are positive for the same window start, the most probable one wins
/// (ties: first in LaughType order). Positive windows of one label whose
/// spans touch (within 1e-9 s) or overlap merge into [first.start, last.start + stride);
/// confidence is the highest member probability. Output is sorted by start.
inline std::vector<LaughterEvent> merge_windows(std::span<const LaughWindow> windows,
                                                double threshold = kDefaultLaughThreshold) {
  for (const auto& w : windows) {
    if (!(w.stride > 0.0)) throw InvariantError("laugh window stride must be > 0");
  }

  // Winning label per window start.
  std::map<double, LaughWindow> winners;
  for (const auto& w : windows) {
    if (!(w.probability >= threshold)) continue;
    auto [it, inserted] = winners.emplace(w.start, w);
    if (!inserted) {
      const auto& cur = it->second;
      if (w.probability > cur.probability || (w.probability == cur.probability && w.label < cur.label)) it->second = w;
    }
  }

  std::map<LaughType, std::vector<LaughWindow>> by_label;
  for (const auto& [start, w] : winners) by_label[w.label].push_back(w);

  std::vector<LaughterEvent> events;
  for (const auto& [label, list] : by_label) {
    std::optional<double> start;
    double end = 0.0;
    double conf = 0.0;
    for (const auto& w : list) {  // sorted by start
      const double w_end = w.start + w.stride;
      // Tolerance absorbs rounding in start = k * stride.
      if (start && w.start <= end + 1e-9) {
        end = std::max(end, w_end);
        conf = std::max(conf, w.probability);
        continue;
      }
      if (start) events.push_back(LaughterEvent{TimedSpan(*start, end), label, conf});
      start = w.start;
      end = w_end;
      conf = w.probability;
    }
    if (start) events.push_back(LaughterEvent{TimedSpan(*start, end), label, conf});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const LaughterEvent& a, const LaughterEvent& b) { return a.span.start() < b.span.start(); });
  return events;
}

/// Length of the union of event spans intersected with [lo, hi).
template <class Pred>
double covered_length(std::span<const LaughterEvent> events, double lo, double hi, Pred keep) {
  std::vector<std::pair<double, double>> pieces;
  for (const auto& e : events) {
    if (!keep(e)) continue;
    const double a = std::max(lo, e.span.start());
    const double b = std::min(hi, e.span.end());
    if (a < b) pieces.emplace_back(a, b);
  }
  std::sort(pieces.begin(), pieces.end());
  double total = 0.0;
  double cur_a = 0.0;
  double cur_b = 0.0;
  bool open = false;
  for (const auto& [a, b] : pieces) {
    if (open && a <= cur_b) {
      cur_b = std::max(cur_b, b);
      continue;
    }
    if (open) total += cur_b - cur_a;
    cur_a = a;
    cur_b = b;
    open = true;
  }
  if (open) total += cur_b - cur_a;
  return total;
}

inline double covered_length(std::span<const LaughterEvent> events, double lo, double hi) {
  return covered_length(events, lo, hi, [](const LaughterEvent&) { return true; });
}

/// Share of `span` covered by events, clipped at the span boundaries.
inline double coverage(std::span<const LaughterEvent> events, const TimedSpan& span) {
  const double d = span.duration();
  if (!(d > 0.0)) throw InvariantError("coverage over an empty span");
  return std::clamp(covered_length(events, span.start(), span.end()) / d, 0.0, 1.0);
}

inline double coverage_of_type(std::span<const LaughterEvent> events, const TimedSpan& span, LaughType type) {
  return std::clamp(
      covered_length(events, span.start(), span.end(), [type](const LaughterEvent& e) { return e.type == type; }) /
          span.duration(),
      0.0, 1.0);
}

}  // namespace mmalign
