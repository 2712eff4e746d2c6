#pragma once

// Ranking and thresholded classification metrics.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "mmalign/error.hpp"

namespace mmalign::onset {

struct MetricsReport {
  double auroc = 0.0;
  double auprc = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
  double positive_rate = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

namespace detail {

inline void check_inputs(std::span<const double> scores, std::span<const int> labels, bool need_both) {
  if (scores.size() != labels.size()) throw InvariantError("scores and labels differ in length");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvariantError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  if (pos == 0) throw InvariantError("metrics need at least one positive label");
  if (need_both && pos == labels.size()) throw InvariantError("metrics need at least one negative label");
}

/// Indices sorted by descending score (stable).
inline std::vector<std::size_t> order_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace detail

/// Mann-Whitney statistic with midranks for ties.
inline double auroc(std::span<const double> scores, std::span<const int> labels) {
  detail::check_inputs(scores, labels, true);
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;  // ranks are 1-based; midranks are multiples of 0.5
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[idx[k]] == 1) rank_sum += midrank;
    }
    i = j + 1;
  }
  const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

/// Average precision: sum over distinct score thresholds (descending) of
/// (R_i - R_{i-1}) * P_i.
inline double average_precision(std::span<const double> scores, std::span<const int> labels) {
  detail::check_inputs(scores, labels, false);
  const auto idx = detail::order_desc(scores);
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  std::size_t tp = 0;
  std::size_t fp = 0;
  double prev_recall = 0.0;
  double ap = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double f1() const {
    const auto denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
};

/// Predictions are positive when score >= threshold.
inline Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (labels[i] == 1) {
      (pred ? c.tp : c.fn) += 1;
    } else {
      (pred ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

struct ThresholdChoice {
  double threshold = 0.0;
  double f1 = 0.0;
};

/// Evaluates F1 at every distinct score and returns the best threshold; on
/// ties the lower threshold wins.
inline ThresholdChoice tune_threshold(std::span<const double> scores, std::span<const int> labels) {
  detail::check_inputs(scores, labels, false);
  const auto idx = detail::order_desc(scores);
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  Confusion c;
  c.fn = n_pos;
  c.tn = labels.size() - n_pos;
  ThresholdChoice best{scores[idx[0]], -1.0};
  std::size_t i = 0;
  while (i < idx.size()) {
    const double thr = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == thr) {
      if (labels[idx[i]] == 1) {
        ++c.tp;
        --c.fn;
      } else {
        ++c.fp;
        --c.tn;
      }
      ++i;
    }
    const double f1 = c.f1();
    if (f1 >= best.f1) best = ThresholdChoice{thr, f1};
  }
  return best;
}

inline MetricsReport compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
  detail::check_inputs(scores, labels, true);
  MetricsReport r;
  r.auroc = auroc(scores, labels);
  r.auprc = average_precision(scores, labels);
  const auto c = confusion_at(scores, labels, threshold);
  r.f1 = c.f1();
  r.precision = c.precision();
  r.recall = c.recall();
  r.threshold = threshold;
  r.positive_rate =
      static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / static_cast<double>(labels.size());
  return r;
}

}  // namespace mmalign::onset
