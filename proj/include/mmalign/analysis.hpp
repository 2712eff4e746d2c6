#pragma once

// Topic-level aggregation of laughter, kinematics and shot composition,
// Pearson correlations, row z-scoring and average-linkage leaf ordering.

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign {

struct TopicProfile {
  int topic_id = 0;
  std::size_t n_blocks = 0;
  double mean_laughter_rate = 0.0;
  double has_laughter_rate = 0.0;
  double belly_rate = 0.0;
  double events_per_10s = 0.0;
  std::optional<double> mean_E;
  std::optional<double> mean_A;
  std::optional<double> mean_theta;
  std::array<double, kShotClassCount> shot_proportions{};
};

/// Per-block quantities that feed the topic profiles.
struct BlockStats {
  int topic_id = 0;
  double laughter_rate = 0.0;
  double belly_rate = 0.0;
  bool has_laughter = false;
  double events_per_10s = 0.0;
  std::optional<double> mean_E;
  std::optional<double> mean_A;
  std::optional<double> mean_theta;
  std::optional<std::array<double, kShotClassCount>> shot_proportions;
};

namespace detail {

template <class Field>
std::optional<double> mean_present(std::span<const KinematicSample> samples, const TimedSpan& span, Field field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (!span.contains(s.time)) continue;
    if (const auto& v = s.*field) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace detail

/// Laughter rate uses every laughter event of the show clipped to the block;
/// event counts use the block's own (onset-contained) events.
inline std::vector<BlockStats> block_stats(const ShowTimeline& show, std::span<const KinematicSample> kinematics) {
  const auto events = all_laugh_events(show);
  std::vector<BlockStats> out;
  out.reserve(show.timeline.size());
  for (const auto& b : show.timeline) {
    BlockStats s;
    s.topic_id = b.topic_id;
    s.laughter_rate = coverage(events, b.span);
    s.belly_rate = coverage_of_type(events, b.span, LaughType::belly_laugh);
    s.has_laughter = !b.laugh_events.empty();
    s.events_per_10s = static_cast<double>(b.laugh_events.size()) * 10.0 / b.span.duration();
    s.mean_E = detail::mean_present(kinematics, b.span, &KinematicSample::kinetic_energy);
    s.mean_A = detail::mean_present(kinematics, b.span, &KinematicSample::arm_spread);
    s.mean_theta = detail::mean_present(kinematics, b.span, &KinematicSample::trunk_lean);
    if (!b.shot_events.empty()) {
      std::array<double, kShotClassCount> p{};
      for (const auto& f : b.shot_events) p[static_cast<std::size_t>(f.label)] += 1.0;
      for (double& x : p) x /= static_cast<double>(b.shot_events.size());
      s.shot_proportions = p;
    }
    out.push_back(s);
  }
  return out;
}

/// Per-topic means with every block weighted equally. Outlier blocks are
/// excluded; blocks without a modality are left out of that modality's means.
inline std::vector<TopicProfile> topic_profiles(std::span<const ShowTimeline> shows,
                                                std::span<const std::vector<KinematicSample>> kinematics) {
  if (kinematics.size() != shows.size()) throw InvariantError("one kinematic series per show expected");

  struct Acc {
    std::size_t n = 0;
    double rate = 0.0, has = 0.0, belly = 0.0, ev = 0.0;
    double e = 0.0, a = 0.0, th = 0.0;
    std::size_t ne = 0, na = 0, nth = 0, nshot = 0;
    std::array<double, kShotClassCount> shots{};
  };
  std::map<int, Acc> acc;
  for (std::size_t s = 0; s < shows.size(); ++s) {
    for (const auto& b : block_stats(shows[s], kinematics[s])) {
      if (b.topic_id == -1) continue;
      auto& t = acc[b.topic_id];
      ++t.n;
      t.rate += b.laughter_rate;
      t.has += b.has_laughter ? 1.0 : 0.0;
      t.belly += b.belly_rate;
      t.ev += b.events_per_10s;
      if (b.mean_E) t.e += *b.mean_E, ++t.ne;
      if (b.mean_A) t.a += *b.mean_A, ++t.na;
      if (b.mean_theta) t.th += *b.mean_theta, ++t.nth;
      if (b.shot_proportions) {
        for (std::size_t k = 0; k < kShotClassCount; ++k) t.shots[k] += (*b.shot_proportions)[k];
        ++t.nshot;
      }
    }
  }
  if (acc.empty()) throw InvariantError("no non-outlier blocks to profile");

  std::vector<TopicProfile> out;
  for (const auto& [topic, t] : acc) {
    const double n = static_cast<double>(t.n);
    TopicProfile p;
    p.topic_id = topic;
    p.n_blocks = t.n;
    p.mean_laughter_rate = t.rate / n;
    p.has_laughter_rate = t.has / n;
    p.belly_rate = t.belly / n;
    p.events_per_10s = t.ev / n;
    if (t.ne) p.mean_E = t.e / static_cast<double>(t.ne);
    if (t.na) p.mean_A = t.a / static_cast<double>(t.na);
    if (t.nth) p.mean_theta = t.th / static_cast<double>(t.nth);
    if (t.nshot) {
      for (std::size_t k = 0; k < kShotClassCount; ++k) p.shot_proportions[k] = t.shots[k] / static_cast<double>(t.nshot);
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature matrix

struct FeatureMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<double>> values;  // rows x cols; NaN = missing
};

/// Column set used for the topic clustermap. The selection of ten features
/// is a reconstruction and is reported as such in the analysis metadata.
inline const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> names = {
      "mean_laughter_rate", "has_laughter_rate", "belly_rate", "events_per_10s", "mean_E",
      "mean_A",             "mean_theta",        "prop_full_shot", "prop_close_up", "prop_medium_shot"};
  return names;
}

inline FeatureMatrix feature_matrix(std::span<const TopicProfile> profiles) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  FeatureMatrix m;
  m.col_labels = default_feature_names();
  for (const auto& p : profiles) {
    m.row_labels.push_back("T" + std::to_string(p.topic_id));
    m.values.push_back({p.mean_laughter_rate, p.has_laughter_rate, p.belly_rate, p.events_per_10s,
                        p.mean_E.value_or(nan), p.mean_A.value_or(nan), p.mean_theta.value_or(nan),
                        p.shot_proportions[static_cast<std::size_t>(ShotLabel::full_shot)],
                        p.shot_proportions[static_cast<std::size_t>(ShotLabel::medium_close_up)],
                        p.shot_proportions[static_cast<std::size_t>(ShotLabel::medium_shot)]});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Statistics

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvariantError("pearson: length mismatch");
  if (x.size() < 3) throw InvariantError("pearson: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvariantError("pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct Correlation {
  std::string feature;
  std::optional<double> r;  // unset when undefined (constant or too few rows)
  std::size_t n = 0;
};

/// Pearson r of every other column against the first (mean laughter rate),
/// over rows where both values are present.
inline std::vector<Correlation> correlations(const FeatureMatrix& m) {
  std::vector<Correlation> out;
  for (std::size_t c = 1; c < m.col_labels.size(); ++c) {
    std::vector<double> x, y;
    for (const auto& row : m.values) {
      if (std::isnan(row[0]) || std::isnan(row[c])) continue;
      x.push_back(row[c]);
      y.push_back(row[0]);
    }
    Correlation corr{m.col_labels[c], std::nullopt, x.size()};
    try {
      corr.r = pearson(x, y);
    } catch (const InvariantError&) {
    }
    out.push_back(corr);
  }
  return out;
}

/// Standardizes each row with the population SD over its present values.
/// Zero-variance rows become zeros (with a warning); NaN entries stay NaN.
inline FeatureMatrix zscore_rows(const FeatureMatrix& m, Warnings* warnings = nullptr) {
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < out.values.size(); ++r) {
    auto& row = out.values[r];
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : row) {
      if (!std::isnan(v)) sum += v, ++n;
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : row) {
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 1e-300)) {
      if (warnings) warnings->add("row '" + (r < m.row_labels.size() ? m.row_labels[r] : std::to_string(r)) +
                                  "' has zero variance; z-scores set to 0");
      for (double& v : row) {
        if (!std::isnan(v)) v = 0.0;
      }
      continue;
    }
    for (double& v : row) {
      if (!std::isnan(v)) v = (v - mean) / sd;
    }
  }
  return out;
}

struct LinkageStep {
  std::size_t a = 0;  // smaller cluster id
  std::size_t b = 0;
  double distance = 0.0;
  std::size_t size = 0;

  friend bool operator==(const LinkageStep&, const LinkageStep&) = default;
};

struct Dendrogram {
  std::vector<LinkageStep> steps;  // cluster n + i is created by steps[i]
  std::vector<std::size_t> leaf_order;
};

/// Average-linkage agglomerative clustering on Euclidean row distances.
/// Leaves are 0..n-1 and merged clusters get ids n, n+1, ... in merge order.
/// Among equally close pairs the one with the smallest (a, b) ids merges first.
inline Dendrogram average_linkage(const FeatureMatrix& m) {
  const std::size_t n = m.values.size();
  if (n < 2) throw InvariantError("clustering needs at least 2 rows");
  for (const auto& row : m.values) {
    for (double v : row) {
      if (!std::isfinite(v)) throw InvariantError("clustering needs finite values");
    }
  }

  const std::size_t total = 2 * n - 1;
  std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (std::size_t c = 0; c < m.values[i].size(); ++c) {
        const double d = m.values[i][c] - m.values[j][c];
        ss += d * d;
      }
      dist[i][j] = dist[j][i] = std::sqrt(ss);
    }
  }
  std::vector<std::size_t> size(total, 1);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back(i);

  Dendrogram dg;
  std::vector<std::pair<std::size_t, std::size_t>> children(total);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double d = dist[active[x]][active[y]];
        if (d < best) best = d, bi = x, bj = y;
      }
    }
    const std::size_t a = active[bi], b = active[bj];
    const std::size_t id = n + step;
    size[id] = size[a] + size[b];
    const double wa = static_cast<double>(size[a]), wb = static_cast<double>(size[b]);
    for (std::size_t k : active) {
      if (k == a || k == b) continue;
      dist[id][k] = dist[k][id] = (wa * dist[a][k] + wb * dist[b][k]) / (wa + wb);
    }
    dg.steps.push_back(LinkageStep{std::min(a, b), std::max(a, b), best, size[id]});
    children[id] = {std::min(a, b), std::max(a, b)};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    active.push_back(id);
  }

  std::vector<std::size_t> stack{total - 1};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (node < n) {
      dg.leaf_order.push_back(node);
    } else {
      stack.push_back(children[node].second);
      stack.push_back(children[node].first);
    }
  }
  return dg;
}

inline std::vector<std::size_t> cluster_order(const FeatureMatrix& m) { return average_linkage(m).leaf_order; }

}  // namespace mmalign
