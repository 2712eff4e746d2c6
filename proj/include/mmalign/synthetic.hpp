#pragma once

// Seeded generator of stand-up-like shows: subtitles, topic blocks with
// embeddings, laughter window scores, shot labels and pose keypoints.
//
// Laughter comes in bouts: a short primer event, then follow-ups that start
// 0.8 or 1.6 s after the previous event ends. Bout rate depends on the
// block's topic, and the seconds before a primer show less motion and more
// close-ups. Used by the tests and by `mmalign synth`.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/random.hpp"
#include "mmalign/subtitles.hpp"
#include "mmalign/timeline.hpp"
#include "mmalign/topic_eval.hpp"

namespace mmalign::synth {

struct Config {
  std::size_t n_shows = 10;
  double duration = 1800.0;
  double target_duration = 60.0;
  std::size_t n_topics = 12;
  double bout_rate = 1.0 / 50.0;  // bouts per second for an average topic
  double continue_prob = 0.8;
  double pre_bout_seconds = 8.0;
  std::uint64_t seed = 7;
};

struct Show {
  std::string show_id;
  std::vector<SubtitleCue> cues;
  std::vector<TextBlock> blocks;
  std::vector<int> block_topics;
  std::vector<std::vector<double>> block_embeddings;
  std::vector<LaughWindow> windows;
  std::vector<LaughterEvent> events;  // merged from windows
  std::vector<double> bout_starts;
  std::vector<ShotFrame> shots;
  std::vector<PoseFrame> poses;
};

namespace detail {

inline std::string make_word(Rng& rng) {
  static constexpr std::array<const char*, 16> onsets = {"b", "d", "f", "g", "k", "l", "m", "n",
                                                          "p", "r", "s", "t", "v", "z", "ch", "st"};
  static constexpr std::array<const char*, 6> vowels = {"a", "e", "i", "o", "u", "ou"};
  std::string w;
  const auto syl = 2 + uniform_index(rng, 2);
  for (std::uint64_t s = 0; s < syl; ++s) {
    w += onsets[uniform_index(rng, onsets.size())];
    w += vowels[uniform_index(rng, vowels.size())];
  }
  return w;
}

struct Corpus {
  std::vector<std::vector<std::string>> vocab;       // per topic
  std::vector<std::vector<double>> centroids;        // per topic, unit
  std::vector<double> funniness;                     // per topic
};

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return normalize_embedding(v);
}

inline Corpus make_corpus(const Config& cfg, Rng& rng) {
  Corpus c;
  for (std::size_t k = 0; k < cfg.n_topics; ++k) {
    std::vector<std::string> words;
    for (int i = 0; i < 15; ++i) words.push_back(make_word(rng));
    c.vocab.push_back(std::move(words));
    c.centroids.push_back(random_unit(rng, kEmbeddingDim));
    c.funniness.push_back(std::exp(0.7 * normal(rng)));
  }
  return c;
}

inline const std::array<const char*, 8>& filler() {
  static const std::array<const char*, 8> words = {"the", "and", "you know", "like", "um", "so", "I", "was"};
  return words;
}

inline std::string cue_line(const std::vector<std::string>& vocab, Rng& rng) {
  std::string line;
  const auto n = 5 + uniform_index(rng, 6);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!line.empty()) line += ' ';
    if (bernoulli(rng, 0.3)) {
      line += filler()[uniform_index(rng, filler().size())];
    } else {
      line += vocab[uniform_index(rng, vocab.size())];
    }
  }
  return line;
}

inline LaughType event_type(Rng& rng) {
  const double u = uniform01(rng);
  if (u < 0.7) return LaughType::laughter;
  if (u < 0.8) return LaughType::belly_laugh;
  if (u < 0.9) return LaughType::giggle;
  return LaughType::chuckle;
}

inline ShotLabel random_shot(Rng& rng) {
  const double u = uniform01(rng);
  if (u < 0.35) return ShotLabel::full_shot;
  if (u < 0.60) return ShotLabel::medium_shot;
  if (u < 0.75) return ShotLabel::medium_long_shot;
  if (u < 0.90) return ShotLabel::medium_close_up;
  if (u < 0.95) return ShotLabel::other_angles;
  return ShotLabel::other;
}

// Reference skeleton (pixels, y down) for a performer ~400 px tall.
inline constexpr std::array<Point2, kJointCount> kSkeleton = {{
    {0, -180},  {-8, -188}, {8, -188},  {-16, -184}, {16, -184}, {-45, -130}, {45, -130}, {-60, -70}, {60, -70},
    {-55, -15}, {55, -15},  {-30, 10},  {30, 10},    {-32, 110}, {32, 110},   {-34, 200}, {34, 200},
}};

}  // namespace detail

inline Show generate_show(const Config& cfg, const detail::Corpus& corpus, std::size_t index, Rng& rng) {
  Show show;
  char id[32];
  std::snprintf(id, sizeof id, "show_%02zu", index + 1);
  show.show_id = id;

  // Cue timing first; blocks depend only on timing.
  std::vector<std::pair<double, double>> timing;
  for (double t = 0.5 + uniform(rng, 0.0, 1.0); t < cfg.duration - 3.0;) {
    const double gap = uniform(rng, 1.5, 4.0);
    const double len = uniform(rng, 1.0, gap - 0.2);
    const double s = std::round(t * 1000.0) / 1000.0;
    const double e = std::round((t + len) * 1000.0) / 1000.0;
    timing.emplace_back(s, e);
    t += gap;
  }
  std::vector<SubtitleCue> cues;
  for (std::size_t i = 0; i < timing.size(); ++i) {
    cues.push_back(SubtitleCue{static_cast<int>(i + 1), TimedSpan(timing[i].first, timing[i].second), "x", "x"});
  }
  const auto skeleton_blocks = build_blocks(cues, cfg.target_duration);

  int prev_topic = static_cast<int>(uniform_index(rng, cfg.n_topics));
  for (std::size_t b = 0; b < skeleton_blocks.size(); ++b) {
    int topic = prev_topic;
    if (b > 0 && !bernoulli(rng, 0.35)) topic = static_cast<int>(uniform_index(rng, cfg.n_topics));
    prev_topic = topic;
    show.block_topics.push_back(bernoulli(rng, 0.05) ? kOutlierTopic : topic);
    std::vector<double> emb = corpus.centroids[static_cast<std::size_t>(topic)];
    for (auto& x : emb) x += 0.6 / std::sqrt(static_cast<double>(kEmbeddingDim)) * normal(rng);
    show.block_embeddings.push_back(normalize_embedding(emb));
  }
  auto block_of = [&](double t) -> std::size_t {
    std::size_t b = 0;
    while (b + 1 < skeleton_blocks.size() && skeleton_blocks[b + 1].span.start() <= t) ++b;
    return b;
  };
  auto topic_at = [&](double t) {
    if (skeleton_blocks.empty()) return 0;
    const std::size_t b = block_of(t);
    int topic = show.block_topics[b];
    return topic < 0 ? 0 : topic;
  };

  // Cue text from the owning block's topic vocabulary.
  for (auto& c : cues) {
    const int topic = topic_at(c.span.start());
    std::string raw = detail::cue_line(corpus.vocab[static_cast<std::size_t>(topic)], rng);
    if (bernoulli(rng, 0.1)) raw = "<i>" + raw + "</i>";
    if (bernoulli(rng, 0.2)) raw += "\n" + detail::cue_line(corpus.vocab[static_cast<std::size_t>(topic)], rng);
    c.raw_text = raw;
    c.clean_text = clean_cue_text(raw);
  }
  show.cues = cues;
  show.blocks = build_blocks(cues, cfg.target_duration);

  // Laughter on the 0.8 s window grid.
  const double stride = kDefaultStride;
  const auto n_win = static_cast<std::size_t>(cfg.duration / stride);
  std::vector<int> win_label(n_win, -1);
  std::size_t next_free = static_cast<std::size_t>(std::ceil(5.0 / stride));
  for (std::size_t i = next_free; i < n_win; ++i) {
    if (i < next_free) continue;
    const double t = static_cast<double>(i) * stride;
    const double rate = cfg.bout_rate * corpus.funniness[static_cast<std::size_t>(topic_at(t))];
    if (!bernoulli(rng, std::min(0.9, rate * stride))) continue;
    show.bout_starts.push_back(t);
    std::size_t pos = i;
    std::size_t len = 1 + uniform_index(rng, 2);
    bool first = true;
    while (true) {
      const auto type = static_cast<int>(first ? LaughType::laughter : detail::event_type(rng));
      for (std::size_t k = 0; k < len && pos + k < n_win; ++k) win_label[pos + k] = type;
      pos += len;
      first = false;
      if (!bernoulli(rng, cfg.continue_prob)) break;
      pos += 1 + uniform_index(rng, 2);
      len = 1 + uniform_index(rng, 3);
      if (pos >= n_win) break;
    }
    next_free = pos + static_cast<std::size_t>(std::ceil(4.0 / stride));
    i = pos;
  }
  for (std::size_t i = 0; i < n_win; ++i) {
    const double start = std::round(static_cast<double>(i) * stride * 1000.0) / 1000.0;
    if (win_label[i] >= 0) {
      show.windows.push_back(LaughWindow{start, stride, static_cast<LaughType>(win_label[i]), uniform(rng, 0.45, 0.95)});
      if (win_label[i] != static_cast<int>(LaughType::laughter)) {
        show.windows.push_back(LaughWindow{start, stride, LaughType::laughter, uniform(rng, 0.0, 0.4)});
      }
    } else {
      show.windows.push_back(LaughWindow{start, stride, LaughType::laughter, uniform(rng, 0.0, 0.25)});
    }
  }
  show.events = merge_windows(show.windows, kDefaultLaughThreshold);

  auto in_laughter = [&](double t) {
    const auto i = static_cast<std::size_t>(t / stride);
    return i < n_win && win_label[i] >= 0;
  };
  auto before_bout = [&](double t) {
    auto it = std::lower_bound(show.bout_starts.begin(), show.bout_starts.end(), t);
    return it != show.bout_starts.end() && *it - t <= cfg.pre_bout_seconds;
  };

  // Shots and poses at 1 Hz.
  ShotLabel label = detail::random_shot(rng);
  double cx = 640.0, cy = 420.0;
  double arm_phase = uniform(rng, 0.0, 6.28);
  for (double t = 0.0; t < cfg.duration; t += 1.0) {
    const bool quiet = before_bout(t);
    const bool laughing = in_laughter(t);
    if (laughing && bernoulli(rng, 0.5)) {
      label = ShotLabel::medium_close_up;
    } else if (quiet && bernoulli(rng, 0.3)) {
      label = ShotLabel::medium_shot;
    } else if (!bernoulli(rng, 0.85)) {
      label = detail::random_shot(rng);
    }
    const auto cls = static_cast<int>(label);
    show.shots.push_back(ShotFrame{t, label, cls, uniform(rng, 0.5, 1.0)});

    PoseFrame f;
    f.time = t;
    f.has_detection = bernoulli(rng, 0.92);
    if (f.has_detection) {
      const double amp = quiet ? 1.5 : (laughing ? 12.0 : 6.0);
      cx = std::clamp(cx + normal(rng) * amp, 300.0, 980.0);
      cy = std::clamp(cy + normal(rng) * amp * 0.3, 380.0, 460.0);
      arm_phase += 0.3 + 0.1 * normal(rng);
      const double spread = (quiet ? 0.9 : 1.0) + 0.35 * std::sin(arm_phase);
      double xmin = 1e9, ymin = 1e9, xmax = -1e9, ymax = -1e9;
      for (std::size_t j = 0; j < kJointCount; ++j) {
        Point2 p = detail::kSkeleton[j];
        if (j == joint::left_wrist || j == joint::right_wrist || j == 7 || j == 8) p.x *= spread;
        p.x += cx + normal(rng) * amp * 0.5;
        p.y += cy + normal(rng) * amp * 0.5;
        p.x = std::round(p.x * 10.0) / 10.0;
        p.y = std::round(p.y * 10.0) / 10.0;
        xmin = std::min(xmin, p.x);
        ymin = std::min(ymin, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
        f.keypoints[j] = bernoulli(rng, 0.03) ? Point2{0.0, 0.0} : p;
      }
      f.bbox = BoundingBox{xmin - 10.0, ymin - 10.0, xmax + 10.0, ymax + 10.0};
    }
    show.poses.push_back(f);
  }
  return show;
}

inline std::vector<Show> generate_corpus(const Config& cfg) {
  Rng rng(cfg.seed);
  const auto corpus = detail::make_corpus(cfg, rng);
  std::vector<Show> shows;
  for (std::size_t i = 0; i < cfg.n_shows; ++i) {
    Rng show_rng(cfg.seed * 1000003ULL + i + 1);
    shows.push_back(generate_show(cfg, corpus, i, show_rng));
  }
  return shows;
}

/// Topic descriptors of the generated vocabulary (ten top words per topic).
inline std::vector<TopicDescriptor> descriptors(const Config& cfg) {
  Rng rng(cfg.seed);
  const auto corpus = detail::make_corpus(cfg, rng);
  std::vector<TopicDescriptor> out;
  for (std::size_t k = 0; k < cfg.n_topics; ++k) {
    TopicDescriptor d;
    d.topic_id = static_cast<int>(k);
    d.top_words.assign(corpus.vocab[k].begin(), corpus.vocab[k].begin() + 10);
    out.push_back(std::move(d));
  }
  return out;
}

/// Unified timeline of a generated show.
inline ShowTimeline to_timeline(const Show& s) {
  std::vector<TopicBlock> blocks;
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    TopicBlock blk;
    blk.block_id = static_cast<int>(b);
    blk.span = s.blocks[b].span;
    blk.topic_id = s.block_topics[b];
    blk.text = s.blocks[b].text;
    blk.embedding = s.block_embeddings[b];
    blocks.push_back(std::move(blk));
  }
  return align_show(s.show_id, std::move(blocks), s.events, s.shots, s.poses);
}

/// Unsmoothed kinematics from shot-filtered poses, as used for onset features.
inline std::vector<KinematicSample> raw_kinematics(const Show& s) {
  const std::set<ShotLabel> allowed = {ShotLabel::full_shot, ShotLabel::medium_long_shot};
  const auto filtered = filter_by_shot(s.poses, s.shots, allowed);
  return compute_kinematics(filtered);
}

}  // namespace mmalign::synth
