#pragma once

// Topic-assignment diagnostics, NPMI coherence, the composite selection
// score, and outlier post-processing (centroid reassignment, gap filling).
// The topic model itself is external; everything here consumes its output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/random.hpp"

namespace mmalign {

using Embedding = std::vector<double>;

inline constexpr int kOutlierTopic = -1;
inline constexpr int kMinValidTopics = 10;
inline constexpr double kMaxValidShare = 0.35;
inline constexpr double kDefaultCentroidThreshold = 0.30;

struct TopicAssignment {
  int block_index = 0;
  int topic_id = kOutlierTopic;
  Embedding embedding;

  friend bool operator==(const TopicAssignment&, const TopicAssignment&) = default;
};

struct TopicDescriptor {
  int topic_id = 0;
  std::vector<std::string> top_words;
  Embedding centroid;
};

struct TopicModelDiagnostics {
  int K = 0;
  double s_max = 0.0;
  double H_norm = 0.0;
  std::optional<double> C_npmi;
  std::optional<double> S;
  bool valid = false;
  std::map<int, std::size_t> counts;  // per non-outlier topic
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvariantError("dimension mismatch in dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Embedding normalize_embedding(std::span<const double> v) {
  const double norm = std::sqrt(dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvariantError("cannot normalize a zero or non-finite vector");
  Embedding out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

// ---------------------------------------------------------------------------
// Distribution diagnostics

/// K, s_max and H_norm over non-outlier assignments. H_norm uses natural
/// logs and is defined as 0 when K = 1. C_npmi and S are left unset.
inline TopicModelDiagnostics diagnostics_from_topics(std::span<const int> topic_ids) {
  TopicModelDiagnostics d;
  std::size_t n = 0;
  for (int t : topic_ids) {
    if (t == kOutlierTopic) continue;
    ++d.counts[t];
    ++n;
  }
  if (n == 0) throw InvariantError("diagnostics need at least one non-outlier assignment");

  d.K = static_cast<int>(d.counts.size());
  std::size_t largest = 0;
  double entropy = 0.0;
  for (const auto& [topic, count] : d.counts) {
    largest = std::max(largest, count);
    const double p = static_cast<double>(count) / static_cast<double>(n);
    entropy -= p * std::log(p);
  }
  d.s_max = static_cast<double>(largest) / static_cast<double>(n);
  d.H_norm = d.K > 1 ? entropy / std::log(static_cast<double>(d.K)) : 0.0;
  // Uniform distributions land a few ulps off 1 through the log ratio.
  if (std::all_of(d.counts.begin(), d.counts.end(), [&](const auto& kv) { return kv.second == largest; })) {
    d.H_norm = d.K > 1 ? 1.0 : 0.0;
  }
  d.H_norm = std::clamp(d.H_norm, 0.0, 1.0);
  d.valid = d.K >= kMinValidTopics && d.s_max <= kMaxValidShare;
  return d;
}

inline TopicModelDiagnostics diagnostics(std::span<const TopicAssignment> assignments) {
  std::vector<int> ids;
  ids.reserve(assignments.size());
  for (const auto& a : assignments) ids.push_back(a.topic_id);
  return diagnostics_from_topics(ids);
}

// ---------------------------------------------------------------------------
// NPMI coherence

struct NpmiOptions {
  std::optional<std::size_t> subsample;  // documents kept, when set
  std::uint64_t seed = 0;
};

/// NPMI of one word pair from document frequencies over D documents.
/// Zero co-occurrence gives the -1 limit; P(wi,wj) = 1 gives the +1 limit.
inline double npmi_from_counts(std::size_t df_i, std::size_t df_j, std::size_t df_ij, std::size_t D) {
  if (df_ij == 0) return -1.0;
  const double dd = static_cast<double>(D);
  const double p_ij = static_cast<double>(df_ij) / dd;
  if (df_ij == D) return 1.0;
  const double p_i = static_cast<double>(df_i) / dd;
  const double p_j = static_cast<double>(df_j) / dd;
  return std::log(p_ij / (p_i * p_j)) / -std::log(p_ij);
}

struct CoherenceResult {
  double C_npmi = 0.0;
  std::map<int, double> per_topic;  // topics with at least one scoreable pair
};

/// Mean NPMI over the top-word pairs of each non-outlier topic, averaged
/// over topics. Documents contribute their unigrams and adjacent bigrams
/// ("a b"), so bigram top words are matched. Pairs where either word never
/// occurs are skipped.
inline CoherenceResult npmi_coherence_detail(std::span<const TopicDescriptor> topics,
                                             std::span<const std::vector<std::string>> documents,
                                             const NpmiOptions& options = {}) {
  if (documents.empty()) throw InvariantError("npmi_coherence needs documents");

  std::vector<std::size_t> doc_ids(documents.size());
  for (std::size_t i = 0; i < doc_ids.size(); ++i) doc_ids[i] = i;
  if (options.subsample && *options.subsample < documents.size()) {
    Rng rng(options.seed);
    shuffle(std::span<std::size_t>(doc_ids), rng);
    doc_ids.resize(*options.subsample);
    std::sort(doc_ids.begin(), doc_ids.end());
  }
  const std::size_t D = doc_ids.size();
  if (D == 0) throw InvariantError("npmi_coherence subsample is empty");

  std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
  for (const auto& t : topics) {
    if (t.topic_id == kOutlierTopic) continue;
    if (t.top_words.size() < 2) throw InvariantError("topic " + std::to_string(t.topic_id) + " has fewer than 2 top words");
    for (const auto& w : t.top_words) postings.emplace(w, std::vector<std::uint32_t>{});
  }
  for (std::size_t k = 0; k < D; ++k) {
    const auto& doc = documents[doc_ids[k]];
    auto mark = [&](const std::string& term) {
      auto it = postings.find(term);
      if (it != postings.end() && (it->second.empty() || it->second.back() != k)) {
        it->second.push_back(static_cast<std::uint32_t>(k));
      }
    };
    for (std::size_t i = 0; i < doc.size(); ++i) {
      mark(doc[i]);
      if (i + 1 < doc.size()) mark(doc[i] + " " + doc[i + 1]);
    }
  }
  // Bigram and unigram marks interleave, so postings need sorting.
  for (auto& [w, ids] : postings) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  auto co_count = [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t n = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) {
        ++i;
      } else if (b[j] < a[i]) {
        ++j;
      } else {
        ++n;
        ++i;
        ++j;
      }
    }
    return n;
  };

  CoherenceResult result;
  double total = 0.0;
  for (const auto& t : topics) {
    if (t.topic_id == kOutlierTopic) continue;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < t.top_words.size(); ++i) {
      for (std::size_t j = i + 1; j < t.top_words.size(); ++j) {
        const auto& pi = postings.at(t.top_words[i]);
        const auto& pj = postings.at(t.top_words[j]);
        if (pi.empty() || pj.empty()) continue;
        sum += npmi_from_counts(pi.size(), pj.size(), co_count(pi, pj), D);
        ++pairs;
      }
    }
    if (pairs == 0) continue;
    const double c = sum / static_cast<double>(pairs);
    result.per_topic[t.topic_id] = c;
    total += c;
  }
  if (result.per_topic.empty()) throw InvariantError("no scoreable word pair in any topic");
  result.C_npmi = total / static_cast<double>(result.per_topic.size());
  return result;
}

inline double npmi_coherence(std::span<const TopicDescriptor> topics, std::span<const std::vector<std::string>> documents,
                             const NpmiOptions& options = {}) {
  return npmi_coherence_detail(topics, documents, options).C_npmi;
}

// ---------------------------------------------------------------------------
// Model selection

inline double composite_score(const TopicModelDiagnostics& d) {
  if (!d.C_npmi) throw InvariantError("composite_score needs C_npmi");
  return d.H_norm + *d.C_npmi - 2.0 * d.s_max;
}

/// Fills C_npmi and S.
inline TopicModelDiagnostics with_coherence(TopicModelDiagnostics d, double c_npmi) {
  d.C_npmi = c_npmi;
  d.S = composite_score(d);
  return d;
}

struct ModelCandidate {
  TopicModelDiagnostics diagnostics;
  std::vector<TopicAssignment> assignments;
};

/// Returns the valid block size with the highest S; ties go to the smaller
/// block size. Throws InvariantError listing each candidate's violations when
/// none is valid.
inline int select_model(const std::map<int, ModelCandidate>& candidates) {
  if (candidates.empty()) throw InvariantError("select_model needs at least one candidate");
  std::optional<int> best;
  double best_s = 0.0;
  std::string report;
  for (const auto& [size, cand] : candidates) {  // ascending block size
    const auto& d = cand.diagnostics;
    if (!d.valid) {
      report += "\n  " + std::to_string(size) + " s:";
      if (d.K < kMinValidTopics) report += " K=" + std::to_string(d.K) + " < " + std::to_string(kMinValidTopics);
      if (d.s_max > kMaxValidShare) report += " s_max=" + std::to_string(d.s_max) + " > 0.35";
      continue;
    }
    const double s = d.S ? *d.S : composite_score(d);
    if (!best || s > best_s) {
      best = size;
      best_s = s;
    }
  }
  if (!best) throw InvariantError("no valid topic model candidate:" + report);
  return *best;
}

// ---------------------------------------------------------------------------
// Post-processing

/// Renormalized mean of member embeddings for each non-outlier topic,
/// ordered by topic id.
inline std::vector<TopicDescriptor> compute_centroids(std::span<const TopicAssignment> assignments) {
  std::map<int, Embedding> sums;
  std::map<int, std::size_t> counts;
  for (const auto& a : assignments) {
    if (a.topic_id == kOutlierTopic || a.embedding.empty()) continue;
    auto& s = sums[a.topic_id];
    if (s.empty()) s.assign(a.embedding.size(), 0.0);
    if (s.size() != a.embedding.size()) throw InvariantError("mixed embedding dimensions");
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += a.embedding[i];
    ++counts[a.topic_id];
  }
  std::vector<TopicDescriptor> out;
  for (auto& [topic, s] : sums) {
    for (double& x : s) x /= static_cast<double>(counts[topic]);
    TopicDescriptor d;
    d.topic_id = topic;
    d.centroid = normalize_embedding(s);
    out.push_back(std::move(d));
  }
  return out;
}

/// Moves each outlier to its most similar centroid when the cosine is at
/// least `threshold`. Non-outlier assignments pass through unchanged. Ties
/// go to the earlier descriptor.
inline std::vector<TopicAssignment> centroid_reassign(std::span<const TopicAssignment> assignments,
                                                      std::span<const TopicDescriptor> descriptors,
                                                      double threshold = kDefaultCentroidThreshold) {
  if (descriptors.empty()) throw InvariantError("centroid_reassign needs at least one topic descriptor");
  std::vector<TopicAssignment> out(assignments.begin(), assignments.end());
  for (auto& a : out) {
    if (a.topic_id != kOutlierTopic || a.embedding.empty()) continue;
    std::optional<std::size_t> best;
    double best_sim = 0.0;
    for (std::size_t k = 0; k < descriptors.size(); ++k) {
      if (descriptors[k].centroid.empty()) continue;
      const double sim = dot(a.embedding, descriptors[k].centroid);
      if (!best || sim > best_sim) {
        best = k;
        best_sim = sim;
      }
    }
    if (best && best_sim >= threshold) a.topic_id = descriptors[*best].topic_id;
  }
  return out;
}

/// Replaces a single outlier flanked by two identical non-outlier topics.
/// One pass over the original sequence; replacements do not cascade.
inline std::vector<int> gap_fill(std::span<const int> sequence) {
  std::vector<int> out(sequence.begin(), sequence.end());
  for (std::size_t i = 1; i + 1 < sequence.size(); ++i) {
    if (sequence[i] == kOutlierTopic && sequence[i - 1] != kOutlierTopic && sequence[i - 1] == sequence[i + 1]) {
      out[i] = sequence[i - 1];
    }
  }
  return out;
}

}  // namespace mmalign
