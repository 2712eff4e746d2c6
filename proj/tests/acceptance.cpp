// Acceptance runner: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or fails only where listed in
// kKnownFailures; `--strict` makes any FAIL fatal.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "mmalign/kinematics.hpp"
#include "mmalign/laughter.hpp"
#include "mmalign/onset/bench.hpp"
#include "mmalign/pipeline.hpp"
#include "mmalign/show_json.hpp"
#include "mmalign/subtitles.hpp"
#include "mmalign/synthetic.hpp"
#include "mmalign/topic_eval.hpp"
#include "oracles.hpp"
#include "schema.hpp"

using namespace mmalign;
using Clock = std::chrono::steady_clock;

namespace {

// Counts {50,30,20} give H_norm = 0.937231 under the stated entropy formula,
// so the 0.9433 +/- 1e-4 target cannot hold alongside it.
const std::set<int> kKnownFailures = {5};

struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= tol;
}

// ---------------------------------------------------------------------------

void c1_containment(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 g(101);
  std::size_t total = 0;
  for (int s = 0; s < 100; ++s) {
    const double duration = 600.0 + static_cast<double>(g() % 1200);
    std::vector<TopicBlock> blocks;
    for (double t = 0.0; t + 60.0 <= duration; t += 60.0) {
      TopicBlock b;
      b.block_id = static_cast<int>(blocks.size());
      b.span = TimedSpan(t, t + 60.0);
      blocks.push_back(b);
    }
    const double end = blocks.back().span.end();
    // Poisson arrivals over a range wider than the blocks, so some overflow.
    auto arrivals = [&](double rate) {
      std::exponential_distribution<double> gap(rate);
      std::vector<double> ts;
      for (double t = gap(g); t < end + 5.0; t += gap(g)) ts.push_back(t);
      for (const auto& b : blocks) ts.push_back(b.span.start());
      return ts;
    };
    std::vector<LaughterEvent> laughs;
    for (double t : arrivals(1.0 / 20.0)) laughs.push_back({TimedSpan(t, t + 1.5), LaughType::laughter, 0.5});
    std::vector<ShotFrame> shots;
    for (double t : arrivals(1.0)) shots.push_back({t, ShotLabel::full_shot, 0, 0.5});
    std::vector<PoseFrame> poses;
    for (double t : arrivals(2.0)) poses.push_back(oracle::random_pose(g, t));

    const auto spans = block_spans(blocks);
    const auto show = align_show("s" + std::to_string(s), blocks, laughs, shots, poses);

    auto verify = [&](auto member, auto overflow, auto time_of, std::size_t n_in, const char* what) {
      std::size_t placed = 0;
      for (std::size_t j = 0; j < show.timeline.size(); ++j) {
        for (const auto& e : show.timeline[j].*member) {
          if (oracle::blocks_holding(time_of(e), spans) != std::vector<std::size_t>{j}) {
            o.check(false, std::string(what) + " misplaced in show " + std::to_string(s));
            return;
          }
        }
        placed += (show.timeline[j].*member).size();
      }
      for (const auto& e : show.overflow.*overflow) {
        if (!oracle::blocks_holding(time_of(e), spans).empty()) {
          o.check(false, std::string(what) + " overflow holds an in-range item");
          return;
        }
      }
      placed += (show.overflow.*overflow).size();
      o.check(placed == n_in, std::string(what) + " total not conserved in show " + std::to_string(s));
    };
    verify(&TopicBlock::laugh_events, &Overflow::laugh_events, [](const LaughterEvent& e) { return e.span.start(); },
           laughs.size(), "laugh");
    verify(&TopicBlock::shot_events, &Overflow::shot_events, [](const ShotFrame& e) { return e.time; }, shots.size(),
           "shot");
    verify(&TopicBlock::pose_keypoints, &Overflow::pose_keypoints, [](const PoseFrame& e) { return e.time; },
           poses.size(), "pose");
    total += laughs.size() + shots.size() + poses.size();
  }
  const double secs = seconds_since(t0);
  o.check(secs < 5.0, "runtime " + fmt(secs) + " s");
  o.note(std::to_string(total) + " items, " + fmt(secs, 3) + " s");
}

void c2_kinematics(Outcome& o) {
  std::mt19937_64 g(102);
  auto transformed = [](PoseFrame f, double scale, double dx, double dy) {
    for (auto& p : f.keypoints) {
      if (p.valid()) p = Point2{p.x * scale + dx, p.y * scale + dy};
    }
    f.bbox = BoundingBox{f.bbox.xmin * scale + dx, f.bbox.ymin * scale + dy, f.bbox.xmax * scale + dx,
                         f.bbox.ymax * scale + dy};
    return f;
  };
  std::size_t mismatches = 0, variant = 0, leaks = 0;
  for (int i = 0; i < 1000; ++i) {
    PoseFrame a = oracle::random_pose(g, 0.0);
    PoseFrame b = oracle::random_pose(g, 1.0);
    for (auto& p : b.keypoints) {
      if (g() % 6 == 0) p = Point2{0, 0};
    }
    if (!same(arm_spread(b), oracle::arm_spread(b), 1e-12)) ++mismatches;
    if (!same(trunk_lean(b), oracle::trunk_lean(b), 1e-12)) ++mismatches;
    if (!same(kinetic_energy(b, a), oracle::kinetic_energy(b, a), 1e-12)) ++mismatches;

    const double dx = static_cast<double>(g() % 4000) / 8.0;
    const double dy = static_cast<double>(g() % 4000) / 8.0;
    const PoseFrame a2 = transformed(a, 2.0, dx, dy);
    const PoseFrame b2 = transformed(b, 2.0, dx, dy);
    if (arm_spread(b) != arm_spread(b2) || trunk_lean(b) != trunk_lean(b2) ||
        kinetic_energy(b, a) != kinetic_energy(b2, a2)) {
      ++variant;
    }

    // Moving a joint that is invalid in b must not change anything.
    for (std::size_t k = 0; k < kJointCount; ++k) {
      if (b.keypoints[k].valid()) continue;
      PoseFrame a3 = a;
      a3.keypoints[k] = Point2{a.keypoints[k].x + 17.0, a.keypoints[k].y + 3.0};
      if (kinetic_energy(b, a3) != kinetic_energy(b, a)) ++leaks;
    }
  }
  o.check(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  o.check(variant == 0, std::to_string(variant) + " pairs not invariant");
  o.check(leaks == 0, std::to_string(leaks) + " invalid joints contributed");
  o.note("1000 pairs");
}

void c3_smoothing(Outcome& o) {
  std::mt19937_64 g(103);
  std::size_t bad = 0, n = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<KinematicSample> s;
    double t = 0.0;
    for (int i = 0; i < 1000; ++i) {
      t += (g() % 5 == 0) ? 3.0 : 1.0;
      KinematicSample k;
      k.time = t;
      if (g() % 4 != 0) k.arm_spread = oracle::uniform(g, 0.2, 3.0);
      if (g() % 3 != 0) k.kinetic_energy = oracle::uniform(g, 0.0, 40.0);
      if (g() % 2 != 0) k.trunk_lean = oracle::uniform(g, -30.0, 30.0);
      s.push_back(k);
    }
    const auto out = smooth(s, 30.0);
    std::vector<double> ts;
    std::vector<std::optional<double>> a, e, th;
    for (const auto& k : s) {
      ts.push_back(k.time);
      a.push_back(k.arm_spread);
      e.push_back(k.kinetic_energy);
      th.push_back(k.trunk_lean);
    }
    const auto ra = oracle::windowed_mean(ts, a, 30.0);
    const auto re = oracle::windowed_mean(ts, e, 30.0);
    const auto rt = oracle::windowed_mean(ts, th, 30.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      bad += !same(out[i].arm_spread, ra[i], 1e-12);
      bad += !same(out[i].kinetic_energy, re[i], 1e-12);
      bad += !same(out[i].trunk_lean, rt[i], 1e-12);
      n += 3;
    }
  }
  o.check(bad == 0, std::to_string(bad) + " of " + std::to_string(n) + " values differ");
  o.note(std::to_string(n) + " values");
}

void c4_npmi(Outcome& o) {
  const std::vector<std::vector<std::string>> docs = {{"apple", "banana"}, {"apple", "banana"},
                                                      {"apple", "cherry"}, {"banana"},
                                                      {"cherry", "date", "egg"}, {"date", "egg"}};
  auto pair = [&](const char* a, const char* b) {
    TopicDescriptor d;
    d.topic_id = 0;
    d.top_words = {a, b};
    return npmi_coherence(std::vector<TopicDescriptor>{d}, docs);
  };
  // Hand counts over D = 6: df(apple)=3, df(banana)=3, df(apple,banana)=2, ...
  const double ab = std::log((2.0 / 6.0) / ((3.0 / 6.0) * (3.0 / 6.0))) / -std::log(2.0 / 6.0);
  const double cd = std::log((1.0 / 6.0) / ((2.0 / 6.0) * (2.0 / 6.0))) / -std::log(1.0 / 6.0);
  o.check(std::abs(pair("apple", "banana") - ab) <= 1e-12, "apple/banana");
  o.check(std::abs(pair("cherry", "date") - cd) <= 1e-12, "cherry/date");
  o.check(std::abs(pair("apple", "cherry")) <= 1e-12, "independence limit");
  o.check(std::abs(pair("date", "egg") - 1.0) <= 1e-12, "perfect association limit");
  o.check(pair("apple", "date") == -1.0, "never co-occurring");
  o.note("apple/banana " + fmt(pair("apple", "banana"), 10));
}

std::vector<int> with_counts(std::initializer_list<std::size_t> counts) {
  std::vector<int> ids;
  int t = 0;
  for (auto c : counts) ids.insert(ids.end(), c, t++);
  return ids;
}

void c5_diagnostics(Outcome& o) {
  const auto d = diagnostics_from_topics(with_counts({50, 30, 20}));
  const double formula = -(0.5 * std::log(0.5) + 0.3 * std::log(0.3) + 0.2 * std::log(0.2)) / std::log(3.0);
  o.check(d.s_max == 0.5, "s_max");
  o.check(std::abs(d.H_norm - formula) <= 1e-12, "H_norm differs from the entropy formula");
  o.check(std::abs(d.H_norm - 0.9433) <= 1e-4, "H_norm " + fmt(d.H_norm) + " vs target 0.9433 (formula gives " +
                                                    fmt(formula) + ")");
  o.check(diagnostics_from_topics(with_counts({20, 20, 20, 20, 20})).H_norm == 1.0, "uniform H_norm != 1");
  o.check(!diagnostics_from_topics(with_counts({10, 10, 10, 10, 10, 10, 10, 10, 10})).valid, "K=9 accepted");
  o.check(!diagnostics_from_topics(with_counts({36, 8, 8, 8, 8, 8, 8, 8, 8})).valid, "s_max=0.36 accepted");
  o.check(diagnostics_from_topics(with_counts({10, 10, 10, 10, 10, 10, 10, 10, 10, 10})).valid, "K=10 uniform rejected");
  o.note("H_norm " + fmt(d.H_norm));
}

void c6_postprocess(Outcome& o) {
  std::mt19937_64 g(106);
  auto unit = [&](std::size_t dim) {
    std::normal_distribution<double> n;
    Embedding v(dim);
    double ss = 0.0;
    for (auto& x : v) x = n(g), ss += x * x;
    for (auto& x : v) x /= std::sqrt(ss);
    return v;
  };
  std::size_t bad = 0, reassigned = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TopicDescriptor> cents;
    for (int k = 0; k < 5; ++k) {
      TopicDescriptor d;
      d.topic_id = k;
      d.centroid = unit(16);
      cents.push_back(d);
    }
    std::vector<TopicAssignment> rows;
    for (int i = 0; i < 30; ++i) rows.push_back({i, g() % 3 == 0 ? 2 : kOutlierTopic, unit(16)});
    const auto out = centroid_reassign(rows, cents, kDefaultCentroidThreshold);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      int expect = rows[i].topic_id;
      if (expect == kOutlierTopic) {
        double best = -2.0;
        int arg = kOutlierTopic;
        for (const auto& c : cents) {
          double cos = 0.0;
          for (std::size_t j = 0; j < 16; ++j) cos += rows[i].embedding[j] * c.centroid[j];
          if (cos > best) best = cos, arg = c.topic_id;
        }
        if (best >= kDefaultCentroidThreshold) expect = arg, ++reassigned;
      }
      bad += out[i].topic_id != expect;
    }
  }
  o.check(bad == 0, std::to_string(bad) + " reassignment mismatches");
  o.check(gap_fill(std::vector<int>{4, -1, 4}) == std::vector<int>{4, 4, 4}, "[4,-1,4]");
  o.check(gap_fill(std::vector<int>{4, -1, 7}) == std::vector<int>{4, -1, 7}, "[4,-1,7]");
  o.check(gap_fill(std::vector<int>{4, -1, -1, 4}) == std::vector<int>{4, -1, -1, 4}, "[4,-1,-1,4]");
  o.note(std::to_string(reassigned) + " outliers reassigned");
}

void c7_coverage(Outcome& o) {
  const auto show = fixture::block58_show();
  const auto& b = show.timeline[0];
  const double r = coverage(b.laugh_events, b.span);
  o.check(std::abs(r - 3.2 / 60.0) <= 1e-9, "block 58 coverage " + fmt(r, 12));
  o.check(std::abs(r - 0.05333) <= 1e-5, "block 58 vs 0.05333");
  std::mt19937_64 g(107);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LaughterEvent> ev;
    for (int i = 0; i < 12; ++i) {
      const double s = std::max(0.0, oracle::uniform(g, -10, 70));
      ev.push_back({TimedSpan(s, s + oracle::uniform(g, 0.1, 8)), LaughType::laughter, 1});
    }
    worst = std::max(worst, std::abs(coverage(ev, TimedSpan(0, 60)) - oracle::raster_coverage(ev, 0, 60)));
  }
  o.check(worst <= 1e-3, "raster deviation " + fmt(worst));
  o.note("r = " + fmt(r, 10) + ", raster max dev " + fmt(worst, 3));
}

void c8_metrics(Outcome& o) {
  using namespace onset;
  std::mt19937_64 g(108);
  std::size_t bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(trial) * 17;
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(static_cast<double>(g() % 9) / 9.0);
      y.push_back(static_cast<int>(g() % 3 == 0));
    }
    y[0] = 1, y[1] = 0;
    bad += auroc(s, y) != oracle::pairwise_auroc(s, y);
  }
  o.check(bad == 0, std::to_string(bad) + " AUROC sets differ");
  std::size_t ap_bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + g() % 1000;
    std::vector<int> y(n);
    std::size_t pos = 0;
    for (auto& v : y) v = static_cast<int>(g() % 5 == 0), pos += static_cast<std::size_t>(v);
    if (pos == 0) y[0] = 1, pos = 1;
    const std::vector<double> s(n, 0.5);
    ap_bad += average_precision(s, y) != static_cast<double>(pos) / static_cast<double>(n);
  }
  o.check(ap_bad == 0, "constant-score AUPRC != positive rate");
  const std::vector<double> s = {0.9, 0.7, 0.4, 0.2, 0.1};
  const std::vector<int> y = {1, 1, 0, 0, 0};
  o.check(auroc(s, y) == 1.0 && average_precision(s, y) == 1.0, "perfect ranking");
}

struct SynthCorpus {
  std::vector<ShowTimeline> shows;

  explicit SynthCorpus(std::size_t n, double duration) {
    synth::Config cfg;
    cfg.n_shows = n;
    cfg.duration = duration;
    for (const auto& s : synth::generate_corpus(cfg)) shows.push_back(synth::to_timeline(s));
  }
};

void c9_determinism(Outcome& o) {
  SynthCorpus c(6, 900);
  PipelineConfig cfg;
  Warnings w;
  const auto a = pipeline::run_onset(c.shows, cfg, &w);
  cfg.jobs = 4;
  const auto b = pipeline::run_onset(c.shows, cfg, &w);
  o.check(a.ablation_csv == b.ablation_csv, "ablation.csv differs between runs");
  o.check(a.split_json == b.split_json, "split differs between runs");

  std::set<std::string> seen;
  for (const auto& [id, fold] : a.result.split.fold_of) o.check(seen.insert(id).second, "show in two folds");
  o.check(seen.size() == c.shows.size(), "not every show assigned");
  std::size_t n = 0;
  for (onset::Fold f : {onset::Fold::train, onset::Fold::val, onset::Fold::test}) n += a.result.split.size(f);
  o.check(n == c.shows.size(), "fold sizes do not sum to the show count");

  // Guard: a train-only PCA differs from one that also sees held-out shows.
  const auto allowed = pipeline::parse_shot_filter(cfg.shot_filter);
  std::vector<std::vector<KinematicSample>> kin;
  for (const auto& s : c.shows) kin.push_back(pipeline::onset_kinematics(s, allowed, &w));
  std::vector<onset::BenchShow> in;
  for (std::size_t i = 0; i < c.shows.size(); ++i) in.push_back({&c.shows[i], kin[i]});
  const auto bcfg = pipeline::bench_config(cfg);
  const auto table = onset::build_anchor_table(in, bcfg);
  auto is_train = [&](std::size_t s) { return a.result.split.fold_of.at(c.shows[s].show_id) == onset::Fold::train; };
  const auto clean = onset::fit_text_pca(in, table, onset::kTextDim, is_train);
  const auto leaky = onset::fit_text_pca(in, table, onset::kTextDim, [](std::size_t) { return true; });
  const double diff = (clean.mean() - leaky.mean()).norm();
  o.check(diff > 1e-9, "leaky and train-only PCA coincide");
  o.note("csv " + std::to_string(a.ablation_csv.size()) + " bytes identical, PCA mean gap " + fmt(diff, 3));
}

void c10_recovery(Outcome& o) {
  const auto t0 = Clock::now();
  SynthCorpus c(10, 1800);
  PipelineConfig cfg;
  Warnings w;
  const auto full = pipeline::run_onset(c.shows, cfg, &w);
  double hist = 0.0, all = 0.0;
  for (const auto& row : full.result.rows) {
    if (row.set == onset::FeatureSet::history) hist = row.metrics.auroc;
    if (row.set == onset::FeatureSet::all) all = row.metrics.auroc;
  }
  const auto allowed = pipeline::parse_shot_filter(cfg.shot_filter);
  std::vector<std::vector<KinematicSample>> kin;
  for (const auto& s : c.shows) kin.push_back(pipeline::onset_kinematics(s, allowed, &w));
  std::vector<onset::BenchShow> in;
  for (std::size_t i = 0; i < c.shows.size(); ++i) in.push_back({&c.shows[i], kin[i]});
  auto bcfg = pipeline::bench_config(cfg);
  bcfg.permute_train_labels = true;
  const std::array<onset::FeatureSet, 1> only = {onset::FeatureSet::history};
  const auto perm = onset::run_ablation(in, only, bcfg, onset::FeatureSet::history);
  const double control = perm.rows[0].metrics.auroc;
  const double secs = seconds_since(t0);
  o.check(hist >= 0.75, "history-only AUROC " + fmt(hist));
  o.check(control <= 0.55, "permuted-label AUROC " + fmt(control));
  o.check(hist > control, "history-only does not beat the control");
  o.check(all >= hist - 0.01, "feature-complete AUROC " + fmt(all));
  o.check(secs < 120.0, "runtime " + fmt(secs) + " s");
  o.note("history " + fmt(hist, 4) + ", permuted " + fmt(control, 4) + ", all " + fmt(all, 4) + ", " + fmt(secs, 3) +
         " s");
}

void c11_structure(Outcome& o) {
  SynthCorpus c(4, 600);
  PipelineConfig cfg;
  Warnings w;
  const auto a = pipeline::run_onset(c.shows, cfg, &w);
  std::istringstream csv(a.ablation_csv);
  std::string header, line;
  std::getline(csv, header);
  std::vector<std::string> names;
  while (std::getline(csv, line)) names.push_back(line.substr(0, line.find(',')));
  o.check(names == std::vector<std::string>{"history-only", "text-only", "vision-only", "text+vision", "text+vision+history"},
          "ablation rows");
  o.check(header.find("positive_rate") != std::string::npos, "positive_rate column");
  o.check(nlohmann::json::parse(a.split_json).contains("positive_rate"), "positive_rate in split.json");
  o.check(onset::kHistoryDim == 10 && onset::kTextDim == 64 && onset::kVisionDim == 20, "feature dims");
  const auto anchor = onset::sample_anchors(c.shows[0]).front();
  o.check(anchor.history.size() == 10 && anchor.vision.size() == 20 && anchor.text.size() == 64,
          "anchor vector lengths");
  std::size_t schema_errors = 0;
  for (const auto& s : c.shows) schema_errors += schema::validate(nlohmann::json::parse(serialize_show(s))).size();
  schema_errors += schema::validate(nlohmann::json::parse(serialize_show(fixture::block58_show()))).size();
  o.check(schema_errors == 0, std::to_string(schema_errors) + " schema errors");
  o.note("positive_rate " + fmt(a.result.positive_rate, 4) + ", " + std::to_string(a.result.n_anchors) + " anchors");
}

SubtitleCue cue_at(double s, const std::string& text) {
  SubtitleCue c;
  c.span = TimedSpan(s, s + 1.0);
  c.raw_text = text;
  c.clean_text = clean_cue_text(text);
  return c;
}

void c12_subtitles(Outcome& o) {
  std::mt19937_64 g(112);
  std::size_t bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cues = oracle::random_cues(g, 10 + trial * 9);
    const auto srt = parse_srt(write_srt(cues));
    const auto vtt = parse_vtt(write_vtt(cues));
    if (srt.size() != cues.size() || srt != vtt) {
      ++bad;
      continue;
    }
    std::string joined_cues, joined_blocks;
    for (std::size_t i = 0; i < cues.size(); ++i) {
      if (srt[i].span != cues[i].span || srt[i].raw_text != cues[i].raw_text) ++bad;
      const auto t = clean_cue_text(cues[i].raw_text);
      if (t.empty()) continue;
      joined_cues += (joined_cues.empty() ? "" : " ") + t;
    }
    for (const auto& b : build_blocks(srt, 60.0)) {
      if (!b.text.empty()) joined_blocks += (joined_blocks.empty() ? "" : " ") + b.text;
    }
    bad += joined_cues != joined_blocks;
  }
  o.check(bad == 0, std::to_string(bad) + " files broke conservation or equivalence");
  const std::vector<SubtitleCue> cues = {cue_at(0, "a"), cue_at(30, "b"), cue_at(59, "c"), cue_at(61, "d")};
  const auto blocks = build_blocks(cues, 60.0);
  o.check(blocks.size() == 2 && blocks[0].text == "a b c" && blocks[1].text == "d", "0/30/59/61 split");
  o.note("20 files");
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"containment partition", c1_containment},
      {"kinematics oracles", c2_kinematics},
      {"smoothing equivalence", c3_smoothing},
      {"NPMI", c4_npmi},
      {"topic diagnostics", c5_diagnostics},
      {"post-processing", c6_postprocess},
      {"coverage", c7_coverage},
      {"metrics", c8_metrics},
      {"benchmark determinism and hygiene", c9_determinism},
      {"synthetic signal recovery", c10_recovery},
      {"output structure", c11_structure},
      {"subtitle conservation", c12_subtitles},
  };
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = o.failures.empty();
    std::string detail;
    for (const auto& f : o.failures) detail += (detail.empty() ? "" : "; ") + f;
    if (pass) {
      for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    }
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, criteria[i].first, detail.c_str());
    if (!pass) {
      ++failed;
      if (strict || !kKnownFailures.count(id)) ++unexpected;
    }
  }
  std::printf("%d/%zu passed", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (failed > unexpected) std::printf(", %d known failure(s) documented in README", failed - unexpected);
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
