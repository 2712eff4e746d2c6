// mmalign command-line front end. Data goes to files; logs go to stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmalign/pipeline.hpp"

namespace {

using namespace mmalign;
namespace pl = mmalign::pipeline;

void log(const std::string& msg) { std::cerr << "mmalign: " << msg << "\n"; }

void report_warnings(const Warnings& w) {
  if (w.empty()) return;
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < w.messages.size() && i < kShown; ++i) log("warning: " + w.messages[i]);
  if (w.messages.size() > kShown) log("... " + std::to_string(w.messages.size() - kShown) + " more warnings");
  log(std::to_string(w.count()) + " warning(s)");
}

/// Config file first, then any flag the user actually passed.
struct Settings {
  std::string config_path;
  std::map<std::string, std::string> flags;
  PipelineConfig resolve(const std::map<std::string, CLI::Option*>& opts) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = parse_config(read_file(config_path));
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) apply_setting(cfg, key, flags[key]);
    }
    cfg.validate();
    return cfg;
  }
};

std::string jsonl_of(const std::vector<TextBlock>& blocks) {
  std::string out;
  for (const auto& b : blocks) out += to_json(b).dump() + "\n";
  return out;
}

// topic-eval --candidates: one sub-directory per candidate block size, each
// holding assignments.jsonl (optionally with show_id and tokens/text per
// row) and an optional descriptors.json.
struct Candidate {
  int size = 0;
  std::vector<std::string> show_of_row;
  std::vector<TopicAssignment> rows;
  std::vector<std::vector<std::string>> docs;
  std::vector<TopicDescriptor> descriptors;
};

Candidate load_candidate(const fs::path& dir, Warnings* warnings) {
  Candidate c;
  const std::string name = dir.filename().string();
  try {
    std::size_t used = 0;
    c.size = std::stoi(name, &used);
    if (used != name.size()) throw std::invalid_argument(name);
  } catch (const std::exception&) {
    throw InputError(dir.string() + ": candidate directories must be named by block size in seconds");
  }
  const fs::path file = dir / "assignments.jsonl";
  const auto records = parse_jsonl(read_file(file), file.string());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = file.string() + ":" + std::to_string(i + 1);
    c.rows.push_back(topic_assignment_from_json(records[i], path, warnings));
    const auto& j = records[i];
    c.show_of_row.push_back(j.contains("show_id") && j["show_id"].is_string() ? j["show_id"].get<std::string>() : "");
    if (j.contains("tokens") && j["tokens"].is_array()) {
      std::vector<std::string> toks;
      for (const auto& t : j["tokens"]) {
        if (t.is_string()) toks.push_back(t.get<std::string>());
      }
      c.docs.push_back(std::move(toks));
    } else if (j.contains("text") && j["text"].is_string()) {
      c.docs.push_back(tokenize(j["text"].get<std::string>()));
    }
  }
  const fs::path desc = dir / "descriptors.json";
  if (fs::is_regular_file(desc)) {
    Json doc;
    try {
      doc = Json::parse(read_file(desc));
    } catch (const Json::parse_error& e) {
      throw InputError(desc.string() + ": " + e.what());
    }
    c.descriptors = descriptors_from_json(doc, desc.string(), warnings);
  }
  return c;
}

int run_topic_eval(const fs::path& candidates_dir, const fs::path& out_dir, const PipelineConfig& cfg,
                   Warnings* warnings) {
  if (!fs::is_directory(candidates_dir)) throw InputError(candidates_dir.string() + ": not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(candidates_dir)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  if (dirs.empty()) throw InputError(candidates_dir.string() + ": no candidate directories");
  std::map<int, Candidate> cands;
  std::map<int, ModelCandidate> models;
  for (const auto& d : dirs) {
    auto c = load_candidate(d, warnings);
    ModelCandidate m;
    m.diagnostics = diagnostics(c.rows);
    bool have_words = false;
    for (const auto& t : c.descriptors) have_words = have_words || !t.top_words.empty();
    if (have_words && !c.docs.empty()) {
      NpmiOptions opt;
      opt.seed = cfg.seed;
      m.diagnostics = with_coherence(m.diagnostics, npmi_coherence(c.descriptors, c.docs, opt));
    }
    m.assignments = c.rows;
    models[c.size] = std::move(m);
    cands[c.size] = std::move(c);
  }

  Json report = Json::object();
  Json per = Json::object();
  for (const auto& [size, m] : models) per[std::to_string(size)] = to_json(m.diagnostics);
  report["candidates"] = std::move(per);
  const int chosen = select_model(models);
  report["selected_block_size"] = chosen;
  report["centroid_threshold"] = cfg.centroid_threshold;

  // Reassign and gap-fill the selected candidate, one show at a time.
  const auto& c = cands.at(chosen);
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    if (!rows_of.count(c.show_of_row[i])) order.push_back(c.show_of_row[i]);
    rows_of[c.show_of_row[i]].push_back(i);
  }
  std::vector<TopicDescriptor> centroids;
  for (const auto& d : c.descriptors) {
    if (!d.centroid.empty()) centroids.push_back(d);
  }
  if (centroids.empty()) centroids = compute_centroids(c.rows);
  std::string out;
  for (const auto& show : order) {
    std::vector<TopicAssignment> rows;
    for (auto i : rows_of[show]) rows.push_back(c.rows[i]);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.block_index < b.block_index; });
    const auto fixed = pl::postprocess_topics(rows, centroids, cfg.centroid_threshold);
    for (const auto& a : fixed) {
      Json j = to_json(a);
      if (!show.empty()) j["show_id"] = show;
      out += j.dump() + "\n";
    }
  }
  write_file_atomic(out_dir / "topic_eval.json", report.dump(1) + "\n");
  write_file_atomic(out_dir / "assignments.jsonl", out);
  log("topic-eval: selected block size " + std::to_string(chosen) + " s");
  return 0;
}

struct CorpusRun {
  std::vector<pl::ShowFiles> files;
  std::vector<pl::AlignedShow> shows;
  std::vector<TopicDescriptor> descriptors;
};

CorpusRun align_corpus(const fs::path& corpus, const PipelineConfig& cfg, Warnings* warnings) {
  CorpusRun run;
  run.files = pl::discover_corpus(corpus, warnings);
  const fs::path desc = corpus / "descriptors.json";
  if (fs::is_regular_file(desc)) {
    Json doc;
    try {
      doc = Json::parse(read_file(desc));
    } catch (const Json::parse_error& e) {
      throw InputError(desc.string() + ": " + e.what());
    }
    run.descriptors = descriptors_from_json(doc, desc.string(), warnings);
  }
  const auto stopwords = pl::load_stopword_sources(cfg.stopword_files);
  const auto centroids = pl::with_corpus_centroids(run.files, run.descriptors, warnings);
  run.shows = pl::parallel_map<pl::AlignedShow>(
      run.files.size(), cfg.jobs,
      [&](std::size_t i, Warnings* w) { return pl::process_show(run.files[i], cfg, stopwords, centroids, w); },
      warnings);
  return run;
}

void write_unified(const fs::path& dir, const std::vector<pl::AlignedShow>& shows) {
  for (const auto& s : shows) write_file_atomic(dir / (s.show.show_id + ".json"), serialize_show(s.show));
}

std::vector<std::vector<KinematicSample>> analysis_kinematics(const std::vector<ShowTimeline>& shows,
                                                              const PipelineConfig& cfg, Warnings* warnings) {
  const auto allowed = pl::parse_shot_filter(cfg.shot_filter);
  std::vector<std::vector<KinematicSample>> out;
  for (const auto& s : shows) {
    out.push_back(pl::kinematics(all_pose_frames(s), all_shot_frames(s), allowed, cfg.smoothing_window, warnings));
  }
  return out;
}

void write_analysis(const fs::path& dir, const pl::AnalysisTables& t) {
  write_file_atomic(dir / "topic_profiles.csv", t.topic_profiles_csv);
  write_file_atomic(dir / "correlations.csv", t.correlations_csv);
  write_file_atomic(dir / "clustermap.csv", t.clustermap_csv);
}

void write_onset(const fs::path& dir, const pl::OnsetArtifacts& a) {
  write_file_atomic(dir / "ablation.csv", a.ablation_csv);
  write_file_atomic(dir / "split.json", a.split_json);
  write_file_atomic(dir / "model.json", a.model_json);
}

void log_onset(const pl::OnsetArtifacts& a) {
  log("onset-bench: " + std::to_string(a.result.n_anchors) + " anchors, positive rate " +
      format_double(a.result.positive_rate));
  for (const auto& r : a.result.rows) {
    log("  " + onset::table_name(r.set) + ": AUROC " + format_double(r.metrics.auroc) + ", AUPRC " +
        format_double(r.metrics.auprc) + ", F1 " + format_double(r.metrics.f1));
  }
}

std::string anchors_csv(const std::vector<ShowTimeline>& shows, const PipelineConfig& cfg, Warnings* warnings) {
  const auto allowed = pl::parse_shot_filter(cfg.shot_filter);
  std::vector<std::vector<KinematicSample>> kin;
  for (const auto& s : shows) kin.push_back(pl::onset_kinematics(s, allowed, warnings));
  std::vector<onset::BenchShow> inputs;
  for (std::size_t i = 0; i < shows.size(); ++i) inputs.push_back({&shows[i], kin[i]});
  const auto table = onset::build_anchor_table(inputs, pl::bench_config(cfg));
  std::vector<std::string> header = {"show_id", "t", "label"};
  for (const auto& n : onset::history_feature_names()) header.push_back(n);
  for (const auto& n : onset::vision_feature_names()) header.push_back(n);
  std::string out = csv_row(header);
  for (const auto& a : table.anchors) {
    std::vector<std::string> row = {a.show_id, format_double(a.t), a.label ? "1" : "0"};
    for (double v : a.history) row.push_back(format_double(v));
    for (double v : a.vision) row.push_back(format_double(v));
    out += csv_row(row);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal alignment and laughter analytics for stand-up recordings"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  std::map<std::string, CLI::Option*> cfg_opts;
  app.add_option("--config", settings.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cfg_opts["jobs"] = app.add_option("--jobs", settings.flags["jobs"], "Worker threads (output does not depend on it)");

  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    cfg_opts[key] = sub->add_option(name, settings.flags[key], help);
  };

  // parse-subs
  std::string in_path, out_path;
  auto* parse_subs = app.add_subcommand("parse-subs", "Subtitle file to duration-targeted text blocks (JSON-lines)");
  parse_subs->add_option("input", in_path, ".srt or .vtt file")->required()->check(CLI::ExistingFile);
  parse_subs->add_option("-o,--output", out_path, "Output JSON-lines")->required();
  flag(parse_subs, "--target-duration", "target_duration", "Block duration in seconds");
  flag(parse_subs, "--stopwords", "stopwords", "Comma-separated list names (english, fillers-v1) or files");

  // merge-laughs
  auto* merge = app.add_subcommand("merge-laughs", "Window scores to merged laughter events (JSON-lines)");
  merge->add_option("input", in_path, "Window scores or events, JSON-lines")->required()->check(CLI::ExistingFile);
  merge->add_option("-o,--output", out_path, "Output JSON-lines")->required();
  flag(merge, "--threshold", "laugh_threshold", "Positive-window probability threshold");

  // kinematics
  std::string poses_path, shots_path;
  bool raw_kin = false;
  auto* kin = app.add_subcommand("kinematics", "Pose keypoints to arm spread, kinetic energy and trunk lean");
  kin->add_option("--poses", poses_path, "Pose frames, JSON-lines")->required()->check(CLI::ExistingFile);
  kin->add_option("--shots", shots_path, "Shot frames, JSON-lines")->check(CLI::ExistingFile);
  kin->add_option("-o,--output", out_path, "Output JSON-lines")->required();
  kin->add_flag("--raw", raw_kin, "Skip smoothing");
  flag(kin, "--window", "smoothing_window", "Smoothing window in seconds");
  flag(kin, "--shot-filter", "shot_filter", "Comma-separated shot labels whose frames are kept");

  // align
  std::string corpus, out_dir;
  auto* align = app.add_subcommand("align", "Raw corpus to one unified JSON per show");
  align->add_option("--corpus", corpus, "Raw corpus directory")->required()->check(CLI::ExistingDirectory);
  align->add_option("--out", out_dir, "Output directory")->required();
  flag(align, "--target-duration", "target_duration", "Block duration in seconds");
  flag(align, "--threshold", "laugh_threshold", "Laughter window threshold");
  flag(align, "--centroid-threshold", "centroid_threshold", "Outlier reassignment cosine threshold");

  // topic-eval
  std::string candidates;
  auto* topic = app.add_subcommand("topic-eval", "Topic diagnostics, model selection and outlier post-processing");
  topic->add_option("--candidates", candidates, "Directory of candidate block sizes")
      ->required()
      ->check(CLI::ExistingDirectory);
  topic->add_option("--out", out_dir, "Output directory")->required();
  flag(topic, "--threshold", "centroid_threshold", "Outlier reassignment cosine threshold");
  flag(topic, "--seed", "seed", "Seed for document subsampling");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Topic profiles, correlations and clustermap tables");
  analyze->add_option("--corpus", corpus, "Directory of unified show JSONs")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", out_dir, "Output directory")->required();
  flag(analyze, "--window", "smoothing_window", "Kinematic smoothing window in seconds");
  flag(analyze, "--shot-filter", "shot_filter", "Comma-separated shot labels for pose frames");

  // onset-bench
  bool dump_anchors = false;
  auto* bench = app.add_subcommand("onset-bench", "Laughter onset prediction benchmark with feature ablation");
  bench->add_option("--corpus", corpus, "Directory of unified show JSONs")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--out", out_dir, "Output directory")->required();
  flag(bench, "--delta", "delta", "Onset horizon in seconds");
  flag(bench, "--step", "step", "Anchor step in seconds");
  flag(bench, "--window", "history_window", "History window in seconds");
  flag(bench, "--seed", "seed", "Split seed");
  flag(bench, "--feature-set", "feature_set", "Model to save: all, history, text, vision or text+vision");
  flag(bench, "--classifier", "classifier", "gbdt or logistic");
  flag(bench, "--split-ratios", "split_ratios", "train,val,test fractions");
  bench->add_flag("--dump-anchors", dump_anchors, "Also write anchors.csv");

  // all
  auto* all = app.add_subcommand("all", "Every stage over a raw corpus");
  all->add_option("--corpus", corpus, "Raw corpus directory")->required()->check(CLI::ExistingDirectory);
  all->add_option("--out", out_dir, "Output directory")->required();
  flag(all, "--seed", "seed", "Seed");

  // synth
  synth::Config synth_cfg;
  auto* gen = app.add_subcommand("synth", "Write a synthetic raw corpus");
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--shows", synth_cfg.n_shows, "Number of shows");
  gen->add_option("--duration", synth_cfg.duration, "Show length in seconds");
  gen->add_option("--seed", synth_cfg.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Warnings warnings;
  int code = 0;
  try {
    const PipelineConfig cfg = settings.resolve(cfg_opts);
    if (*parse_subs) {
      const auto blocks = pl::parse_subs(in_path, cfg.target_duration, pl::load_stopword_sources(cfg.stopword_files),
                                         &warnings);
      write_file_atomic(out_path, jsonl_of(blocks));
      log("parse-subs: " + std::to_string(blocks.size()) + " blocks");
    } else if (*merge) {
      const auto events = laughter_from_jsonl(read_file(in_path), in_path, cfg.laugh_threshold, &warnings);
      write_file_atomic(out_path, write_jsonl(events));
      log("merge-laughs: " + std::to_string(events.size()) + " events");
    } else if (*kin) {
      const auto poses = pl::read_poses(poses_path, &warnings);
      std::vector<ShotFrame> shots;
      if (!shots_path.empty()) shots = pl::read_shots(shots_path, &warnings);
      std::optional<double> window;
      if (!raw_kin) window = cfg.smoothing_window;
      const auto samples = pl::kinematics(poses, shots, pl::parse_shot_filter(cfg.shot_filter), window, &warnings);
      write_file_atomic(out_path, write_jsonl(samples));
      log("kinematics: " + std::to_string(samples.size()) + " samples");
    } else if (*align) {
      const auto run = align_corpus(corpus, cfg, &warnings);
      write_unified(out_dir, run.shows);
      log("align: " + std::to_string(run.shows.size()) + " shows");
    } else if (*topic) {
      code = run_topic_eval(candidates, out_dir, cfg, &warnings);
    } else if (*analyze) {
      const auto shows = pl::load_unified_dir(corpus, &warnings);
      const auto k = analysis_kinematics(shows, cfg, &warnings);
      write_analysis(out_dir, pl::analyze(shows, k, &warnings));
      log("analyze: " + std::to_string(shows.size()) + " shows");
    } else if (*bench) {
      const auto shows = pl::load_unified_dir(corpus, &warnings);
      const auto a = pl::run_onset(shows, cfg, &warnings);
      write_onset(out_dir, a);
      if (dump_anchors) write_file_atomic(fs::path(out_dir) / "anchors.csv", anchors_csv(shows, cfg, &warnings));
      log_onset(a);
    } else if (*all) {
      const fs::path out = out_dir;
      const auto run = align_corpus(corpus, cfg, &warnings);
      std::vector<ShowTimeline> shows;
      std::vector<std::vector<KinematicSample>> kin_series;
      std::vector<std::vector<TopicAssignment>> topics;
      std::vector<std::vector<TextBlock>> blocks;
      for (const auto& s : run.shows) {
        const std::string id = s.show.show_id;
        write_file_atomic(out / "blocks" / (id + ".jsonl"), jsonl_of(s.blocks));
        write_file_atomic(out / "laughter" / (id + ".jsonl"), write_jsonl(s.laughs));
        write_file_atomic(out / "kinematics" / (id + ".jsonl"), write_jsonl(s.kinematics));
        write_file_atomic(out / "topics" / (id + ".jsonl"), write_jsonl(s.topics));
        shows.push_back(s.show);
        kin_series.push_back(s.kinematics);
        topics.push_back(s.raw_topics);
        blocks.push_back(s.blocks);
      }
      write_unified(out / "unified", run.shows);
      const auto eval = pl::evaluate_topics(topics, blocks, run.descriptors, cfg.seed);
      write_file_atomic(out / "topic_eval.json", pl::topic_eval_json(eval).dump(1) + "\n");
      write_analysis(out / "analysis", pl::analyze(shows, kin_series, &warnings));
      const auto a = pl::run_onset(shows, cfg, &warnings);
      write_onset(out / "onset", a);
      log("all: " + std::to_string(shows.size()) + " shows");
      log_onset(a);
    } else if (*gen) {
      pl::write_synthetic_corpus(out_dir, synth_cfg);
      log("synth: wrote " + std::to_string(synth_cfg.n_shows) + " shows to " + out_dir);
    }
  } catch (const Error& e) {
    report_warnings(warnings);
    log(std::string("error: ") + e.what());
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    report_warnings(warnings);
    log(std::string("error: ") + e.what());
    return 1;
  } catch (const std::exception& e) {
    report_warnings(warnings);
    log(std::string("internal error: ") + e.what());
    return 3;
  }
  report_warnings(warnings);
  return code;
}
