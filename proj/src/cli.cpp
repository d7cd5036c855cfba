// wsm/cli.cpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsm/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "wsm/abx.hpp"
#include "wsm/corpus.hpp"
#include "wsm/error.hpp"
#include "wsm/io.hpp"
#include "wsm/network.hpp"
#include "wsm/pairing.hpp"
#include "wsm/prep.hpp"
#include "wsm/rng.hpp"
#include "wsm/structure.hpp"
#include "wsm/svg.hpp"
#include "wsm/synth.hpp"

namespace wsm {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolution order: built-in defaults, then the --config file, then explicit
// flags. A run.json ({"command": ..., "args": {...}}) or a bare args object
// both work as config files.
Json load_config_args(const std::string& path, const std::string& command) {
  const Json doc = read_json_file(path);
  if (doc.contains("args")) {
    const std::string recorded = doc.value("command", command);
    if (recorded != command)
      throw UsageError("config file records command `" + recorded +
                       "`, invoked as `" + command + "`");
    return doc.at("args");
  }
  return doc;
}

template <typename T>
void take(const Json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void write_run_json(const fs::path& path, const std::string& command,
                    const Json& args) {
  Json doc;
  doc["format_version"] = 1;
  doc["command"] = command;
  doc["args"] = args;
  write_json_file(path, doc);
}

fs::path report_run_path(const fs::path& report) {
  fs::path p = report;
  p.replace_extension();
  p += ".run.json";
  return p;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    if (comma == std::string::npos) {
      if (begin < text.size()) out.push_back(text.substr(begin));
      break;
    }
    if (comma > begin) out.push_back(text.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& out, std::uint64_t seed, const Json& cfg_args) {
  SynthConfig cfg = cfg_args.contains("synth")
                        ? SynthConfig::from_json(cfg_args.at("synth"))
                        : SynthConfig::defaults();
  cfg.seed = seed;
  generate_corpus(cfg, out);

  Json args;
  args["out"] = out;
  args["seed"] = seed;
  args["synth"] = cfg.to_json();
  write_run_json(fs::path(out) / "run.json", "synth", args);
  std::cout << "wrote corpus to " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// prepare

int cmd_prepare(const std::string& corpus_path, const std::string& out,
                int window, const std::vector<std::string>& pca_specs) {
  PrepConfig cfg;
  cfg.stack_window = window;
  for (const std::string& spec : pca_specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw UsageError("--pca expects modality=dim, got `" + spec + "`");
    cfg.pca_dims[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
  }
  const Corpus corpus = load_corpus(corpus_path);
  const Preprocessor prep = Preprocessor::fit(corpus, cfg);
  prep.save(out);

  Json args;
  args["corpus"] = corpus_path;
  args["out"] = out;
  args["window"] = window;
  Json pca = Json::object();
  for (const auto& [mod, dim] : cfg.pca_dims) pca[mod] = dim;
  args["pca"] = std::move(pca);
  write_run_json(fs::path(out) / "run.json", "prepare", args);
  std::cout << "fitted preprocessing for " << corpus.modalities.size()
            << " modalities\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& corpus_path, const std::string& out,
              const std::string& mode_name, const std::string& prep_dir,
              std::uint64_t seed, const Json& cfg_args) {
  const TrainMode mode = train_mode_from_name(mode_name);
  if (mode == TrainMode::Raw)
    throw UsageError("`raw` skips training; use it with embed/eval commands");

  const Corpus corpus = load_corpus(corpus_path);
  Preprocessor prep;
  if (!prep_dir.empty()) {
    prep = Preprocessor::load(prep_dir);
  } else {
    PrepConfig prep_cfg;
    if (cfg_args.contains("prep")) {
      prep_cfg.stack_window =
          cfg_args.at("prep").value("window", prep_cfg.stack_window);
    }
    prep = Preprocessor::fit(corpus, prep_cfg);
  }
  prep.save(fs::path(out) / "prep");

  NetConfig net_cfg = cfg_args.contains("net")
                          ? NetConfig::from_json(cfg_args.at("net"))
                          : NetConfig{};
  net_cfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  net_cfg.seed = seed;

  TrainConfig train_cfg = cfg_args.contains("train")
                              ? TrainConfig::from_json(cfg_args.at("train"))
                              : TrainConfig{};
  train_cfg.seed = seed;

  PairStreamConfig stream_cfg;
  stream_cfg.pairs_per_epoch = train_cfg.pairs_per_epoch;
  stream_cfg.mode = mode;
  stream_cfg.seed = seed;
  if (cfg_args.contains("pairing")) {
    const Json& p = cfg_args.at("pairing");
    stream_cfg.heldout_label_fraction =
        p.value("heldout_label_fraction", stream_cfg.heldout_label_fraction);
    stream_cfg.heldout_pairs = p.value("heldout_pairs", stream_cfg.heldout_pairs);
  }

  const PairStream stream(corpus, prep, stream_cfg);
  auto [net, log] = train(init_network(net_cfg), train_cfg, stream);

  Json metadata;
  metadata["mode"] = mode_name;
  metadata["seed"] = seed;
  metadata["corpus"] = corpus_path;
  save_network(fs::path(out) / "model", net, metadata);
  atomic_write_file(fs::path(out) / "trainlog.csv", log.to_csv());

  Json args;
  args["corpus"] = corpus_path;
  args["out"] = out;
  args["mode"] = mode_name;
  args["prep"] = prep_dir;
  args["seed"] = seed;
  args["net"] = net_cfg.to_json();
  args["train"] = train_cfg.to_json();
  args["pairing"] = Json{
      {"heldout_label_fraction", stream_cfg.heldout_label_fraction},
      {"heldout_pairs", stream_cfg.heldout_pairs}};
  write_run_json(fs::path(out) / "run.json", "train", args);

  std::printf("trained %s: %zu epochs, final train loss %.6f\n",
              mode_name.c_str(), log.epochs.size(),
              log.epochs.empty() ? 0.0 : log.epochs.back().train_loss);
  return 0;
}

// ---------------------------------------------------------------------------
// shared embedding source resolution

struct SourceOpts {
  std::string archive_dir;
  std::string model_dir;
  std::string prep_dir;
  std::string mode;  // only "raw" is meaningful here
  std::string mask_spec;
};

EmbeddingArchive resolve_archive(const SourceOpts& src, const Corpus& corpus,
                                 Json& meta) {
  const int provided = (!src.archive_dir.empty() ? 1 : 0) +
                       (!src.model_dir.empty() ? 1 : 0) +
                       (src.mode == "raw" ? 1 : 0);
  if (provided != 1)
    throw UsageError(
        "provide exactly one embedding source: --archive, --model, or "
        "--mode raw with --prep");

  if (!src.archive_dir.empty()) {
    EmbeddingArchive archive = EmbeddingArchive::load(src.archive_dir);
    meta["mode"] = archive.metadata.value("mode", "unknown");
    meta["test_mask"] = archive.metadata.value("test_mask", "unknown");
    return archive;
  }

  if (src.mask_spec.empty())
    throw UsageError("--test-mask is required when embedding on the fly");
  meta["test_mask"] = src.mask_spec;

  if (!src.model_dir.empty()) {
    const Network net = load_network(fs::path(src.model_dir) / "model");
    const Preprocessor prep =
        Preprocessor::load(fs::path(src.model_dir) / "prep");
    const Json model_meta = load_network_metadata(fs::path(src.model_dir) / "model");
    meta["mode"] = model_meta.value("mode", "unknown");
    return embed_corpus(net, corpus,
                        mask_from_spec(corpus.modalities, src.mask_spec), prep);
  }

  if (src.prep_dir.empty())
    throw UsageError("--mode raw needs --prep with a fitted preprocessor");
  const Preprocessor prep = Preprocessor::load(src.prep_dir);
  meta["mode"] = "raw";
  return raw_archive(corpus, mask_from_spec(corpus.modalities, src.mask_spec),
                     prep);
}

// ---------------------------------------------------------------------------
// embed

int cmd_embed(const std::string& corpus_path, const std::string& out,
              const SourceOpts& src) {
  const Corpus corpus = load_corpus(corpus_path);
  Json meta;
  meta["corpus"] = corpus_path;
  EmbeddingArchive archive = resolve_archive(src, corpus, meta);
  archive.metadata = meta;
  archive.save(out);

  Json args;
  args["corpus"] = corpus_path;
  args["out"] = out;
  args["model"] = src.model_dir;
  args["prep"] = src.prep_dir;
  args["mode"] = src.mode;
  args["test-mask"] = src.mask_spec;
  write_run_json(fs::path(out) / "run.json", "embed", args);
  std::cout << "embedded " << archive.sequences.size() << " utterances\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval-abx

int cmd_eval_abx(const std::string& corpus_path, const std::string& report_path,
                 const std::string& task_name, const SourceOpts& src,
                 std::size_t budget, std::uint64_t seed) {
  const Corpus corpus = load_corpus(corpus_path);
  const AbxTask task = abx_task_from_name(task_name);

  Json meta;
  meta["command"] = "eval-abx";
  meta["corpus"] = corpus_path;
  meta["task"] = task_name;
  meta["seed"] = seed;
  meta["budget"] = budget;
  const EmbeddingArchive archive = resolve_archive(src, corpus, meta);

  const std::vector<TriphoneToken> tokens =
      triphone_tokens(corpus, corpus.inventory);
  Rng rng = substream(seed, std::string("triplets.") + task_name);
  const TripletSet triplets =
      build_triplets(tokens, corpus.inventory, task, budget, rng);
  const AbxReport report =
      abx_report(triplets, tokens, archive, corpus.inventory);

  Json doc;
  doc["meta"] = meta;
  doc["abx"] = report.to_json();
  write_json_file(report_path, doc);

  Json args;
  args["corpus"] = corpus_path;
  args["report"] = report_path;
  args["task"] = task_name;
  args["archive"] = src.archive_dir;
  args["model"] = src.model_dir;
  args["prep"] = src.prep_dir;
  args["mode"] = src.mode;
  args["test-mask"] = src.mask_spec;
  args["budget"] = budget;
  args["seed"] = seed;
  write_run_json(report_run_path(report_path), "eval-abx", args);

  std::printf("%s ABX error: %.4f over %zu triplets\n", task_name.c_str(),
              report.overall_error, report.triplet_count);
  return 0;
}

// ---------------------------------------------------------------------------
// eval-parallelism

int cmd_eval_parallelism(const std::string& corpus_path,
                         const std::string& report_path,
                         const SourceOpts& src) {
  const Corpus corpus = load_corpus(corpus_path);
  Json meta;
  meta["command"] = "eval-parallelism";
  meta["corpus"] = corpus_path;
  const EmbeddingArchive archive = resolve_archive(src, corpus, meta);

  const PhoneCentroids centroids = phone_centroids(archive, corpus);
  const FeatureVectorSets vectors =
      feature_difference_vectors(centroids, corpus.inventory);
  const ParallelismReport report = parallelism_score(vectors);

  Json doc;
  doc["meta"] = meta;
  doc["parallelism"] = report.to_json();
  doc["missing_phones"] = centroids.missing;
  write_json_file(report_path, doc);

  Json args;
  args["corpus"] = corpus_path;
  args["report"] = report_path;
  args["archive"] = src.archive_dir;
  args["model"] = src.model_dir;
  args["prep"] = src.prep_dir;
  args["mode"] = src.mode;
  args["test-mask"] = src.mask_spec;
  write_run_json(report_run_path(report_path), "eval-parallelism", args);

  std::cout << "parallelism scored " << report.features.size() << " features\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval-mcgurk

int cmd_eval_mcgurk(const std::string& corpus_path,
                    const std::string& report_path,
                    const std::string& model_dir,
                    const std::string& audio_phone,
                    const std::string& competitor,
                    const std::string& variants_csv,
                    const std::string& holdout_csv, std::size_t budget,
                    std::uint64_t seed) {
  const Corpus corpus = load_corpus(corpus_path);
  const Network net = load_network(fs::path(model_dir) / "model");
  const Preprocessor prep = Preprocessor::load(fs::path(model_dir) / "prep");

  McGurkConfig cfg;
  cfg.audio_phone = audio_phone;
  cfg.competitor_phone = competitor;
  cfg.visual_variants = split_csv(variants_csv);
  cfg.budget_per_cell = budget;
  if (holdout_csv.empty()) {
    // default: the lexicographically last speaker provides the templates
    cfg.held_out_speakers = {*corpus.speakers.rbegin()};
  } else {
    for (const std::string& s : split_csv(holdout_csv)) {
      if (corpus.speakers.count(s) == 0)
        fail(ErrorCode::InvalidArgument, "held-out speaker `" + s +
                                             "` not in corpus");
      cfg.held_out_speakers.insert(s);
    }
  }

  Rng rng = substream(seed, "mcgurk");
  const McGurkReport report = mcgurk_eval(net, corpus, cfg, prep, rng);

  Json meta;
  meta["command"] = "eval-mcgurk";
  meta["corpus"] = corpus_path;
  meta["model"] = model_dir;
  meta["mode"] =
      load_network_metadata(fs::path(model_dir) / "model").value("mode", "unknown");
  meta["seed"] = seed;
  Json doc;
  doc["meta"] = meta;
  doc["mcgurk"] = report.to_json();
  write_json_file(report_path, doc);

  Json args;
  args["corpus"] = corpus_path;
  args["report"] = report_path;
  args["model"] = model_dir;
  args["audio-phone"] = audio_phone;
  args["competitor"] = competitor;
  args["variants"] = variants_csv;
  args["holdout"] = holdout_csv;
  args["budget"] = budget;
  args["seed"] = seed;
  write_run_json(report_run_path(report_path), "eval-mcgurk", args);

  for (const auto& v : report.variants)
    std::printf("visual %-4s accuracy %.4f (%zu triplets)\n",
                v.variant.c_str(), v.accuracy, v.triplets);
  return 0;
}

// ---------------------------------------------------------------------------
// report aggregation

int cmd_report(const std::string& out, const std::vector<std::string>& inputs) {
  struct AbxEntry {
    std::string mode, mask, task;
    AbxReport report;
  };
  struct ParEntry {
    std::string mode, mask;
    Json per_feature;
  };
  std::vector<AbxEntry> abx_entries;
  std::vector<ParEntry> par_entries;
  std::vector<Json> mcgurk_entries;

  for (const std::string& input : inputs) {
    const Json doc = read_json_file(input);
    const Json meta = doc.value("meta", Json::object());
    if (doc.contains("abx")) {
      abx_entries.push_back({meta.value("mode", "unknown"),
                             meta.value("test_mask", "unknown"),
                             meta.value("task", "unknown"),
                             AbxReport::from_json(doc.at("abx"))});
    } else if (doc.contains("parallelism")) {
      par_entries.push_back({meta.value("mode", "unknown"),
                             meta.value("test_mask", "unknown"),
                             doc.at("parallelism").at("per_feature")});
    } else if (doc.contains("mcgurk")) {
      Json entry = doc.at("mcgurk");
      entry["mode"] = meta.value("mode", "unknown");
      mcgurk_entries.push_back(std::move(entry));
    }
  }

  fs::create_directories(out);

  // Overall error matrix: rows task x test mask, one column per condition.
  if (!abx_entries.empty()) {
    const std::vector<std::string> modes = {"raw", "mono-a", "mono-v",
                                            "mono-av", "multi"};
    std::string csv = "task,test";
    for (const std::string& m : modes) csv += "," + m;
    csv += "\n";
    for (const std::string& task : {"within", "across"}) {
      for (const std::string& mask : {"a", "v", "av"}) {
        std::string row = std::string(task) + "," + mask;
        bool any = false;
        for (const std::string& mode : modes) {
          const AbxEntry* found = nullptr;
          for (const AbxEntry& e : abx_entries)
            if (e.mode == mode && e.mask == mask && e.task == task) found = &e;
          if (found != nullptr) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f",
                          100.0 * found->report.overall_error);
            row += std::string(",") + buf;
            any = true;
          } else {
            row += ",";
          }
        }
        if (any) csv += row + "\n";
      }
    }
    atomic_write_file(fs::path(out) / "table2.csv", csv);

    // Per-feature ABX accuracy chart.
    std::vector<std::string> features;
    for (const AbxEntry& e : abx_entries)
      for (const auto& f : e.report.per_feature)
        if (std::find(features.begin(), features.end(), f.feature) ==
            features.end())
          features.push_back(f.feature);
    std::vector<BarSeries> series;
    for (const AbxEntry& e : abx_entries) {
      BarSeries s;
      s.label = e.mode + " tested " + e.mask + " (" + e.task + ")";
      for (const std::string& feature : features) {
        double value = std::nan("");
        for (const auto& f : e.report.per_feature)
          if (f.feature == feature) value = f.accuracy;
        s.values.push_back(value);
      }
      series.push_back(std::move(s));
    }
    write_grouped_bar_svg(fs::path(out) / "fig3.svg",
                          "ABX accuracy by phonological feature", "accuracy",
                          features, series);
  }

  if (!par_entries.empty()) {
    std::vector<std::string> features;
    for (const ParEntry& e : par_entries)
      for (const auto& f : e.per_feature)
        if (std::find(features.begin(), features.end(),
                      f.at("feature").get<std::string>()) == features.end())
          features.push_back(f.at("feature").get<std::string>());
    std::vector<BarSeries> series;
    for (const ParEntry& e : par_entries) {
      BarSeries s;
      s.label = e.mode + " tested " + e.mask;
      for (const std::string& feature : features) {
        double value = std::nan("");
        for (const auto& f : e.per_feature)
          if (f.at("feature").get<std::string>() == feature)
            value = f.at("score").get<double>();
        s.values.push_back(value);
      }
      series.push_back(std::move(s));
    }
    write_grouped_bar_svg(fs::path(out) / "fig4.svg",
                          "Parallelism score by phonological feature", "score",
                          features, series);
  }

  if (!mcgurk_entries.empty()) {
    std::string csv = "mode,visual_variant,accuracy,triplets\n";
    for (const Json& entry : mcgurk_entries)
      for (const auto& v : entry.at("variants")) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f",
                      v.at("accuracy").get<double>());
        csv += entry.value("mode", "unknown") + "," +
               v.at("visual_variant").get<std::string>() + "," + buf + "," +
               std::to_string(v.at("triplets").get<std::size_t>()) + "\n";
      }
    atomic_write_file(fs::path(out) / "mcgurk.csv", csv);
  }

  Json args;
  args["out"] = out;
  args["inputs"] = inputs;
  write_run_json(fs::path(out) / "run.json", "report", args);
  std::cout << "aggregated " << inputs.size() << " reports into " << out
            << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"weakly supervised multimodal phone representations"};
  app.require_subcommand(1);

  std::string config_path;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_out;
  std::uint64_t synth_seed = 42;
  auto* synth_out_opt = synth->add_option("--out", synth_out, "output directory");
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "root seed");
  synth->add_option("--config", config_path, "JSON config file");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "fit preprocessing");
  std::string prep_corpus, prep_out;
  int prep_window = 7;
  std::vector<std::string> prep_pca;
  auto* prep_corpus_opt = prepare->add_option("--corpus", prep_corpus, "manifest path");
  auto* prep_out_opt = prepare->add_option("--out", prep_out, "output directory");
  auto* prep_window_opt = prepare->add_option("--window", prep_window, "stacking window");
  auto* prep_pca_opt = prepare->add_option("--pca", prep_pca, "modality=dim whitening");
  prepare->add_option("--config", config_path, "JSON config file");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a Siamese network");
  std::string train_corpus, train_out, train_mode, train_prep;
  std::uint64_t train_seed = 42;
  auto* train_corpus_opt = train_cmd->add_option("--corpus", train_corpus, "manifest path");
  auto* train_out_opt = train_cmd->add_option("--out", train_out, "output directory");
  auto* train_mode_opt = train_cmd->add_option(
      "--mode", train_mode, "mono-a | mono-v | mono-av | multi");
  auto* train_prep_opt = train_cmd->add_option(
      "--prep", train_prep, "fitted preprocessor directory (default: fit here)");
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "root seed");
  train_cmd->add_option("--config", config_path, "JSON config file");

  // embed
  auto* embed = app.add_subcommand("embed", "embed a corpus into an archive");
  std::string embed_corpus_path, embed_out, embed_model, embed_prep, embed_mode,
      embed_mask;
  auto* embed_corpus_opt = embed->add_option("--corpus", embed_corpus_path, "manifest path");
  auto* embed_out_opt = embed->add_option("--out", embed_out, "archive directory");
  auto* embed_model_opt = embed->add_option("--model", embed_model, "trained model directory");
  auto* embed_prep_opt = embed->add_option("--prep", embed_prep, "preprocessor (raw mode)");
  auto* embed_mode_opt = embed->add_option("--mode", embed_mode, "`raw` to skip the network");
  auto* embed_mask_opt = embed->add_option("--test-mask", embed_mask, "a | v | av");
  embed->add_option("--config", config_path, "JSON config file");

  // eval-abx
  auto* eabx = app.add_subcommand("eval-abx", "ABX discrimination report");
  std::string eabx_corpus, eabx_report, eabx_task, eabx_archive, eabx_model,
      eabx_prep, eabx_mode, eabx_mask;
  std::size_t eabx_budget = 1000;
  std::uint64_t eabx_seed = 42;
  auto* eabx_corpus_opt = eabx->add_option("--corpus", eabx_corpus, "manifest path");
  auto* eabx_report_opt = eabx->add_option("--report", eabx_report, "report JSON path");
  auto* eabx_task_opt = eabx->add_option("--task", eabx_task, "within | across");
  auto* eabx_archive_opt = eabx->add_option("--archive", eabx_archive, "embedding archive");
  auto* eabx_model_opt = eabx->add_option("--model", eabx_model, "trained model directory");
  auto* eabx_prep_opt = eabx->add_option("--prep", eabx_prep, "preprocessor (raw mode)");
  auto* eabx_mode_opt = eabx->add_option("--mode", eabx_mode, "`raw` to evaluate features");
  auto* eabx_mask_opt = eabx->add_option("--test-mask", eabx_mask, "a | v | av");
  auto* eabx_budget_opt = eabx->add_option("--budget", eabx_budget, "max triplets per cell");
  auto* eabx_seed_opt = eabx->add_option("--seed", eabx_seed, "root seed");
  eabx->add_option("--config", config_path, "JSON config file");

  // eval-parallelism
  auto* epar = app.add_subcommand("eval-parallelism", "parallelism report");
  std::string epar_corpus, epar_report, epar_archive, epar_model, epar_prep,
      epar_mode, epar_mask;
  auto* epar_corpus_opt = epar->add_option("--corpus", epar_corpus, "manifest path");
  auto* epar_report_opt = epar->add_option("--report", epar_report, "report JSON path");
  auto* epar_archive_opt = epar->add_option("--archive", epar_archive, "embedding archive");
  auto* epar_model_opt = epar->add_option("--model", epar_model, "trained model directory");
  auto* epar_prep_opt = epar->add_option("--prep", epar_prep, "preprocessor (raw mode)");
  auto* epar_mode_opt = epar->add_option("--mode", epar_mode, "`raw` to evaluate features");
  auto* epar_mask_opt = epar->add_option("--test-mask", epar_mask, "a | v | av");
  epar->add_option("--config", config_path, "JSON config file");

  // eval-mcgurk
  auto* emcg = app.add_subcommand("eval-mcgurk", "mismatched-visual ABX report");
  std::string emcg_corpus, emcg_report, emcg_model, emcg_audio = "b",
                                                    emcg_comp = "d";
  std::string emcg_variants = "b,p,g", emcg_holdout;
  std::size_t emcg_budget = 1000;
  std::uint64_t emcg_seed = 42;
  auto* emcg_corpus_opt = emcg->add_option("--corpus", emcg_corpus, "manifest path");
  auto* emcg_report_opt = emcg->add_option("--report", emcg_report, "report JSON path");
  auto* emcg_model_opt = emcg->add_option("--model", emcg_model, "trained model directory");
  auto* emcg_audio_opt = emcg->add_option("--audio-phone", emcg_audio, "audio category");
  auto* emcg_comp_opt = emcg->add_option("--competitor", emcg_comp, "competitor category");
  auto* emcg_var_opt = emcg->add_option("--variants", emcg_variants, "visual variants, comma separated");
  auto* emcg_hold_opt = emcg->add_option("--holdout", emcg_holdout,
                                         "template speakers, comma separated");
  auto* emcg_budget_opt = emcg->add_option("--budget", emcg_budget, "max triplets per cell");
  auto* emcg_seed_opt = emcg->add_option("--seed", emcg_seed, "root seed");
  emcg->add_option("--config", config_path, "JSON config file");

  // report
  auto* report_cmd = app.add_subcommand("report", "aggregate report files");
  std::string report_out;
  std::vector<std::string> report_inputs;
  auto* report_out_opt = report_cmd->add_option("--out", report_out, "output directory");
  report_cmd->add_option("inputs", report_inputs, "report JSON files");
  report_cmd->add_option("--config", config_path, "JSON config file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    const Json cfg = config_path.empty()
                         ? Json::object()
                         : load_config_args(config_path, active->get_name());

    if (active == synth) {
      take(cfg, "out", synth_out_opt, synth_out);
      take(cfg, "seed", synth_seed_opt, synth_seed);
      if (synth_out.empty()) throw UsageError("synth needs --out");
      return cmd_synth(synth_out, synth_seed, cfg);
    }
    if (active == prepare) {
      take(cfg, "corpus", prep_corpus_opt, prep_corpus);
      take(cfg, "out", prep_out_opt, prep_out);
      take(cfg, "window", prep_window_opt, prep_window);
      if (prep_pca_opt->count() == 0 && cfg.contains("pca"))
        for (const auto& [mod, dim] : cfg.at("pca").items())
          prep_pca.push_back(mod + "=" + std::to_string(dim.get<int>()));
      if (prep_corpus.empty() || prep_out.empty())
        throw UsageError("prepare needs --corpus and --out");
      return cmd_prepare(prep_corpus, prep_out, prep_window, prep_pca);
    }
    if (active == train_cmd) {
      take(cfg, "corpus", train_corpus_opt, train_corpus);
      take(cfg, "out", train_out_opt, train_out);
      take(cfg, "mode", train_mode_opt, train_mode);
      take(cfg, "prep", train_prep_opt, train_prep);
      take(cfg, "seed", train_seed_opt, train_seed);
      if (train_corpus.empty() || train_out.empty() || train_mode.empty())
        throw UsageError("train needs --corpus, --out and --mode");
      return cmd_train(train_corpus, train_out, train_mode, train_prep,
                       train_seed, cfg);
    }
    if (active == embed) {
      take(cfg, "corpus", embed_corpus_opt, embed_corpus_path);
      take(cfg, "out", embed_out_opt, embed_out);
      take(cfg, "model", embed_model_opt, embed_model);
      take(cfg, "prep", embed_prep_opt, embed_prep);
      take(cfg, "mode", embed_mode_opt, embed_mode);
      take(cfg, "test-mask", embed_mask_opt, embed_mask);
      if (embed_corpus_path.empty() || embed_out.empty())
        throw UsageError("embed needs --corpus and --out");
      return cmd_embed(embed_corpus_path, embed_out,
                       {"", embed_model, embed_prep, embed_mode, embed_mask});
    }
    if (active == eabx) {
      take(cfg, "corpus", eabx_corpus_opt, eabx_corpus);
      take(cfg, "report", eabx_report_opt, eabx_report);
      take(cfg, "task", eabx_task_opt, eabx_task);
      take(cfg, "archive", eabx_archive_opt, eabx_archive);
      take(cfg, "model", eabx_model_opt, eabx_model);
      take(cfg, "prep", eabx_prep_opt, eabx_prep);
      take(cfg, "mode", eabx_mode_opt, eabx_mode);
      take(cfg, "test-mask", eabx_mask_opt, eabx_mask);
      take(cfg, "budget", eabx_budget_opt, eabx_budget);
      take(cfg, "seed", eabx_seed_opt, eabx_seed);
      if (eabx_corpus.empty() || eabx_report.empty() || eabx_task.empty())
        throw UsageError("eval-abx needs --corpus, --report and --task");
      return cmd_eval_abx(eabx_corpus, eabx_report, eabx_task,
                          {eabx_archive, eabx_model, eabx_prep, eabx_mode,
                           eabx_mask},
                          eabx_budget, eabx_seed);
    }
    if (active == epar) {
      take(cfg, "corpus", epar_corpus_opt, epar_corpus);
      take(cfg, "report", epar_report_opt, epar_report);
      take(cfg, "archive", epar_archive_opt, epar_archive);
      take(cfg, "model", epar_model_opt, epar_model);
      take(cfg, "prep", epar_prep_opt, epar_prep);
      take(cfg, "mode", epar_mode_opt, epar_mode);
      take(cfg, "test-mask", epar_mask_opt, epar_mask);
      if (epar_corpus.empty() || epar_report.empty())
        throw UsageError("eval-parallelism needs --corpus and --report");
      return cmd_eval_parallelism(
          epar_corpus, epar_report,
          {epar_archive, epar_model, epar_prep, epar_mode, epar_mask});
    }
    if (active == emcg) {
      take(cfg, "corpus", emcg_corpus_opt, emcg_corpus);
      take(cfg, "report", emcg_report_opt, emcg_report);
      take(cfg, "model", emcg_model_opt, emcg_model);
      take(cfg, "audio-phone", emcg_audio_opt, emcg_audio);
      take(cfg, "competitor", emcg_comp_opt, emcg_comp);
      take(cfg, "variants", emcg_var_opt, emcg_variants);
      take(cfg, "holdout", emcg_hold_opt, emcg_holdout);
      take(cfg, "budget", emcg_budget_opt, emcg_budget);
      take(cfg, "seed", emcg_seed_opt, emcg_seed);
      if (emcg_corpus.empty() || emcg_report.empty() || emcg_model.empty())
        throw UsageError("eval-mcgurk needs --corpus, --report and --model");
      return cmd_eval_mcgurk(emcg_corpus, emcg_report, emcg_model, emcg_audio,
                             emcg_comp, emcg_variants, emcg_holdout,
                             emcg_budget, emcg_seed);
    }
    if (active == report_cmd) {
      take(cfg, "out", report_out_opt, report_out);
      if (report_inputs.empty() && cfg.contains("inputs"))
        report_inputs = cfg.at("inputs").get<std::vector<std::string>>();
      if (report_out.empty() || report_inputs.empty())
        throw UsageError("report needs --out and at least one input");
      return cmd_report(report_out, report_inputs);
    }
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numeric_failure(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace wsm
