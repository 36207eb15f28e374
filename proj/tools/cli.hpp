#pragma once

// Command-line front end. All work is delegated to the msaeval headers; this
// file only parses flags, reads and writes files, and maps errors to exit
// codes: 0 success, 1 validation/domain/file errors, 2 usage errors.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msaeval/corpus.hpp"
#include "msaeval/distribution.hpp"
#include "msaeval/ensemble.hpp"
#include "msaeval/error.hpp"
#include "msaeval/format.hpp"
#include "msaeval/io.hpp"
#include "msaeval/metrics.hpp"
#include "msaeval/report.hpp"
#include "msaeval/simulate.hpp"
#include "msaeval/train_config.hpp"

namespace msaeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
}

inline void append_scores(std::string& out, const ScoreReport& r, bool per_class) {
  const std::string prefix = r.mode == ScoreMode::Strict ? "strict" : "lenient";
  out += prefix + "_macro_f1=" + percent(r.macro_f1) + "\n";
  out += prefix + "_accuracy=" + percent(r.accuracy) + "\n";
  if (!per_class) return;
  for (const auto& c : r.per_class) {
    const std::string key = prefix + "." + c.name + ".";
    out += key + "precision=" + percent(c.precision) + "\n";
    out += key + "recall=" + percent(c.recall) + "\n";
    out += key + "f1=" + percent(c.f1) + "\n";
    out += key + "support=" + std::to_string(c.support) + "\n";
  }
}

inline std::vector<Label> labels_of(const std::vector<LabelEntry>& entries) {
  std::vector<Label> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

// A single file whose records carry "votes" is a combined vote file;
// otherwise every path is one model's label file.
inline PredictionMatrix load_prediction_matrix(const std::vector<std::string>& paths) {
  if (paths.size() == 1) {
    std::string text = read_file(paths.front());
    bool combined = false;
    for_each_jsonl(text, [&](std::size_t, const nlohmann::json& obj) {
      if (obj.contains("votes")) combined = true;
    });
    try {
      return combined ? parse_votes_jsonl(text) : matrix_from_runs(std::vector<std::vector<LabelEntry>>{parse_label_jsonl(text)});
    } catch (const Error& e) {
      throw ParseError(paths.front() + ": " + e.what());
    }
  }
  std::vector<std::vector<LabelEntry>> runs;
  for (const auto& p : paths) runs.push_back(load_label_jsonl(p));
  return matrix_from_runs(runs);
}

// "name=path,name=path"
inline std::vector<std::pair<std::string, std::string>> parse_named_paths(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw ValidationError("expected name=path, got \"" + item + "\"");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tutor-response evaluation toolkit: preprocessing, scoring, ensembling and reports", "msaeval"};
  app.require_subcommand(1);

  // preprocess
  std::string pre_input, pre_track, pre_out;
  bool pre_unlabeled = false;
  auto* preprocess = app.add_subcommand("preprocess", "Convert a raw corpus into one track's instruction JSONL");
  preprocess->add_option("--input", pre_input, "Raw corpus JSON")->required();
  preprocess->add_option("--track", pre_track, "mistake_identification | mistake_location | providing_guidance | actionability")
      ->required();
  preprocess->add_flag("--include-unlabeled", pre_unlabeled, "Emit every response, labelled or not");
  preprocess->add_option("--out", pre_out, "Output JSONL path")->required();

  // score
  std::string score_gold, score_pred, score_mode = "both", score_out;
  bool score_per_class = false;
  auto* score_cmd = app.add_subcommand("score", "Strict/lenient macro-F1 and accuracy");
  score_cmd->add_option("--gold", score_gold, "Gold label JSONL")->required();
  score_cmd->add_option("--pred", score_pred, "Predicted label JSONL")->required();
  score_cmd->add_option("--mode", score_mode, "strict | lenient | both")
      ->check(CLI::IsMember({"strict", "lenient", "both"}));
  score_cmd->add_flag("--per-class", score_per_class, "Also print per-class precision/recall/F1/support");
  score_cmd->add_option("--out", score_out, "Write to this path instead of stdout");

  // ensemble
  std::vector<std::string> ens_preds;
  std::string ens_tse, ens_dev_gold, ens_out, ens_audit;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Disagreement-aware aggregation of several prediction runs");
  ensemble_cmd->add_option("--preds", ens_preds, "Comma-separated label files, or one combined vote file")
      ->required()
      ->delimiter(',');
  auto* tse_opt = ensemble_cmd->add_option("--tse-freq", ens_tse, "Target 'To some extent' frequency (0.18, 9/50, 18%)");
  auto* dev_opt = ensemble_cmd->add_option("--dev-gold", ens_dev_gold, "Gold label JSONL to measure the target from");
  tse_opt->excludes(dev_opt);
  ensemble_cmd->add_option("--out", ens_out, "Output label JSONL")->required();
  ensemble_cmd->add_option("--audit", ens_audit, "Optional per-instance audit JSONL");

  // distribution
  std::string dist_labels, dist_out;
  auto* dist_cmd = app.add_subcommand("distribution", "Label frequency table for a label file");
  dist_cmd->add_option("--labels", dist_labels, "Label JSONL")->required();
  dist_cmd->add_option("--out", dist_out, "Write to this path instead of stdout");

  // simulate
  std::size_t sim_n = 0, sim_models = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_profile, sim_out_gold, sim_out_preds;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic gold set and ensemble votes");
  sim_cmd->add_option("--n", sim_n, "Number of instances")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--models", sim_models, "Number of ensemble members")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->required();
  sim_cmd->add_option("--profile", sim_profile, "Profile JSON (gold distribution and confusion rows)")->required();
  sim_cmd->add_option("--out-gold", sim_out_gold, "Gold label JSONL")->required();
  sim_cmd->add_option("--out-preds", sim_out_preds, "Combined vote JSONL")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "Render result and distribution tables");
  report_cmd->require_subcommand(1);
  std::string runs_results, runs_format = "markdown", runs_out;
  auto* runs_cmd = report_cmd->add_subcommand("runs", "Per-track run table with best values marked");
  runs_cmd->add_option("--results", runs_results, "RunResult TSV")->required();
  runs_cmd->add_option("--format", runs_format, "markdown | tsv")->check(CLI::IsMember({"markdown", "tsv"}));
  runs_cmd->add_option("--out", runs_out, "Write to this path instead of stdout");
  std::vector<std::string> dists_inputs;
  std::string dists_out;
  auto* dists_cmd = report_cmd->add_subcommand("distributions", "Compare label distributions of several files");
  dists_cmd->add_option("--inputs", dists_inputs, "Comma-separated name=path pairs")->required()->delimiter(',');
  dists_cmd->add_option("--out", dists_out, "Write to this path instead of stdout");

  // config
  auto* config_cmd = app.add_subcommand("config", "Training configuration");
  config_cmd->require_subcommand(1);
  std::string show_file;
  auto* show_cmd = config_cmd->add_subcommand("show", "Print the configuration (defaults unless --config is given)");
  show_cmd->add_option("--config", show_file, "key = value config file to load and validate");

  std::vector<const char*> argv{"msaeval"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*preprocess) {
      Track track = parse_track(pre_track);
      auto dialogues = load_corpus(pre_input);
      export_track_jsonl(dialogues, track, pre_unlabeled ? ExportMode::AllPairs : ExportMode::LabeledOnly, pre_out);
    } else if (*score_cmd) {
      auto gold = load_label_jsonl(score_gold);
      auto pred = load_label_jsonl(score_pred);
      auto pairs = join_labels(gold, pred);
      std::string text;
      if (score_mode != "lenient") detail::append_scores(text, score(pairs, ScoreMode::Strict), score_per_class);
      if (score_mode != "strict") detail::append_scores(text, score(pairs, ScoreMode::Lenient), score_per_class);
      detail::emit(text, score_out, out);
    } else if (*ensemble_cmd) {
      if (ens_tse.empty() && ens_dev_gold.empty()) {
        err << "ensemble: one of --tse-freq or --dev-gold is required\n";
        return kExitUsage;
      }
      LabelDistribution reference = ens_tse.empty()
                                        ? LabelDistribution::measure(detail::labels_of(load_label_jsonl(ens_dev_gold)))
                                        : LabelDistribution::with_tse(parse_fraction(ens_tse));
      auto matrix = detail::load_prediction_matrix(ens_preds);
      auto decisions = aggregate(matrix, reference);
      write_file(ens_out, to_label_jsonl(to_label_entries(decisions)));
      if (!ens_audit.empty()) write_file(ens_audit, to_audit_jsonl(decisions));
    } else if (*dist_cmd) {
      auto labels = load_label_jsonl(dist_labels);
      std::vector<NamedDistribution> one{
          {std::filesystem::path(dist_labels).stem().string(), LabelDistribution::measure(detail::labels_of(labels))}};
      detail::emit(render_distribution_report(one), dist_out, out);
    } else if (*sim_cmd) {
      SimProfile profile = parse_profile(read_file(sim_profile));
      profile.n_instances = sim_n;
      profile.n_models = sim_models;
      profile.seed = sim_seed;
      auto sim = simulate(profile);
      write_file(sim_out_gold, to_label_jsonl(sim.gold));
      write_file(sim_out_preds, to_votes_jsonl(sim.predictions));
    } else if (*runs_cmd) {
      std::vector<RunResult> results;
      try {
        results = parse_run_tsv(read_file(runs_results));
      } catch (const ParseError& e) {
        throw ParseError(runs_results + ": " + e.what());
      }
      detail::emit(render_run_table(results, runs_format == "tsv" ? TableFormat::Tsv : TableFormat::Markdown),
                   runs_out, out);
    } else if (*dists_cmd) {
      std::vector<NamedDistribution> sources;
      for (const auto& [name, path] : detail::parse_named_paths(dists_inputs)) {
        sources.emplace_back(name, LabelDistribution::measure(detail::labels_of(load_label_jsonl(path))));
      }
      detail::emit(render_distribution_report(sources), dists_out, out);
    } else if (*show_cmd) {
      TrainConfig config = show_file.empty() ? TrainConfig{} : parse_config_text(read_file(show_file));
      config.validate();
      out << to_config_text(config);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}

}  // namespace msaeval::cli
