/*
 * Copyright 2026 The rtbconf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Subcommands:
//   gen        synthetic dataset with planted segments
//   split      time-ordered train/test split
//   slice      per-campaign slices of a scored test set
//   train      fit the conversion-rate model
//   predict    append cvr and profitability columns
//   evaluate   model metrics as JSON
//   search     ranked configurations
//   experiment one of the five strategies over a set of slices
//   replay     re-run a command from its manifest and verify its outputs
//
// Every subcommand except replay accepts --config FILE (key = value lines
// whose keys are flag names without dashes; flags on the command line take
// precedence) and --manifest PATH.

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "manifest.h"
#include "rtbconf/config_search.h"
#include "rtbconf/cvr_model.h"
#include "rtbconf/data_io.h"
#include "rtbconf/dataset.h"
#include "rtbconf/errors.h"
#include "rtbconf/kv_config.h"
#include "rtbconf/metrics.h"
#include "rtbconf/scoring.h"
#include "rtbconf/strategies.h"
#include "rtbconf/synthetic.h"
#include "rtbconf/version.h"

namespace rtbconf::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  // Shared.
  std::string config;
  std::string manifest;
  int attributes = kDefaultAttributes;
  int workers = 1;

  // gen
  std::string output;
  std::string planted;
  std::size_t rows = 10000;
  int gen_attributes = kDefaultAttributes;
  std::vector<int> cardinality = {10};
  double background_rate = 0.02;
  std::vector<double> background_cost = {0.5, 1.5};
  std::uint64_t seed = 42;
  std::int64_t campaign = 1;
  bool true_cvr = false;
  bool force = false;

  // split / slice
  std::string input;
  std::size_t train_rows = 0;
  std::string train_out;
  std::string test_out;
  std::size_t slice_size = 100000;
  std::string output_dir;

  // train / predict / evaluate
  std::string model;
  std::string resume;
  std::uint64_t hash_space = CvrModel::kDefaultHashSpace;
  double learning_rate = CvrModel::kDefaultLearningRate;
  bool salted = false;
  std::size_t monitor_window = 100000;
  double threshold = 0.5;

  // search
  std::size_t limit = 5000;
  bool allow_below_limit = false;
  int max_subset_size = kMaxAttributes;
  std::size_t top_k = 0;
  std::string pruning = "rowmask";
  bool record_time = false;
  std::string json;

  // experiment
  std::string id;
  std::vector<std::string> inputs;
  std::size_t experiment_slice_size = 0;
  std::vector<std::size_t> limits;
  std::vector<std::size_t> slice_sizes;
  std::vector<double> fractions;
  std::vector<std::string> thresholds;
  bool invert_threshold = false;

  // replay
  std::string replay_manifest;
};

// What a command read and wrote, for the manifest.
struct RunRecord {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  std::string default_manifest;
};

char DelimiterFor(const std::string& path) {
  return fs::path(path).extension() == ".tsv" ? '\t' : ',';
}

void EnsureParent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

CampaignDataset Load(const std::string& path, int attributes, RunRecord& run,
                     std::ostream& err) {
  LogSchema schema;
  schema.n_attributes = attributes;
  LoadResult loaded = LoadLog(path, schema);
  run.inputs.push_back(path);
  const LoadReport& r = loaded.report;
  if (r.rejected() > 0) {
    err << "warning: " << path << ": rejected " << r.rejected() << " of "
        << r.data_rows << " rows (" << r.rejected_missing
        << " missing categorical, " << r.rejected_malformed << " malformed)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(r.issues.size(), 5); ++i) {
      err << "  line " << r.issues[i].line << ": " << r.issues[i].message << '\n';
    }
  }
  return std::move(loaded.dataset);
}

CampaignDataset EnsureProfitability(CampaignDataset d, const std::string& path) {
  if (d.has_profitability()) return d;
  if (!d.has_cvr()) {
    throw ArgumentError(path +
                        " has neither profitability nor cvr; run predict first");
  }
  return rtbconf::WithProfitability(d);
}

void WriteText(const std::string& path, const std::string& text,
               RunRecord& run) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
  run.outputs.push_back(path);
}

void WriteDataset(const std::string& path, const CampaignDataset& d,
                  RunRecord& run) {
  EnsureParent(path);
  SaveLog(path, d, DelimiterFor(path));
  run.outputs.push_back(path);
}

// ---------------------------------------------------------------------------
// Commands.

struct GenFlags {
  CLI::Option* rows = nullptr;
  CLI::Option* attributes = nullptr;
  CLI::Option* cardinality = nullptr;
  CLI::Option* background_rate = nullptr;
  CLI::Option* background_cost = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* campaign = nullptr;
  CLI::Option* true_cvr = nullptr;
};

void CmdGen(const Options& o, const GenFlags& f, RunRecord& run,
            std::ostream& out) {
  SyntheticSpec spec;
  if (!o.planted.empty()) {
    spec = LoadSyntheticSpec(o.planted, spec);
    run.inputs.push_back(o.planted);
  }
  if (f.rows->count()) spec.n_rows = o.rows;
  if (f.attributes->count()) spec.n_attributes = o.gen_attributes;
  if (f.cardinality->count()) spec.cardinality = o.cardinality;
  if (f.background_rate->count()) spec.background_rate = o.background_rate;
  if (f.background_cost->count()) {
    if (o.background_cost.size() != 2) {
      throw ArgumentError("--background-cost takes low,high");
    }
    spec.background_cost = {o.background_cost[0], o.background_cost[1]};
  }
  if (f.seed->count()) spec.seed = o.seed;
  if (f.campaign->count()) spec.campaign_id = o.campaign;
  if (f.true_cvr->count()) spec.emit_true_cvr = o.true_cvr;
  if (fs::exists(o.output) && !o.force) {
    throw ArgumentError(o.output + " exists; pass --force to overwrite");
  }
  const CampaignDataset d = GenerateSynthetic(spec);
  WriteDataset(o.output, d, run);
  run.seed = spec.seed;
  run.default_manifest = o.output + ".manifest.json";
  out << "wrote " << d.rows() << " rows to " << o.output << '\n';
}

void CmdSplit(const Options& o, RunRecord& run, std::ostream& out,
              std::ostream& err) {
  const CampaignDataset d = Load(o.input, o.attributes, run, err);
  const auto [train, test] = SplitTrainTest(d, o.train_rows);
  WriteDataset(o.train_out, train, run);
  WriteDataset(o.test_out, test, run);
  run.default_manifest = o.train_out + ".manifest.json";
  out << "train " << train.rows() << " rows, test " << test.rows() << " rows\n";
}

void CmdSlice(const Options& o, RunRecord& run, std::ostream& out,
              std::ostream& err) {
  if (o.slice_size < 1) throw ArgumentError("--slice-size must be >= 1");
  const CampaignDataset d = Load(o.input, o.attributes, run, err);
  const CampaignSlices slices = MakeCampaignSlices(d, o.slice_size);
  fs::create_directories(o.output_dir);
  nlohmann::ordered_json summary;
  summary["input"] = o.input;
  summary["slice_size"] = o.slice_size;
  summary["campaigns_skipped"] = slices.campaigns_skipped;
  summary["rows_discarded"] = slices.rows_discarded;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < slices.slices.size(); ++i) {
    std::ostringstream name;
    name << "slice_" << (i + 1 < 10 ? "0" : "") << (i + 1) << "_campaign_"
         << slices.campaign_of_slice[i] << ".csv";
    const std::string path = (fs::path(o.output_dir) / name.str()).string();
    WriteDataset(path, slices.slices[i], run);
    list.push_back({{"file", name.str()},
                    {"campaign_id", slices.campaign_of_slice[i]},
                    {"rows", slices.slices[i].rows()}});
  }
  summary["slices"] = std::move(list);
  WriteText((fs::path(o.output_dir) / "slices.json").string(),
            summary.dump(2) + "\n", run);
  run.default_manifest = (fs::path(o.output_dir) / "manifest.json").string();
  out << slices.slices.size() << " slices written to " << o.output_dir << " ("
      << slices.campaigns_skipped << " campaigns skipped)\n";
}

void CmdTrain(const Options& o, RunRecord& run, std::ostream& out,
              std::ostream& err) {
  const CampaignDataset d = Load(o.input, o.attributes, run, err);
  CvrModel model = [&] {
    if (o.resume.empty()) {
      return CvrModel(o.hash_space, o.learning_rate,
                      o.salted ? HashMode::kSalted : HashMode::kModulus);
    }
    run.inputs.push_back(o.resume);
    return CvrModel::Load(o.resume);
  }();
  const TrainSummary summary = Train(model, d, o.monitor_window);
  EnsureParent(o.model);
  model.Save(o.model);
  run.outputs.push_back(o.model);
  run.default_manifest = o.model + ".manifest.json";
  for (std::size_t i = 0; i < summary.window_log_loss.size(); ++i) {
    err << "window " << (i + 1) << " log loss " << summary.window_log_loss[i]
        << '\n';
  }
  out << "trained on " << summary.rows << " rows; model has "
      << model.rows_trained() << " rows in total\n";
}

void CmdPredict(const Options& o, RunRecord& run, std::ostream& out,
                std::ostream& err) {
  const CampaignDataset d = Load(o.input, o.attributes, run, err);
  const CvrModel model = CvrModel::Load(o.model);
  run.inputs.push_back(o.model);
  const CampaignDataset scored =
      rtbconf::WithProfitability(PredictAll(model, d, o.workers));
  WriteDataset(o.output, scored, run);
  run.default_manifest = o.output + ".manifest.json";
  out << "scored " << scored.rows() << " rows\n";
}

nlohmann::ordered_json MetricsToJson(const ModelMetrics& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows;
  j["threshold"] = m.threshold;
  j["log_loss"] = m.log_loss;
  j["mae"] = m.mae;
  j["mse"] = m.mse;
  j["rmse"] = m.rmse;
  if (m.auc) j["auc"] = *m.auc;
  j["accuracy"] = m.accuracy;
  j["avg_accuracy"] = m.avg_accuracy;
  j["sensitivity"] = m.sensitivity;
  j["specificity"] = m.specificity;
  j["precision"] = m.precision;
  j["f1"] = m.f1;
  j["confusion"] = {{"true_positive", m.confusion.true_positive},
                    {"false_negative", m.confusion.false_negative},
                    {"false_positive", m.confusion.false_positive},
                    {"true_negative", m.confusion.true_negative}};
  return j;
}

void CmdEvaluate(const Options& o, RunRecord& run, std::ostream& out,
                 std::ostream& err) {
  const CampaignDataset d = Load(o.input, o.attributes, run, err);
  const CvrModel model = CvrModel::Load(o.model);
  run.inputs.push_back(o.model);
  const ModelMetrics m = EvaluateModel(model, d, o.threshold, o.workers);
  const std::string text = MetricsToJson(m).dump(2) + "\n";
  WriteText(o.output, text, run);
  run.default_manifest = o.output + ".manifest.json";
  if (!m.auc) err << "warning: only one class present; auc omitted\n";
  out << text;
}

void CmdSearch(const Options& o, RunRecord& run, std::ostream& out,
               std::ostream& err) {
  const CampaignDataset d =
      EnsureProfitability(Load(o.input, o.attributes, run, err), o.input);
  SearchParams params;
  params.limit = o.limit;
  params.allow_below_limit = o.allow_below_limit;
  params.max_subset_size = o.max_subset_size;
  params.top_k = o.top_k;
  params.workers = o.workers;
  params.pruning = ParsePruningMode(o.pruning);
  params.record_time = o.record_time;
  const auto ranking = Search(d, params);
  if (ranking.empty()) {
    err << "warning: no configuration reaches " << o.limit << " visits\n";
  }
  std::ostringstream table;
  WriteRanking(table, ranking, DelimiterFor(o.output), o.record_time);
  WriteText(o.output, table.str(), run);
  if (!o.json.empty()) {
    WriteText(o.json, RankingToJson(ranking, o.record_time).dump(2) + "\n", run);
  }
  run.default_manifest = o.output + ".manifest.json";
  out << ranking.size() << " configurations ranked\n";
}

struct ExperimentFlags {
  CLI::Option* limits = nullptr;
  CLI::Option* slice_sizes = nullptr;
  CLI::Option* fractions = nullptr;
  CLI::Option* thresholds = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* max_subset_size = nullptr;
  CLI::Option* pruning = nullptr;
};

const char* FigureFileName(ExperimentId id) {
  switch (id) {
    case ExperimentId::kI: return "expI_best_profitability.csv";
    case ExperimentId::kII: return "expII_sequential_vs_single.csv";
    case ExperimentId::kIII: return "expIII_extrapolation.csv";
    case ExperimentId::kIV: return "expIV_thresholds.csv";
    case ExperimentId::kV: return "expV_relaxed_vs_strict.csv";
  }
  return "figure.csv";
}

void CmdExperiment(const Options& o, const ExperimentFlags& f, RunRecord& run,
                   std::ostream& out, std::ostream& err) {
  const ExperimentId id = ParseExperimentId(o.id);
  ExperimentSpec spec = ExperimentSpec::Defaults(id);
  if (f.limits->count()) spec.limits = o.limits;
  if (f.slice_sizes->count()) spec.slice_sizes = o.slice_sizes;
  if (f.fractions->count()) spec.prefix_fractions = o.fractions;
  if (f.thresholds->count()) {
    spec.thresholds.clear();
    for (const auto& t : o.thresholds) spec.thresholds.push_back(ParseThresholdKind(t));
  }
  spec.invert_threshold = o.invert_threshold;
  if (f.seed->count()) spec.seed = o.seed;
  spec.workers = o.workers;
  if (f.max_subset_size->count()) spec.max_subset_size = o.max_subset_size;
  if (f.pruning->count()) spec.pruning = ParsePruningMode(o.pruning);
  spec.record_time = o.record_time;
  spec.Validate();

  std::vector<CampaignDataset> slices;
  for (const std::string& path : o.inputs) {
    CampaignDataset d = EnsureProfitability(Load(path, o.attributes, run, err), path);
    if (o.experiment_slice_size == 0) {
      slices.push_back(std::move(d));
    } else {
      CampaignSlices made = MakeCampaignSlices(d, o.experiment_slice_size);
      for (auto& s : made.slices) slices.push_back(std::move(s));
    }
  }
  if (slices.empty()) throw ArgumentError("no slices: inputs are too small");

  const ExperimentReport report = RunExperiment(slices, spec);
  fs::create_directories(o.output_dir);
  WriteText((fs::path(o.output_dir) / "report.json").string(),
            ReportToJson(report, kVersion).dump(2) + "\n", run);
  std::ostringstream table;
  WriteFigureTable(table, report);
  WriteText((fs::path(o.output_dir) / FigureFileName(id)).string(), table.str(),
            run);
  run.seed = spec.seed;
  run.default_manifest = (fs::path(o.output_dir) / "manifest.json").string();
  out << "experiment " << ExperimentName(id) << " over " << slices.size()
      << " slices written to " << o.output_dir << '\n';
}

// ---------------------------------------------------------------------------
// Configuration files.

bool GivenOnCommandLine(const std::vector<std::string>& args,
                        const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> ConfigPath(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Inserts the config file's settings after the subcommand name, skipping
// keys already set on the command line.
std::vector<std::string> MergeConfig(CLI::App& app,
                                     const std::vector<std::string>& args,
                                     RunRecord& run) {
  if (args.empty() || args[0].empty() || args[0][0] == '-') return args;
  const auto path = ConfigPath(args);
  if (!path) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) return args;
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config file " + *path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  run.inputs.push_back(*path);

  std::vector<std::string> injected;
  for (const KeyValue& kv : ParseKeyValues(buffer.str())) {
    std::string name = kv.key;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (name == "config" || name == "manifest") {
      throw ArgumentError("config file may not set '" + kv.key + "'");
    }
    CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr) {
      throw ArgumentError(*path + " line " + std::to_string(kv.line) +
                          ": unknown key '" + kv.key + "' for " + args[0]);
    }
    const auto& names = opt->get_lnames();
    if (std::any_of(names.begin(), names.end(), [&](const std::string& n) {
          return GivenOnCommandLine(args, "--" + n);
        })) {
      continue;
    }
    if (opt->get_expected_max() == 0) {
      if (ParseBool(kv.key, kv.value)) injected.push_back(flag);
    } else {
      injected.push_back(flag);
      injected.push_back(kv.value);
    }
  }
  std::vector<std::string> merged;
  merged.push_back(args[0]);
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

nlohmann::ordered_json ResolvedConfig(CLI::App* sub) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i) joined += ',';
        joined += results[i];
      }
      j[name] = joined;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Replay.

int Replay(const Options& o, std::ostream& out, std::ostream& err) {
  const RunManifest m = RunManifest::Load(o.replay_manifest);
  const fs::path here = fs::current_path();
  struct Restore {
    fs::path dir;
    ~Restore() {
      std::error_code ec;
      fs::current_path(dir, ec);
    }
  } restore{here};
  if (!m.working_directory.empty()) fs::current_path(m.working_directory);

  for (const FileDigest& f : m.inputs) {
    if (!fs::exists(f.path)) {
      err << "error: input " << f.path << " is missing\n";
      return kExitData;
    }
    if (Sha256File(f.path) != f.sha256) {
      err << "error: input " << f.path << " changed since the recorded run\n";
      return kExitData;
    }
  }

  std::vector<std::string> args;
  for (std::size_t i = 0; i < m.command.size(); ++i) {
    const std::string& a = m.command[i];
    if (a == "--manifest") {
      ++i;
      continue;
    }
    if (a.rfind("--manifest=", 0) == 0) continue;
    args.push_back(a);
  }
  const std::string replay_manifest =
      fs::absolute(here / o.replay_manifest).string() + ".replay.json";
  args.push_back("--manifest");
  args.push_back(replay_manifest);
  if (m.subcommand == "gen" && !GivenOnCommandLine(args, "--force")) {
    args.push_back("--force");
  }
  const int code = RunCli(args, out, err);
  if (code != kExitOk) return code;

  std::size_t mismatched = 0;
  for (const FileDigest& f : m.outputs) {
    if (!fs::exists(f.path) || Sha256File(f.path) != f.sha256) {
      err << "mismatch: " << f.path << '\n';
      ++mismatched;
    }
  }
  if (mismatched > 0) {
    err << "replay failed: " << mismatched << " of " << m.outputs.size()
        << " outputs differ\n";
    return kExitData;
  }
  out << "replay ok: " << m.outputs.size() << " outputs identical\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Campaign configuration optimiser for real-time bidding logs",
               "rtbconf"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config,
                    "key = value file of flag settings (flags take precedence)");
    sub->add_option("--manifest", o.manifest,
                    "where to write the run manifest");
  };
  auto data_in = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "delimited log (comma or tab)")
        ->required();
    sub->add_option("--attributes", o.attributes,
                    "number of categorical columns cat1..catN")
        ->check(CLI::Range(1, kMaxAttributes));
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  common(gen);
  GenFlags gen_flags;
  gen->add_option("--output", o.output, "dataset file to write")->required();
  gen->add_option("--planted", o.planted, "plan file (see README)");
  gen_flags.rows = gen->add_option("--rows", o.rows, "number of rows");
  gen_flags.attributes = gen->add_option("--attributes", o.gen_attributes,
                                         "number of categorical attributes");
  gen_flags.cardinality =
      gen->add_option("--cardinality", o.cardinality,
                      "values per attribute (one, or one per attribute)")
          ->delimiter(',');
  gen_flags.background_rate = gen->add_option(
      "--background-rate", o.background_rate, "conversion rate outside segments");
  gen_flags.background_cost =
      gen->add_option("--background-cost", o.background_cost,
                      "uniform cost range low,high outside segments")
          ->delimiter(',');
  gen_flags.seed = gen->add_option("--seed", o.seed, "random seed");
  gen_flags.campaign = gen->add_option("--campaign", o.campaign, "campaign id");
  gen_flags.true_cvr = gen->add_flag("--true-cvr", o.true_cvr,
                                     "write the generating rate as cvr");
  gen->add_flag("--force", o.force, "overwrite an existing output");

  CLI::App* split = app.add_subcommand("split", "time-ordered train/test split");
  common(split);
  data_in(split);
  split->add_option("--train-rows", o.train_rows, "rows in the training part")
      ->required();
  split->add_option("--train-out", o.train_out, "training file")->required();
  split->add_option("--test-out", o.test_out, "test file")->required();

  CLI::App* slice = app.add_subcommand("slice", "per-campaign slices");
  common(slice);
  data_in(slice);
  slice->add_option("--slice-size", o.slice_size, "rows per slice");
  slice->add_option("--output-dir", o.output_dir, "directory for the slices")
      ->required();

  CLI::App* train = app.add_subcommand("train", "train the conversion model");
  common(train);
  data_in(train);
  train->add_option("--model", o.model, "checkpoint to write")->required();
  train->add_option("--resume", o.resume, "checkpoint to continue from");
  train->add_option("--hash-space", o.hash_space, "hash space size (power of two)");
  train->add_option("--learning-rate", o.learning_rate, "learning rate alpha");
  train->add_flag("--salted", o.salted, "position-salted hashing");
  train->add_option("--monitor-window", o.monitor_window,
                    "rows per progressive log-loss window");

  CLI::App* predict = app.add_subcommand("predict", "append cvr and profitability");
  common(predict);
  data_in(predict);
  predict->add_option("--model", o.model, "checkpoint")->required();
  predict->add_option("--output", o.output, "scored dataset")->required();
  predict->add_option("--workers", o.workers, "threads")->check(CLI::PositiveNumber);

  CLI::App* evaluate = app.add_subcommand("evaluate", "model metrics");
  common(evaluate);
  data_in(evaluate);
  evaluate->add_option("--model", o.model, "checkpoint")->required();
  evaluate->add_option("--output", o.output, "metrics JSON")->required();
  evaluate->add_option("--threshold", o.threshold, "decision threshold");
  evaluate->add_option("--workers", o.workers, "threads")->check(CLI::PositiveNumber);

  CLI::App* search = app.add_subcommand("search", "rank configurations");
  common(search);
  data_in(search);
  search->add_option("--output", o.output, "ranking table (.csv or .tsv)")
      ->required();
  search->add_option("--json", o.json, "also write the ranking as JSON");
  search->add_option("--limit", o.limit, "required visits")
      ->check(CLI::PositiveNumber);
  search->add_flag("--allow-below-limit", o.allow_below_limit,
                   "keep configurations under the limit");
  search->add_option("--max-subset-size", o.max_subset_size,
                     "largest attribute subset")
      ->check(CLI::Range(1, kMaxAttributes));
  search->add_option("--top-k", o.top_k, "keep the best k (0 = all)");
  search->add_option("--workers", o.workers, "threads")->check(CLI::PositiveNumber);
  search->add_option("--pruning", o.pruning, "rowmask, rejected-set or none");
  search->add_flag("--record-time", o.record_time,
                   "include elapsed_seconds (output no longer reproducible)");

  CLI::App* experiment = app.add_subcommand("experiment", "run a strategy");
  common(experiment);
  ExperimentFlags exp_flags;
  experiment->add_option("--id,--experiment", o.id, "I, II, III, IV or V")->required();
  experiment->add_option("--input", o.inputs, "scored slice file(s)")
      ->required()
      ->delimiter(',');
  experiment->add_option("--attributes", o.attributes,
                         "number of categorical columns cat1..catN")
      ->check(CLI::Range(1, kMaxAttributes));
  experiment->add_option("--slice-size", o.experiment_slice_size,
                         "cut inputs into per-campaign slices (0 = as given)");
  experiment->add_option("--output-dir", o.output_dir, "report directory")
      ->required();
  exp_flags.limits =
      experiment->add_option("--limits", o.limits, "visit requirements")
          ->delimiter(',');
  exp_flags.slice_sizes =
      experiment->add_option("--slice-sizes", o.slice_sizes,
                             "small requirements for experiment II")
          ->delimiter(',');
  exp_flags.fractions =
      experiment->add_option("--fractions", o.fractions,
                             "prefix fractions for experiment III")
          ->delimiter(',');
  exp_flags.thresholds =
      experiment->add_option("--thresholds", o.thresholds,
                             "none, cost, profitability (experiment IV)")
          ->delimiter(',');
  experiment->add_flag("--invert-threshold", o.invert_threshold,
                       "keep the other half in experiment IV");
  exp_flags.seed = experiment->add_option("--seed", o.seed, "recorded seed");
  experiment->add_option("--workers", o.workers, "threads")
      ->check(CLI::PositiveNumber);
  exp_flags.max_subset_size =
      experiment->add_option("--max-subset-size", o.max_subset_size,
                             "largest attribute subset")
          ->check(CLI::Range(1, kMaxAttributes));
  exp_flags.pruning = experiment->add_option("--pruning", o.pruning,
                                             "rowmask, rejected-set or none");
  experiment->add_flag("--record-time", o.record_time,
                       "include timings (output no longer reproducible)");

  CLI::App* replay =
      app.add_subcommand("replay", "re-run a manifest and verify its outputs");
  replay->add_option("manifest", o.replay_manifest, "manifest JSON")->required();

  RunRecord run;
  std::vector<std::string> merged;
  try {
    merged = MergeConfig(app, args, run);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> argv = {"rtbconf"};
  for (const auto& a : merged) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (replay->parsed()) {
    try {
      return Replay(o, out, err);
    } catch (const DataError& e) {
      err << "error: " << e.what() << '\n';
      return kExitData;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }

  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.command = args;
  manifest.subcommand = sub->get_name();
  manifest.code_version = kVersion;
  manifest.working_directory = fs::current_path().string();
  manifest.started_at = UtcTimestamp();
  try {
    if (sub == gen) {
      CmdGen(o, gen_flags, run, out);
    } else if (sub == split) {
      CmdSplit(o, run, out, err);
    } else if (sub == slice) {
      CmdSlice(o, run, out, err);
    } else if (sub == train) {
      CmdTrain(o, run, out, err);
    } else if (sub == predict) {
      CmdPredict(o, run, out, err);
    } else if (sub == evaluate) {
      CmdEvaluate(o, run, out, err);
    } else if (sub == search) {
      CmdSearch(o, run, out, err);
    } else if (sub == experiment) {
      CmdExperiment(o, exp_flags, run, out, err);
    }
    manifest.finished_at = UtcTimestamp();
    manifest.config = ResolvedConfig(sub);
    manifest.seed = run.seed;
    for (const auto& p : run.inputs) manifest.inputs.push_back(DigestOf(p));
    for (const auto& p : run.outputs) manifest.outputs.push_back(DigestOf(p));
    const std::string path = o.manifest.empty() ? run.default_manifest : o.manifest;
    EnsureParent(path);
    manifest.Save(path);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SpecificationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace rtbconf::cli
