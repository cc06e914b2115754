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


// Acceptance checks. Prints one PASS, FAIL or SKIP line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.h"
#include "rtbconf/config_search.h"
#include "rtbconf/cvr_model.h"
#include "rtbconf/data_io.h"
#include "rtbconf/metrics.h"
#include "rtbconf/scoring.h"
#include "rtbconf/strategies.h"
#include "rtbconf/synthetic.h"
#include "test_util.h"

namespace rtbconf {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict Pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Verdict Fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Verdict Check(bool ok, std::string d) { return ok ? Pass(d) : Fail(d); }

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int Workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

PlantedSegment Plant(const std::string& match, std::size_t rows, double rate,
                     CostRange cost) {
  PlantedSegment s;
  s.match = Configuration::Parse(match);
  s.rows = rows;
  s.conversion_rate = rate;
  s.cost = cost;
  return s;
}

// 100k-row stationary slices: nine attributes of mixed cardinality and
// planted niches of several sizes, so the best configuration changes as the
// visits requirement grows.
const std::vector<CampaignDataset>& StationarySlices() {
  static const std::vector<CampaignDataset> slices = [] {
    std::vector<CampaignDataset> out;
    for (std::uint64_t k = 0; k < 3; ++k) {
      SyntheticSpec spec;
      spec.n_rows = 100000;
      spec.cardinality = {2, 3, 4, 6, 10, 16, 40, 100, 400};
      spec.background_rate = 0.02;
      spec.background_cost = {0.5, 1.5};
      spec.seed = 1000 + k;
      spec.campaign_id = static_cast<std::int64_t>(k + 1);
      spec.emit_true_cvr = true;
      spec.planted_segments = {
          Plant("cat2:0,cat3:1", 6000, 0.30, {0.5, 1.5}),
          Plant("cat2:1,cat4:2", 11000, 0.12, {0.5, 1.5}),
          Plant("cat2:2,cat5:3,cat6:4", 2000, 0.50, {0.5, 1.5}),
      };
      out.push_back(WithProfitability(GenerateSynthetic(spec)));
    }
    return out;
  }();
  return slices;
}

std::vector<std::size_t> PaperLimits() {
  return ExperimentSpec::Defaults(ExperimentId::kI).limits;
}

// ---------------------------------------------------------------------------

Verdict OracleEquivalence() {
  std::mt19937_64 rng(20240601);
  const auto start = Clock::now();
  int runs = 0;
  int mismatches = 0;
  for (int trial = 0; trial < 30; ++trial) {
    testing::RandomDatasetOptions o;
    o.rows = 1 + testing::Below(rng, 500);
    o.attributes = 1 + static_cast<int>(testing::Below(rng, 5));
    o.cardinality = 1 + static_cast<int>(testing::Below(rng, 6));
    o.excluded_fraction = 0.05;
    const CampaignDataset d = testing::RandomScoredDataset(rng, o);
    for (std::size_t limit : {5u, 20u, 50u}) {
      const auto oracle = testing::BruteForceSearch(d, limit, false);
      for (PruningMode mode : {PruningMode::kRowMask, PruningMode::kRejectedSet}) {
        SearchParams p;
        p.limit = limit;
        p.pruning = mode;
        ++runs;
        if (Search(d, p) != oracle) ++mismatches;
      }
    }
  }
  const double seconds = Since(start);
  return Check(mismatches == 0 && seconds < 10.0,
               std::to_string(runs) + " searches on 30 datasets, " +
                   std::to_string(mismatches) + " differ from brute force, " +
                   Fixed(seconds, 2) + " s");
}

Verdict PruningSpeedup() {
  const CampaignDataset& d = StationarySlices()[0];
  SearchParams p;
  p.limit = 5000;
  p.workers = Workers();
  auto timed = [&](PruningMode mode, std::vector<ScoredConfiguration>& out) {
    p.pruning = mode;
    const auto start = Clock::now();
    out = Search(d, p);
    return Since(start);
  };
  std::vector<ScoredConfiguration> none, rowmask, rejected;
  const double t_none = timed(PruningMode::kNone, none);
  const double t_rowmask = timed(PruningMode::kRowMask, rowmask);
  const double t_rejected = timed(PruningMode::kRejectedSet, rejected);
  const bool same = none == rowmask && none == rejected;
  const double speedup = t_none / t_rowmask;
  return Check(same && speedup >= 2.0,
               "100k rows x 9 attributes, limit 5000: unpruned " +
                   Fixed(t_none, 2) + " s, row-mask " + Fixed(t_rowmask, 2) +
                   " s (" + Fixed(speedup, 1) + "x), rejected-set " +
                   Fixed(t_rejected, 2) + " s (" + Fixed(t_none / t_rejected, 1) +
                   "x), rankings " + (same ? "identical" : "DIFFER"));
}

Verdict SgdHandCheck() {
  const double tol = 1e-12;
  ImpressionRecord r;
  r.attributes = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  r.conversion = 1;
  const HashedRow h = HashRow(r, CvrModel::kDefaultHashSpace);

  CvrModel fresh;
  fresh.Update(h, 0.5);
  double worst = 0.0;
  bool counts_ok = true;
  for (std::uint64_t s = 0; s < 9; ++s) {
    worst = std::max(worst, std::abs(fresh.weights()[s] - 0.05));
    counts_ok = counts_ok && fresh.counts()[s] == 1;
  }

  CvrModel still;
  still.set_weight(4, 0.25);
  still.Update(h, 1.0);
  worst = std::max(worst, std::abs(still.weights()[4] - 0.25));
  counts_ok = counts_ok && still.counts()[4] == 1;

  // Second touch with p - y = 0.5.
  ImpressionRecord neg = r;
  neg.conversion = 0;
  const HashedRow hn = HashRow(neg, CvrModel::kDefaultHashSpace);
  CvrModel twice;
  twice.Update(hn, 0.3);
  const double before = twice.weights()[0];
  twice.Update(hn, 0.5);
  const double drop = before - twice.weights()[0];
  worst = std::max(worst, std::abs(drop - 0.1 * 0.5 / std::sqrt(2.0)));
  counts_ok = counts_ok && twice.counts()[0] == 2;

  return Check(worst <= tol && counts_ok,
               "max deviation " + Fixed(worst * 1e15, 3) + "e-15, counts " +
                   (counts_ok ? "ok" : "WRONG"));
}

Verdict GradientProperty() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = 0.01 + testing::Unit(rng);
    CvrModel m(1024, alpha);
    ImpressionRecord r;
    r.attributes = {static_cast<AttributeValue>(testing::Below(rng, 1024))};
    r.conversion = static_cast<int>(testing::Below(rng, 2));
    const HashedRow h = HashRow(r, 1024);
    const std::uint64_t slot = h.slots[0];
    // Touch the slot a few times so the step scale varies.
    const int touches = static_cast<int>(testing::Below(rng, 5));
    for (int t = 0; t < touches; ++t) m.Update(h, m.Predict(h));
    m.set_weight(slot, 6.0 * testing::Unit(rng) - 3.0);
    const double w = m.weights()[slot];
    const double n = static_cast<double>(m.counts()[slot]);

    auto loss = [&](double weight) {
      CvrModel probe = m;
      probe.set_weight(slot, weight);
      const double p = probe.Predict(h);
      return r.conversion == 1 ? -std::log(p) : -std::log(1.0 - p);
    };
    const double eps = 1e-6;
    const double numeric = (loss(w + eps) - loss(w - eps)) / (2 * eps);
    m.Update(h, m.Predict(h));
    const double step = (w - m.weights()[slot]) * std::sqrt(n + 1.0) / alpha;
    const double rel = std::abs(step - numeric) / std::max(std::abs(numeric), 1e-12);
    worst = std::max(worst, rel);
  }
  return Check(worst <= 1e-4,
               "100 random (w, y) pairs, worst relative error " + Fixed(worst * 1e6, 3) +
                   "e-6");
}

Verdict ModelLearnsPlants() {
  const auto start = Clock::now();
  SyntheticSpec spec;
  spec.n_rows = 70000;
  spec.cardinality = {10, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000};
  spec.background_rate = 0.01;
  spec.seed = 5;
  spec.planted_segments = {Plant("cat1:0", 7000, 0.99, {1, 1}),
                           Plant("cat1:1", 7000, 0.99, {1, 1}),
                           Plant("cat1:2", 7000, 0.99, {1, 1})};
  const auto [train, test] = SplitTrainTest(GenerateSynthetic(spec), 50000);
  CvrModel model;
  Train(model, train);
  const ModelMetrics m = EvaluateModel(model, test, 0.5, Workers());

  double rate = 0.0;
  for (auto y : train.conversions()) rate += y;
  rate /= static_cast<double>(train.rows());
  const std::vector<double> constant(test.rows(), rate);
  const ModelMetrics base = ComputeMetrics(constant, test.conversions());
  const double seconds = Since(start);
  const double auc = m.auc.value_or(0.0);
  return Check(auc >= 0.95 && m.log_loss < base.log_loss && seconds < 30.0,
               "50k/20k split: AUC " + Fixed(auc, 4) + ", log loss " +
                   Fixed(m.log_loss, 4) + " vs constant " + Fixed(base.log_loss, 4) +
                   ", " + Fixed(seconds, 1) + " s");
}

Verdict ExperimentOneMonotone(ExperimentReport& out) {
  ExperimentSpec spec = ExperimentSpec::Defaults(ExperimentId::kI);
  spec.limits = PaperLimits();
  spec.workers = Workers();
  out = RunExperiment1(StationarySlices(), spec);
  std::size_t present = 0;
  std::size_t violations = 0;
  for (std::size_t s = 0; s < out.slices.size(); ++s) {
    std::optional<double> previous;
    for (std::size_t k = 0; k < out.keys.size(); ++k) {
      const auto& c = out.cell(s, "best", k);
      if (!c) continue;
      ++present;
      if (previous && c->value > *previous) ++violations;
      previous = c->value;
    }
  }
  std::string series;
  for (std::size_t k = 0; k < out.keys.size(); ++k) {
    const auto& c = out.cell(0, "best", k);
    series += (k ? " " : "") + (c ? Fixed(c->value, 4) : std::string("-"));
  }
  return Check(violations == 0 && present == out.slices.size() * out.keys.size(),
               std::to_string(out.slices.size()) + " slices x " +
                   std::to_string(out.keys.size()) + " limits, " +
                   std::to_string(violations) + " increases; slice 1: " + series);
}

Verdict ExperimentFiveDominance() {
  SyntheticSpec spec;
  spec.n_rows = 100000;
  spec.cardinality = {10, 10, 6, 8, 12, 20, 30, 50, 100};
  spec.background_rate = 0.02;
  spec.background_cost = {0.5, 1.5};
  spec.seed = 13;
  spec.emit_true_cvr = true;
  spec.planted_segments = {Plant("cat1:0,cat2:0", 13000, 0.5, {0.5, 0.5})};
  const CampaignDataset d = WithProfitability(GenerateSynthetic(spec));
  ExperimentSpec e = ExperimentSpec::Defaults(ExperimentId::kV);
  e.limits = PaperLimits();
  e.workers = Workers();
  const ExperimentReport r = RunExperiment5({d}, e);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < r.keys.size(); ++k) {
    const auto& strict = r.cell(0, "strict", k);
    const auto& relaxed = r.cell(0, "relaxed", k);
    if (!relaxed || (strict && relaxed->value < strict->value)) ++violations;
  }
  const std::size_t k15 = static_cast<std::size_t>(
      std::find(r.keys.begin(), r.keys.end(), 15000.0) - r.keys.begin());
  const Configuration niche = Configuration::Parse("cat1:0,cat2:0");
  const auto& relaxed = r.cell(0, "relaxed", k15);
  const auto& strict = r.cell(0, "strict", k15);
  const bool relaxed_niche = relaxed && relaxed->configs.at(0) == niche;
  const bool strict_not = !strict || strict->configs.at(0) != niche;
  return Check(violations == 0 && relaxed_niche && strict_not,
               std::to_string(violations) + " dominance violations over " +
                   std::to_string(r.keys.size()) + " limits; at 15000 relaxed -> " +
                   (relaxed ? relaxed->configs.at(0).ToString() +
                                  " (" + std::to_string(relaxed->matched_rows) + " rows)"
                            : std::string("none")) +
                   ", strict -> " +
                   (strict ? strict->configs.at(0).ToString() + " (" +
                                 std::to_string(strict->matched_rows) + " rows)"
                           : std::string("none")));
}

bool SameCell(const std::optional<ReportCell>& a, const std::optional<ReportCell>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->value == b->value && a->matched_rows == b->matched_rows &&
         a->configs == b->configs;
}

Verdict ExperimentDegeneracies(const ExperimentReport& one) {
  const auto& slices = StationarySlices();
  std::size_t compared = 0;
  std::size_t differ = 0;
  for (std::size_t k = 0; k < one.keys.size(); ++k) {
    const std::size_t limit = static_cast<std::size_t>(one.keys[k]);
    ExperimentSpec two = ExperimentSpec::Defaults(ExperimentId::kII);
    two.limits = {limit};
    two.slice_sizes = {limit};
    two.workers = Workers();
    const ExperimentReport r2 = RunExperiment2(slices, two);

    ExperimentSpec three = ExperimentSpec::Defaults(ExperimentId::kIII);
    three.limits = {limit};
    three.prefix_fractions = {1.0};
    three.workers = Workers();
    const ExperimentReport r3 = RunExperiment3(slices, three);

    ExperimentSpec four = ExperimentSpec::Defaults(ExperimentId::kIV);
    four.limits = {limit};
    four.thresholds = {ThresholdKind::kNone};
    four.workers = Workers();
    const ExperimentReport r4 = RunExperiment4(slices, four);

    const std::string seq = "sequential_" + std::to_string(limit);
    for (std::size_t s = 0; s < slices.size(); ++s) {
      const auto& base = one.cell(s, "best", k);
      compared += 3;
      if (!SameCell(r2.cell(s, seq, 0), base)) ++differ;
      if (!SameCell(r4.cell(s, "none", 0), base)) ++differ;
      const auto& c3 = r3.cell(s, "limit_" + std::to_string(limit), 0);
      const bool same3 = c3.has_value() == base.has_value() &&
                         (!c3 || (c3->evaluated_avg == base->value &&
                                  c3->configs == base->configs && c3->value == 1.0));
      if (!same3) ++differ;
    }
  }
  return Check(differ == 0, std::to_string(compared) + " cells compared, " +
                                std::to_string(differ) + " differ");
}

Verdict ExperimentThreeExtrapolation() {
  ExperimentSpec spec = ExperimentSpec::Defaults(ExperimentId::kIII);
  spec.limits = PaperLimits();
  spec.prefix_fractions = {0.1};
  spec.workers = Workers();
  const ExperimentReport r = RunExperiment3(StationarySlices(), spec);
  double worst = std::numeric_limits<double>::infinity();
  double total = 0.0;
  std::size_t present = 0;
  std::size_t expected = 0;
  for (std::size_t s = 0; s < r.slices.size(); ++s) {
    for (const auto& name : r.series) {
      ++expected;
      if (const auto& c = r.cell(s, name, 0)) {
        worst = std::min(worst, c->value);
        total += c->value;
        ++present;
      }
    }
  }
  const double mean = present ? total / static_cast<double>(present) : 0.0;
  return Check(present == expected && worst >= 0.85,
               std::to_string(present) + "/" + std::to_string(expected) +
                   " cells at f=0.1, worst ratio " + Fixed(worst, 4) + ", mean " +
                   Fixed(mean, 4));
}

Verdict Determinism() {
  testing::TempDir dir("acceptance");
  auto f = [&](const std::string& name) { return dir.file(name); };
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream err;
    const int code = cli::RunCli(args, sink, err);
    if (code != 0) {
      throw std::runtime_error(args[0] + " exited " + std::to_string(code) + ": " +
                               err.str());
    }
  };
  testing::WriteFile(f("plan.cfg"),
                     "rows = 20000\ncardinality = 6\nbackground_rate = 0.03\n"
                     "segment.a.match = cat1:1,cat2:2\nsegment.a.rows = 1500\n"
                     "segment.a.rate = 0.4\nsegment.a.cost = 0.3,0.6\n");
  run({"gen", "--planted", f("plan.cfg"), "--seed", "11", "--output", f("log.csv")});
  run({"split", "--input", f("log.csv"), "--train-rows", "12000", "--train-out",
       f("train.csv"), "--test-out", f("test.csv")});
  run({"train", "--input", f("train.csv"), "--model", f("m.bin")});
  run({"predict", "--input", f("test.csv"), "--model", f("m.bin"), "--output",
       f("scored.csv")});
  run({"search", "--input", f("scored.csv"), "--limit", "200", "--workers", "1",
       "--output", f("w1.csv")});
  run({"search", "--input", f("scored.csv"), "--limit", "200", "--workers", "8",
       "--output", f("w8.csv")});
  run({"experiment", "--id", "II", "--input", f("scored.csv"), "--limits",
       "500,1000", "--slice-sizes", "250", "--output-dir", f("exp")});
  const bool workers_same =
      testing::ReadFile(f("w1.csv")) == testing::ReadFile(f("w8.csv")) &&
      !testing::ReadFile(f("w1.csv")).empty();

  int replayed = 0;
  int failed = 0;
  for (const std::string m :
       {"log.csv.manifest.json", "train.csv.manifest.json", "m.bin.manifest.json",
        "scored.csv.manifest.json", "w8.csv.manifest.json", "exp/manifest.json"}) {
    std::ostringstream out, err;
    ++replayed;
    if (cli::RunCli({"replay", f(m)}, out, err) != 0) ++failed;
  }
  return Check(workers_same && failed == 0,
               std::string("search 1 vs 8 workers ") +
                   (workers_same ? "byte-identical" : "DIFFER") + "; " +
                   std::to_string(replayed - failed) + "/" + std::to_string(replayed) +
                   " manifests replayed to identical outputs");
}

Verdict CriteoReproduction() {
  const char* path = std::getenv("RTBCONF_CRITEO_LOG");
  if (path == nullptr || !fs::exists(path)) {
    return {Outcome::kSkip, "set RTBCONF_CRITEO_LOG to the Criteo attribution log"};
  }
  const LoadResult loaded = LoadLog(path);
  const CampaignDataset& all = loaded.dataset;
  const std::size_t test_rows = 10000000;
  if (all.rows() <= test_rows) return Fail("log has only " + std::to_string(all.rows()) + " rows");
  const auto [train, test] = SplitTrainTest(all, all.rows() - test_rows);
  CvrModel model;
  Train(model, train);
  const ModelMetrics m = EvaluateModel(model, test, 0.5, Workers());
  const double auc = m.auc.value_or(0.0);
  const bool metrics_ok = std::abs(m.accuracy - 0.9510) <= 0.005 &&
                          std::abs(auc - 0.8299) <= 0.01 &&
                          std::abs(m.log_loss - 0.1572) <= 0.005;

  const CampaignSlices slices =
      MakeCampaignSlices(WithProfitability(PredictAll(model, test, Workers())), 100000);
  bool table_ok = !slices.slices.empty();
  std::string row;
  if (table_ok) {
    const std::vector<double> expected = {4206.8, 3244.8, 2849.3, 1533.5, 1533.5,
                                          1478.7, 1478.7, 1478.7, 1478.7, 1478.7};
    ExperimentSpec spec = ExperimentSpec::Defaults(ExperimentId::kI);
    spec.workers = Workers();
    const ExperimentReport r = RunExperiment1({slices.slices[0]}, spec);
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const auto& c = r.cell(0, "best", k);
      row += (k ? " " : "") + (c ? Fixed(c->value, 1) : std::string("-"));
      table_ok = table_ok && c && std::abs(c->value - expected[k]) <= 0.01 * expected[k];
    }
  }
  const bool count_ok = slices.slices.size() == 17;
  return Check(metrics_ok && table_ok && count_ok,
               "accuracy " + Fixed(m.accuracy, 4) + ", AUC " + Fixed(auc, 4) +
                   ", log loss " + Fixed(m.log_loss, 4) + "; " +
                   std::to_string(slices.slices.size()) + " slices; slice 1: " + row);
}

}  // namespace
}  // namespace rtbconf

int main() {
  using rtbconf::Outcome;
  using rtbconf::Verdict;
  rtbconf::ExperimentReport exp1;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle equivalence", rtbconf::OracleEquivalence},
      {"pruning speedup", rtbconf::PruningSpeedup},
      {"SGD hand-check", rtbconf::SgdHandCheck},
      {"gradient property", rtbconf::GradientProperty},
      {"model learns plants", rtbconf::ModelLearnsPlants},
      {"experiment I monotonicity", [&] { return rtbconf::ExperimentOneMonotone(exp1); }},
      {"experiment V dominance", rtbconf::ExperimentFiveDominance},
      {"experiment degeneracies", [&] { return rtbconf::ExperimentDegeneracies(exp1); }},
      {"experiment III extrapolation", rtbconf::ExperimentThreeExtrapolation},
      {"determinism", rtbconf::Determinism},
      {"Criteo reproduction", rtbconf::CriteoReproduction},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = rtbconf::Clock::now();
    Verdict v{Outcome::kFail, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::kPass   ? "PASS"
                      : v.outcome == Outcome::kSkip ? "SKIP"
                                                    : "FAIL";
    if (v.outcome == Outcome::kFail) ++failures;
    std::cout << tag << "  " << (i + 1) << ". " << criteria[i].first << ": "
              << v.detail << " [" << rtbconf::Fixed(rtbconf::Since(start), 1)
              << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
