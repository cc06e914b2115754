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

#include "rtbconf/strategies.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "parallel.h"
#include "rtbconf/errors.h"
#include "rtbconf/kv_config.h"
#include "rtbconf/scoring.h"
#include "rtbconf/text_format.h"

namespace rtbconf {
namespace {

using Clock = std::chrono::steady_clock;
using SliceCells = std::vector<std::vector<std::optional<ReportCell>>>;

std::vector<std::size_t> Steps(std::size_t from, std::size_t to,
                               std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t v = from; v <= to; v += step) out.push_back(v);
  return out;
}

std::size_t AsCount(const std::string& key, double v) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
    throw ArgumentError("'" + key + "' needs positive integers");
  }
  return static_cast<std::size_t>(v);
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

SearchParams BaseParams(const ExperimentSpec& spec, std::size_t limit,
                        int workers) {
  SearchParams p;
  p.limit = limit;
  p.max_subset_size = spec.max_subset_size;
  p.workers = workers;
  p.pruning = spec.pruning;
  p.top_k = 1;
  return p;
}

std::optional<ScoredConfiguration> Best(const CampaignDataset& d,
                                        SearchParams params) {
  params.top_k = 1;
  if (d.empty()) return std::nullopt;
  auto ranking = Search(d, params);
  if (ranking.empty()) return std::nullopt;
  return std::move(ranking.front());
}

ReportCell CellFrom(const ScoredConfiguration& c, double value) {
  ReportCell cell;
  cell.value = value;
  cell.matched_rows = c.matched_rows;
  cell.quality_score = c.quality_score;
  cell.configs.push_back(c.config);
  return cell;
}

ExperimentReport NewReport(const std::vector<CampaignDataset>& slices,
                           const ExperimentSpec& spec, ExperimentId id,
                           std::string key_name, std::vector<double> keys,
                           std::vector<std::string> series) {
  spec.Validate();
  if (slices.empty()) throw ArgumentError("no slices to run on");
  for (const auto& s : slices) {
    if (!s.has_profitability()) {
      throw ArgumentError("every slice needs a profitability column");
    }
  }
  ExperimentReport r;
  r.id = id;
  r.spec = spec;
  r.spec.id = id;
  r.key_name = std::move(key_name);
  r.keys = std::move(keys);
  r.series = std::move(series);
  for (const auto& s : slices) r.slices.push_back({s.campaign_id(), s.rows()});
  return r;
}

// Runs fn(slice, search_workers) -> cells[series][key] for every slice,
// slices in parallel when there is more than one.
template <typename Fn>
void RunSlices(ExperimentReport& report,
               const std::vector<CampaignDataset>& slices, Fn&& fn) {
  const int workers = report.spec.workers;
  const int inner = slices.size() > 1 ? 1 : workers;
  report.cells.assign(slices.size(), {});
  internal::ParallelForEach(slices.size(), workers, [&](std::size_t i) {
    SliceCells cells(report.series.size(),
                     std::vector<std::optional<ReportCell>>(report.keys.size()));
    fn(slices[i], inner, cells);
    report.cells[i] = std::move(cells);
  });
  report.Aggregate();
}

std::vector<double> AsKeys(const std::vector<std::size_t>& limits) {
  return {limits.begin(), limits.end()};
}

std::vector<std::size_t> MatchingRows(const CampaignDataset& d,
                                      const Configuration& c) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    if (d.Matches(c, r)) rows.push_back(r);
  }
  return rows;
}

nlohmann::ordered_json ConfigToJson(const Configuration& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json columns = nlohmann::ordered_json::array();
  for (int a : c.attributes) columns.push_back("cat" + std::to_string(a + 1));
  j["selected_columns"] = std::move(columns);
  j["values"] = c.values;
  return j;
}

}  // namespace

ExperimentId ParseExperimentId(const std::string& text) {
  if (text == "I" || text == "1") return ExperimentId::kI;
  if (text == "II" || text == "2") return ExperimentId::kII;
  if (text == "III" || text == "3") return ExperimentId::kIII;
  if (text == "IV" || text == "4") return ExperimentId::kIV;
  if (text == "V" || text == "5") return ExperimentId::kV;
  throw ArgumentError("unknown experiment id '" + text + "' (I..V)");
}

std::string ExperimentName(ExperimentId id) {
  static const char* const kNames[] = {"I", "II", "III", "IV", "V"};
  return kNames[static_cast<int>(id) - 1];
}

ThresholdKind ParseThresholdKind(const std::string& text) {
  if (text == "none") return ThresholdKind::kNone;
  if (text == "cost") return ThresholdKind::kCost;
  if (text == "profitability") return ThresholdKind::kProfitability;
  throw ArgumentError("unknown threshold kind '" + text +
                      "' (none, cost, profitability)");
}

std::string ThresholdKindName(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::kNone: return "none";
    case ThresholdKind::kCost: return "cost";
    case ThresholdKind::kProfitability: return "profitability";
  }
  return "?";
}

ExperimentSpec ExperimentSpec::Defaults(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  s.limits = id == ExperimentId::kII ? Steps(5000, 30000, 5000)
                                     : Steps(5000, 50000, 5000);
  s.slice_sizes = {1000, 2500};
  for (int i = 1; i <= 10; ++i) s.prefix_fractions.push_back(i / 10.0);
  s.thresholds = {ThresholdKind::kCost, ThresholdKind::kProfitability};
  return s;
}

void ExperimentSpec::Validate() const {
  if (limits.empty()) throw ArgumentError("limits must not be empty");
  for (std::size_t i = 0; i < limits.size(); ++i) {
    if (limits[i] < 1) throw ArgumentError("limits must be positive");
    if (i > 0 && limits[i] <= limits[i - 1]) {
      throw ArgumentError("limits must be strictly ascending");
    }
  }
  if (id == ExperimentId::kII && slice_sizes.empty()) {
    throw ArgumentError("experiment II needs slice sizes");
  }
  for (std::size_t s : slice_sizes) {
    if (s < 1) throw ArgumentError("slice sizes must be positive");
  }
  if (id == ExperimentId::kIII && prefix_fractions.empty()) {
    throw ArgumentError("experiment III needs prefix fractions");
  }
  for (double f : prefix_fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw ArgumentError("prefix fractions must be in (0,1]");
    }
  }
  if (id == ExperimentId::kIV && thresholds.empty()) {
    throw ArgumentError("experiment IV needs threshold kinds");
  }
  if (workers < 1) throw ArgumentError("workers must be >= 1");
  if (max_subset_size < 1) throw ArgumentError("max subset size must be >= 1");
}

ExperimentSpec ParseExperimentSpec(const std::string& text,
                                   ExperimentSpec base) {
  ExperimentSpec spec = std::move(base);
  for (const KeyValue& kv : ParseKeyValues(text)) {
    const std::string& key = kv.key;
    const std::string& value = kv.value;
    if (key == "experiment") {
      const ExperimentId id = ParseExperimentId(value);
      if (id != spec.id) {
        // Switching experiment resets the experiment-specific limit grid.
        spec.limits = ExperimentSpec::Defaults(id).limits;
        spec.id = id;
      }
    } else if (key == "limits") {
      spec.limits.clear();
      for (double v : ParseDoubleList(key, value)) {
        spec.limits.push_back(AsCount(key, v));
      }
    } else if (key == "slice_sizes") {
      spec.slice_sizes.clear();
      for (double v : ParseDoubleList(key, value)) {
        spec.slice_sizes.push_back(AsCount(key, v));
      }
    } else if (key == "fractions") {
      spec.prefix_fractions = ParseDoubleList(key, value);
    } else if (key == "thresholds") {
      spec.thresholds.clear();
      std::size_t begin = 0;
      while (begin <= value.size()) {
        std::size_t end = value.find(',', begin);
        if (end == std::string::npos) end = value.size();
        std::string item = value.substr(begin, end - begin);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        spec.thresholds.push_back(ParseThresholdKind(item));
        begin = end + 1;
      }
    } else if (key == "invert_threshold") {
      spec.invert_threshold = ParseBool(key, value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(ParseInteger(key, value));
    } else if (key == "workers") {
      spec.workers = static_cast<int>(ParseInteger(key, value));
    } else if (key == "max_subset_size") {
      spec.max_subset_size = static_cast<int>(ParseInteger(key, value));
    } else if (key == "pruning") {
      spec.pruning = ParsePruningMode(value);
    } else if (key == "record_time") {
      spec.record_time = ParseBool(key, value);
    } else {
      throw ArgumentError("unknown key '" + key + "' on line " +
                          std::to_string(kv.line));
    }
  }
  spec.Validate();
  return spec;
}

std::size_t ExperimentReport::SeriesIndex(const std::string& name) const {
  const auto it = std::find(series.begin(), series.end(), name);
  if (it == series.end()) throw ArgumentError("no series '" + name + "'");
  return static_cast<std::size_t>(it - series.begin());
}

const std::optional<ReportCell>& ExperimentReport::cell(
    std::size_t slice, const std::string& name, std::size_t key) const {
  return cells.at(slice).at(SeriesIndex(name)).at(key);
}

void ExperimentReport::Aggregate() {
  aggregates.assign(series.size(), std::vector<ExperimentReport::Totals>(
                                       keys.size()));
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      auto& agg = aggregates[s][k];
      for (const auto& slice : cells) {
        if (const auto& c = slice[s][k]) {
          agg.sum += c->value;
          ++agg.present;
        }
      }
      agg.mean = agg.present ? agg.sum / static_cast<double>(agg.present) : 0.0;
    }
  }
}

ExperimentReport RunExperiment1(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec) {
  ExperimentReport report = NewReport(slices, spec, ExperimentId::kI, "limit",
                                      AsKeys(spec.limits), {"best"});
  RunSlices(report, slices,
            [&](const CampaignDataset& d, int workers, SliceCells& cells) {
              for (std::size_t k = 0; k < spec.limits.size(); ++k) {
                const auto start = Clock::now();
                auto best = Best(d, BaseParams(spec, spec.limits[k], workers));
                if (!best) continue;
                ReportCell cell = CellFrom(*best, best->avg_profitability);
                if (spec.record_time) cell.seconds = Seconds(start);
                cells[0][k] = std::move(cell);
              }
            });
  return report;
}

ExperimentReport RunExperiment2(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec) {
  std::vector<std::string> series = {"baseline"};
  for (std::size_t s : spec.slice_sizes) {
    series.push_back("sequential_" + std::to_string(s));
  }
  ExperimentReport report = NewReport(slices, spec, ExperimentId::kII, "limit",
                                      AsKeys(spec.limits), series);
  RunSlices(report, slices, [&](const CampaignDataset& d, int workers,
                                SliceCells& cells) {
    for (std::size_t k = 0; k < spec.limits.size(); ++k) {
      const std::size_t total = spec.limits[k];
      auto start = Clock::now();
      if (auto best = Best(d, BaseParams(spec, total, workers))) {
        ReportCell cell = CellFrom(*best, best->avg_profitability);
        cell.rounds = 1;
        if (spec.record_time) cell.seconds = Seconds(start);
        cells[0][k] = std::move(cell);
      }
      for (std::size_t i = 0; i < spec.slice_sizes.size(); ++i) {
        const std::size_t small = spec.slice_sizes[i];
        const std::size_t rounds = (total + small - 1) / small;
        start = Clock::now();
        const SequentialResult seq =
            SearchSequential(d, BaseParams(spec, small, workers), rounds);
        if (seq.rounds.empty()) continue;
        ReportCell cell;
        double sum = 0.0;
        for (const SequentialRound& r : seq.rounds) {
          sum += r.best.profitability_sum;
          cell.matched_rows += r.best.matched_rows;
          cell.configs.push_back(r.best.config);
        }
        cell.value = sum / static_cast<double>(cell.matched_rows);
        cell.quality_score =
            QualityScore(cell.value, cell.matched_rows, QualityScoreParams{total});
        cell.rounds = seq.rounds.size();
        cell.early_stop = seq.early_stop;
        if (spec.record_time) cell.seconds = Seconds(start);
        cells[i + 1][k] = std::move(cell);
      }
    }
  });
  return report;
}

ExperimentReport RunExperiment3(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec) {
  std::vector<std::string> series;
  for (std::size_t limit : spec.limits) {
    series.push_back("limit_" + std::to_string(limit));
  }
  ExperimentReport report =
      NewReport(slices, spec, ExperimentId::kIII, "fraction",
                spec.prefix_fractions, series);
  RunSlices(report, slices, [&](const CampaignDataset& d, int workers,
                                SliceCells& cells) {
    for (std::size_t l = 0; l < spec.limits.size(); ++l) {
      const std::size_t limit = spec.limits[l];
      const auto optimum = Best(d, BaseParams(spec, limit, workers));
      if (!optimum) continue;
      for (std::size_t k = 0; k < spec.prefix_fractions.size(); ++k) {
        const double f = spec.prefix_fractions[k];
        const auto start = Clock::now();
        const auto prefix_rows = std::min<std::size_t>(
            d.rows(), static_cast<std::size_t>(
                          std::llround(f * static_cast<double>(d.rows()))));
        const auto prefix_limit = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::llround(f * static_cast<double>(limit))));
        const CampaignDataset prefix = d.Range(0, prefix_rows);
        const auto chosen = Best(prefix, BaseParams(spec, prefix_limit, workers));
        if (!chosen) continue;
        const auto rows = MatchingRows(d, chosen->config);
        const ProfitabilityAverage full = AverageProfitability(d, rows);
        ReportCell cell;
        if (optimum->avg_profitability == 0.0) {
          if (full.avg != 0.0) continue;
          cell.value = 1.0;
        } else {
          cell.value = full.avg / optimum->avg_profitability;
        }
        cell.evaluated_avg = full.avg;
        cell.matched_rows = full.count;
        cell.quality_score =
            QualityScore(full.avg, full.count, QualityScoreParams{limit});
        cell.configs.push_back(chosen->config);
        if (spec.record_time) cell.seconds = Seconds(start);
        cells[l][k] = std::move(cell);
      }
    }
  });
  return report;
}

double SliceMedian(const CampaignDataset& slice, ThresholdKind kind) {
  if (slice.empty()) throw ArgumentError("median of an empty slice");
  std::vector<double> v;
  v.reserve(slice.rows());
  if (kind == ThresholdKind::kCost) {
    v.assign(slice.costs().begin(), slice.costs().end());
  } else if (kind == ThresholdKind::kProfitability) {
    if (!slice.has_profitability()) {
      throw ArgumentError("profitability threshold needs a profitability column");
    }
    for (double p : slice.profitability()) v.push_back(std::isnan(p) ? 0.0 : p);
  } else {
    throw ArgumentError("no median for threshold kind none");
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<std::size_t> ThresholdRows(const CampaignDataset& slice,
                                       ThresholdKind kind, bool invert) {
  std::vector<std::size_t> rows;
  if (kind == ThresholdKind::kNone || slice.empty()) {
    rows.resize(slice.rows());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    return rows;
  }
  const double median = SliceMedian(slice, kind);
  for (std::size_t r = 0; r < slice.rows(); ++r) {
    double v;
    bool keep_low;  // keep rows at or below the median
    if (kind == ThresholdKind::kCost) {
      v = slice.costs()[r];
      keep_low = !invert;
    } else {
      v = slice.profitability()[r];
      if (std::isnan(v)) v = 0.0;
      keep_low = invert;
    }
    if (keep_low ? v <= median : v >= median) rows.push_back(r);
  }
  return rows;
}

ExperimentReport RunExperiment4(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec) {
  std::vector<std::string> series = {"baseline"};
  for (ThresholdKind t : spec.thresholds) series.push_back(ThresholdKindName(t));
  ExperimentReport report = NewReport(slices, spec, ExperimentId::kIV, "limit",
                                      AsKeys(spec.limits), series);
  RunSlices(report, slices, [&](const CampaignDataset& d, int workers,
                                SliceCells& cells) {
    for (std::size_t s = 0; s < series.size(); ++s) {
      const ThresholdKind kind =
          s == 0 ? ThresholdKind::kNone : spec.thresholds[s - 1];
      const CampaignDataset kept =
          kind == ThresholdKind::kNone
              ? d
              : d.Select(ThresholdRows(d, kind, spec.invert_threshold));
      for (std::size_t k = 0; k < spec.limits.size(); ++k) {
        const auto start = Clock::now();
        auto best = Best(kept, BaseParams(spec, spec.limits[k], workers));
        if (!best) continue;
        ReportCell cell = CellFrom(*best, best->avg_profitability);
        if (spec.record_time) cell.seconds = Seconds(start);
        cells[s][k] = std::move(cell);
      }
    }
  });
  return report;
}

ExperimentReport RunExperiment5(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec) {
  ExperimentReport report =
      NewReport(slices, spec, ExperimentId::kV, "limit", AsKeys(spec.limits),
                {"strict", "relaxed", "delta"});
  RunSlices(report, slices, [&](const CampaignDataset& d, int workers,
                                SliceCells& cells) {
    for (std::size_t k = 0; k < spec.limits.size(); ++k) {
      SearchParams params = BaseParams(spec, spec.limits[k], workers);
      auto start = Clock::now();
      const auto strict = Best(d, params);
      if (strict) {
        cells[0][k] = CellFrom(*strict, strict->quality_score);
        if (spec.record_time) cells[0][k]->seconds = Seconds(start);
      }
      params.allow_below_limit = true;
      start = Clock::now();
      const auto relaxed = Best(d, params);
      if (relaxed) {
        cells[1][k] = CellFrom(*relaxed, relaxed->quality_score);
        if (spec.record_time) cells[1][k]->seconds = Seconds(start);
      }
      if (strict && relaxed) {
        ReportCell delta;
        delta.value = relaxed->quality_score - strict->quality_score;
        cells[2][k] = delta;
      }
    }
  });
  return report;
}

ExperimentReport RunExperiment(const std::vector<CampaignDataset>& slices,
                               const ExperimentSpec& spec) {
  switch (spec.id) {
    case ExperimentId::kI: return RunExperiment1(slices, spec);
    case ExperimentId::kII: return RunExperiment2(slices, spec);
    case ExperimentId::kIII: return RunExperiment3(slices, spec);
    case ExperimentId::kIV: return RunExperiment4(slices, spec);
    case ExperimentId::kV: return RunExperiment5(slices, spec);
  }
  throw ArgumentError("unknown experiment");
}

nlohmann::ordered_json SpecToJson(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["experiment"] = ExperimentName(spec.id);
  j["limits"] = spec.limits;
  j["slice_sizes"] = spec.slice_sizes;
  j["fractions"] = spec.prefix_fractions;
  nlohmann::ordered_json thresholds = nlohmann::ordered_json::array();
  for (ThresholdKind t : spec.thresholds) thresholds.push_back(ThresholdKindName(t));
  j["thresholds"] = std::move(thresholds);
  j["invert_threshold"] = spec.invert_threshold;
  j["seed"] = spec.seed;
  j["max_subset_size"] = spec.max_subset_size;
  j["pruning"] = PruningModeName(spec.pruning);
  j["record_time"] = spec.record_time;
  return j;
}

nlohmann::ordered_json ReportToJson(const ExperimentReport& report,
                                    const std::string& code_version) {
  const bool integral_keys = report.key_name == "limit";
  auto key_json = [&](std::size_t k) {
    return integral_keys
               ? nlohmann::ordered_json(
                     static_cast<std::uint64_t>(report.keys[k]))
               : nlohmann::ordered_json(report.keys[k]);
  };
  nlohmann::ordered_json j;
  j["experiment"] = ExperimentName(report.id);
  j["code_version"] = code_version;
  j["spec"] = SpecToJson(report.spec);
  j["key_name"] = report.key_name;
  nlohmann::ordered_json keys = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < report.keys.size(); ++k) keys.push_back(key_json(k));
  j["keys"] = std::move(keys);
  j["series"] = report.series;
  nlohmann::ordered_json slices = nlohmann::ordered_json::array();
  for (const SliceInfo& s : report.slices) {
    slices.push_back({{"campaign_id", s.campaign_id}, {"rows", s.rows}});
  }
  j["slices"] = std::move(slices);

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    for (std::size_t s = 0; s < report.series.size(); ++s) {
      for (std::size_t k = 0; k < report.keys.size(); ++k) {
        nlohmann::ordered_json c;
        c["slice"] = i + 1;
        c["series"] = report.series[s];
        c[report.key_name] = key_json(k);
        const auto& cell = report.cells[i][s][k];
        c["present"] = cell.has_value();
        if (cell) {
          c["value"] = cell->value;
          c["matched_rows"] = cell->matched_rows;
          c["quality_score"] = cell->quality_score;
          if (report.id == ExperimentId::kII) {
            c["rounds"] = cell->rounds;
            c["early_stop"] = cell->early_stop;
          }
          if (report.id == ExperimentId::kIII) {
            c["evaluated_avg_profitability"] = cell->evaluated_avg;
          }
          nlohmann::ordered_json configs = nlohmann::ordered_json::array();
          for (const auto& config : cell->configs) {
            configs.push_back(ConfigToJson(config));
          }
          c["configurations"] = std::move(configs);
          if (report.spec.record_time) c["elapsed_seconds"] = cell->seconds;
        }
        cells.push_back(std::move(c));
      }
    }
  }
  j["cells"] = std::move(cells);

  nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < report.series.size(); ++s) {
    for (std::size_t k = 0; k < report.keys.size(); ++k) {
      const auto& a = report.aggregates[s][k];
      nlohmann::ordered_json row;
      row["series"] = report.series[s];
      row[report.key_name] = key_json(k);
      row["sum"] = a.sum;
      row["mean"] = a.mean;
      row["present"] = a.present;
      aggregates.push_back(std::move(row));
    }
  }
  j["aggregates"] = std::move(aggregates);
  return j;
}

void WriteFigureTable(std::ostream& out, const ExperimentReport& report,
                      char delimiter) {
  const char d = delimiter;
  const bool integral_keys = report.key_name == "limit";
  out << "series" << d << report.key_name << d << "sum" << d << "mean" << d
      << "present";
  for (std::size_t i = 0; i < report.slices.size(); ++i) {
    out << d << "slice" << (i + 1);
  }
  out << '\n';
  for (std::size_t s = 0; s < report.series.size(); ++s) {
    for (std::size_t k = 0; k < report.keys.size(); ++k) {
      const auto& a = report.aggregates[s][k];
      out << report.series[s] << d;
      if (integral_keys) {
        out << static_cast<std::uint64_t>(report.keys[k]);
      } else {
        out << FormatShortest(report.keys[k]);
      }
      out << d << FormatShortest(a.sum) << d << FormatShortest(a.mean) << d
          << a.present;
      for (const auto& slice : report.cells) {
        out << d;
        if (const auto& c = slice[s][k]) out << FormatShortest(c->value);
      }
      out << '\n';
    }
  }
}

}  // namespace rtbconf
