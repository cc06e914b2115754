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

// The five campaign strategies, run over a list of campaign slices.
//
//   I    best configuration for each visits requirement.
//   II   ceil(V / s) sequential configurations of at least s visits each
//        (matched rows removed between rounds) against one configuration of
//        at least V visits. The sequential value is the visit-weighted mean
//        profitability of the selected union.
//   III  search a time-ordered prefix holding a fraction f of the slice with
//        the requirement scaled to f * limit, then re-evaluate the chosen
//        configuration on the whole slice. The value is the ratio of its
//        whole-slice average profitability to the whole-slice optimum.
//   IV   keep the half of the slice on one side of the median cost (rows at
//        or below it) or median profitability (rows at or above it), ties
//        kept, and search the kept rows.
//   V    top quality score with and without rejecting configurations under
//        the requirement.
//
// Every report cell is either present or absent (nothing qualified); the
// aggregates of a row are the sum and mean over present cells.

#ifndef RTBCONF_STRATEGIES_H_
#define RTBCONF_STRATEGIES_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtbconf/config_search.h"
#include "rtbconf/dataset.h"

namespace rtbconf {

enum class ExperimentId { kI = 1, kII, kIII, kIV, kV };
enum class ThresholdKind { kNone, kCost, kProfitability };

// "I".."V" (or 1..5); throws ArgumentError otherwise.
ExperimentId ParseExperimentId(const std::string& text);
std::string ExperimentName(ExperimentId id);
ThresholdKind ParseThresholdKind(const std::string& text);
std::string ThresholdKindName(ThresholdKind kind);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::kI;
  std::vector<std::size_t> limits;          // ascending
  std::vector<std::size_t> slice_sizes;     // experiment II
  std::vector<double> prefix_fractions;     // experiment III, in (0, 1]
  std::vector<ThresholdKind> thresholds;    // experiment IV
  // Experiment IV direction: keep expensive / unprofitable rows instead.
  bool invert_threshold = false;
  std::uint64_t seed = 42;
  int workers = 1;
  int max_subset_size = kMaxAttributes;
  PruningMode pruning = PruningMode::kRowMask;
  bool record_time = false;

  // Defaults for `id`: limits 5k..50k step 5k (5k..30k for II), slice
  // sizes {1000, 2500}, fractions 0.1..1.0 step 0.1, thresholds
  // {cost, profitability}.
  static ExperimentSpec Defaults(ExperimentId id);
  void Validate() const;
};

// Parses `key = value` lines over `base`. Keys: experiment, limits,
// slice_sizes, fractions, thresholds, invert_threshold, seed, workers,
// max_subset_size, pruning, record_time.
ExperimentSpec ParseExperimentSpec(const std::string& text, ExperimentSpec base);

struct ReportCell {
  double value = 0.0;  // the headline number of the series
  std::size_t matched_rows = 0;
  double quality_score = 0.0;
  std::vector<Configuration> configs;  // the selected configuration(s)
  std::size_t rounds = 0;              // experiment II
  bool early_stop = false;             // experiment II
  double evaluated_avg = 0.0;          // experiment III: whole-slice average
  double seconds = 0.0;                // only with record_time
};

struct SliceInfo {
  std::int64_t campaign_id = 0;
  std::size_t rows = 0;
};

struct ExperimentReport {
  ExperimentId id = ExperimentId::kI;
  ExperimentSpec spec;
  std::string key_name;                 // "limit" or "fraction"
  std::vector<double> keys;
  std::vector<std::string> series;
  std::vector<SliceInfo> slices;
  // cells[slice][series][key]
  std::vector<std::vector<std::vector<std::optional<ReportCell>>>> cells;

  struct Totals {
    double sum = 0.0;
    double mean = 0.0;
    std::size_t present = 0;
  };
  // aggregates[series][key], recomputed from `cells` by Aggregate().
  std::vector<std::vector<Totals>> aggregates;

  std::size_t SeriesIndex(const std::string& name) const;  // throws if absent
  const std::optional<ReportCell>& cell(std::size_t slice,
                                        const std::string& series,
                                        std::size_t key) const;
  void Aggregate();
};

// Slices need a profitability column. Throws ArgumentError on an invalid
// spec or an empty slice list.
ExperimentReport RunExperiment1(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec);
ExperimentReport RunExperiment2(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec);
ExperimentReport RunExperiment3(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec);
ExperimentReport RunExperiment4(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec);
ExperimentReport RunExperiment5(const std::vector<CampaignDataset>& slices,
                                const ExperimentSpec& spec);
ExperimentReport RunExperiment(const std::vector<CampaignDataset>& slices,
                               const ExperimentSpec& spec);

// Median of the slice's costs or profitabilities (absent profitability as
// 0); the mean of the two middle values for an even count.
double SliceMedian(const CampaignDataset& slice, ThresholdKind kind);
// Rows kept by the threshold; all rows for kNone.
std::vector<std::size_t> ThresholdRows(const CampaignDataset& slice,
                                       ThresholdKind kind, bool invert);

nlohmann::ordered_json ReportToJson(const ExperimentReport& report,
                                    const std::string& code_version);
nlohmann::ordered_json SpecToJson(const ExperimentSpec& spec);

// Plot-ready table: one line per (series, key) with the sum, mean, number
// of present slices and every slice's value (empty when absent).
void WriteFigureTable(std::ostream& out, const ExperimentReport& report,
                      char delimiter = ',');

}  // namespace rtbconf

#endif  // RTBCONF_STRATEGIES_H_
