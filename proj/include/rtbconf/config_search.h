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

// Exhaustive configuration search.
//
// A configuration fixes the value of every attribute in a non-empty subset.
// The search visits attribute subsets by size, then lexicographically; for
// each subset it groups the rows by their projected value tuple and scores
// every group. Under the visits requirement a group matching fewer than
// `limit` rows is rejected, and because match counts can only shrink when
// constraints are added, any configuration containing a rejected one can be
// skipped without being evaluated.
//
// Three engines produce identical rankings:
//   kRowMask     keeps, per subset, a bitmap of rows whose group qualified.
//                Candidate rows for a subset are the intersection of the
//                bitmaps of its immediate sub-subsets, so rejected
//                configurations never reach the grouping step.
//   kRejectedSet stores rejected value tuples per attribute subset and tests
//                every grouped configuration against all of its
//                sub-configurations, smallest first.
//   kNone        scores everything and filters afterwards.
//
// Profitability sums are accumulated in ascending row order in every engine,
// so results do not depend on the engine or on the number of workers.

#ifndef RTBCONF_CONFIG_SEARCH_H_
#define RTBCONF_CONFIG_SEARCH_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "rtbconf/configuration.h"
#include "rtbconf/dataset.h"

namespace rtbconf {

// Number of non-empty attribute subsets, 2^n - 1 (n in [1, 63]).
std::uint64_t CountAttributeSubsets(int n);

// Non-empty subsets of {0..n-1} with at most `max_size` members, by size and
// then lexicographically.
std::vector<std::vector<int>> EnumerateSubsets(int n, int max_size);

// Rows grouped by their projection onto `attributes`; each list ascends.
std::map<std::vector<AttributeValue>, std::vector<std::size_t>>
UniqueValueTuples(const CampaignDataset& d, const std::vector<int>& attributes);

// Configurations known to miss the visits requirement, grouped by attribute
// subset.
class RejectedSet {
 public:
  void Add(const Configuration& c);
  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }

  // True when some stored configuration is a sub-configuration of `c` (every
  // one of its attribute/value pairs appears in `c`). Sub-configurations are
  // probed from one attribute upwards.
  bool PruneCheck(const Configuration& c) const;

 private:
  struct TupleHash {
    std::size_t operator()(const std::vector<AttributeValue>& v) const;
  };
  using TupleSet = std::unordered_set<std::vector<AttributeValue>, TupleHash>;
  std::vector<TupleSet> by_mask_ = std::vector<TupleSet>(1u << kMaxAttributes);
  std::size_t size_ = 0;
};

enum class PruningMode { kRowMask, kRejectedSet, kNone };

struct SearchParams {
  std::size_t limit = 5000;          // required visits, the T of the score
  bool allow_below_limit = false;    // score and keep groups under the limit
  int max_subset_size = kMaxAttributes;
  std::size_t top_k = 0;             // 0 keeps the full ranking
  int workers = 1;
  PruningMode pruning = PruningMode::kRowMask;
  bool record_time = false;          // fill elapsed_seconds

  void Validate(int n_attributes) const;
};

struct ScoredConfiguration {
  Configuration config;
  std::size_t matched_rows = 0;
  double profitability_sum = 0.0;
  double avg_profitability = 0.0;
  double quality_score = 0.0;
  // Seconds from the start of the search until this configuration's subset
  // level finished; 0 unless timing was requested.
  double elapsed_seconds = 0.0;

  bool operator==(const ScoredConfiguration&) const = default;
};

// Strict total order of the ranking.
bool RanksBefore(const ScoredConfiguration& a, const ScoredConfiguration& b);

// Requires a profitability column (absent cells count as 0). Throws
// ArgumentError on invalid parameters.
std::vector<ScoredConfiguration> Search(const CampaignDataset& d,
                                        const SearchParams& params);

struct SequentialRound {
  ScoredConfiguration best;
  std::size_t rows_before = 0;
  std::size_t remaining_rows = 0;  // after removing the matched rows
};

struct SequentialResult {
  std::vector<SequentialRound> rounds;
  bool early_stop = false;  // a round found nothing before n_rounds
};

// Repeatedly takes the rank-1 configuration and removes the rows it matches.
SequentialResult SearchSequential(const CampaignDataset& d,
                                  const SearchParams& params,
                                  std::size_t n_rounds);

// Ranking as delimited text with a header row: rank, avg_profitability,
// matched_rows, selected_columns, values, [elapsed_seconds,] quality_score.
// Column lists inside a field are separated by ';'.
void WriteRanking(std::ostream& out,
                  const std::vector<ScoredConfiguration>& ranking,
                  char delimiter = ',', bool include_time = false);

nlohmann::ordered_json RankingToJson(
    const std::vector<ScoredConfiguration>& ranking, bool include_time = false);

const char* PruningModeName(PruningMode mode);
PruningMode ParsePruningMode(const std::string& name);

}  // namespace rtbconf

#endif  // RTBCONF_CONFIG_SEARCH_H_
