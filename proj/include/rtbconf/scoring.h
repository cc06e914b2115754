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

// Impression profitability (predicted conversion rate per unit of price) and
// the Quality Score of a configuration:
//
//     score = average_profitability * min(matched_rows, T)
//
// Rows whose price is not positive are "excluded": they still count as a
// matched visit but contribute 0 to the profitability sum.

#ifndef RTBCONF_SCORING_H_
#define RTBCONF_SCORING_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rtbconf/configuration.h"
#include "rtbconf/dataset.h"

namespace rtbconf {

// cvr / price, or nullopt when price <= 0 or the quotient is not finite.
std::optional<double> ImpressionProfitability(double cvr, double price);

struct ProfitabilityColumn {
  // One entry per dataset row; 0 for excluded rows.
  std::vector<double> values;
  // Ascending row indices whose price is not positive.
  std::vector<std::size_t> excluded_rows;
};

// Requires a cvr column on `d` (ArgumentError otherwise).
ProfitabilityColumn ComputeProfitability(const CampaignDataset& d);

// `d` with its profitability column filled; excluded rows are left absent
// (NaN) and treated as 0 by the search.
CampaignDataset WithProfitability(const CampaignDataset& d);

struct QualityScoreParams {
  std::size_t T = 1;
  void Validate() const;  // T >= 1
};

double QualityScore(double avg_profitability, std::size_t matched_rows,
                    const QualityScoreParams& params);

struct ProfitabilityAverage {
  double avg = 0.0;
  std::size_t count = 0;
};

// Mean over `subset` with excluded rows (NaN or non-positive price) adding 0
// but counting as visits. Rows are summed in the order given.
ProfitabilityAverage AverageProfitability(const CampaignDataset& d,
                                          std::span<const std::size_t> subset);

// Strict weak ordering used for every ranking: higher score first, then more
// matched rows, then the lexicographically smaller attribute set, then the
// smaller value tuple.
bool RanksBefore(double score_a, std::size_t rows_a, const Configuration& a,
                 double score_b, std::size_t rows_b, const Configuration& b);

}  // namespace rtbconf

#endif  // RTBCONF_SCORING_H_
