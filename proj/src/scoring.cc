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

#include "rtbconf/scoring.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtbconf/errors.h"

namespace rtbconf {

std::optional<double> ImpressionProfitability(double cvr, double price) {
  if (!(price > 0.0)) return std::nullopt;
  const double v = cvr / price;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

ProfitabilityColumn ComputeProfitability(const CampaignDataset& d) {
  if (!d.has_cvr()) {
    throw ArgumentError("profitability needs a cvr column; run predict first");
  }
  ProfitabilityColumn out;
  out.values.resize(d.rows(), 0.0);
  const auto cvr = d.cvr();
  const auto cost = d.costs();
  for (std::size_t row = 0; row < d.rows(); ++row) {
    if (std::isnan(cvr[row])) {
      throw DataError("row " + std::to_string(row) + " has no cvr");
    }
    if (auto p = ImpressionProfitability(cvr[row], cost[row])) {
      out.values[row] = *p;
    } else {
      out.excluded_rows.push_back(row);
    }
  }
  return out;
}

CampaignDataset WithProfitability(const CampaignDataset& d) {
  ProfitabilityColumn column = ComputeProfitability(d);
  for (std::size_t row : column.excluded_rows) {
    column.values[row] = std::numeric_limits<double>::quiet_NaN();
  }
  return d.WithProfitability(std::move(column.values));
}

void QualityScoreParams::Validate() const {
  if (T < 1) throw ArgumentError("required visits T must be >= 1");
}

double QualityScore(double avg_profitability, std::size_t matched_rows,
                    const QualityScoreParams& params) {
  return avg_profitability *
         static_cast<double>(std::min(matched_rows, params.T));
}

ProfitabilityAverage AverageProfitability(
    const CampaignDataset& d, std::span<const std::size_t> subset) {
  if (!d.has_profitability()) {
    throw ArgumentError("dataset has no profitability column");
  }
  ProfitabilityAverage out;
  out.count = subset.size();
  if (subset.empty()) return out;
  const auto prof = d.profitability();
  double sum = 0.0;
  for (std::size_t row : subset) {
    const double v = prof[row];
    if (!std::isnan(v)) sum += v;
  }
  out.avg = sum / static_cast<double>(out.count);
  return out;
}

bool RanksBefore(double score_a, std::size_t rows_a, const Configuration& a,
                 double score_b, std::size_t rows_b, const Configuration& b) {
  if (score_a != score_b) return score_a > score_b;
  if (rows_a != rows_b) return rows_a > rows_b;
  if (a.attributes != b.attributes) return a.attributes < b.attributes;
  return a.values < b.values;
}

}  // namespace rtbconf
