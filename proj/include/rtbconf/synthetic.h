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

// Synthetic impression logs with planted profitable segments.
//
// Attribute values are drawn uniformly from [0, cardinality). A planted
// segment owns exactly `rows` randomly placed rows: those rows get the
// segment's attribute values, conversion rate and cost range. Background rows
// are redrawn until they match no segment, so segment membership is exact.
// Timestamps are the consecutive integers 0..n_rows-1.
//
// Only std::mt19937_64 raw output is consumed (no std:: distributions), so a
// given seed produces the same bytes on every platform.

#ifndef RTBCONF_SYNTHETIC_H_
#define RTBCONF_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rtbconf/configuration.h"
#include "rtbconf/dataset.h"

namespace rtbconf {

// Costs are uniform on [low, high]; low == high gives a constant cost.
struct CostRange {
  double low = 1.0;
  double high = 1.0;
};

struct PlantedSegment {
  Configuration match;
  std::size_t rows = 0;
  double conversion_rate = 0.0;
  CostRange cost;
};

struct SyntheticSpec {
  std::size_t n_rows = 10000;
  int n_attributes = kDefaultAttributes;
  // One entry per attribute, or a single entry applied to all of them.
  std::vector<int> cardinality = {10};
  std::vector<PlantedSegment> planted_segments;
  double background_rate = 0.02;
  CostRange background_cost = {0.5, 1.5};
  std::uint64_t seed = 42;
  std::int64_t campaign_id = 1;
  // Fill the cvr column with each row's true conversion rate, clamped to
  // [kMinTrueCvr, 1 - kMinTrueCvr]. Lets search be exercised without a model.
  bool emit_true_cvr = false;

  static constexpr double kMinTrueCvr = 1e-6;

  int cardinality_of(int attribute) const {
    return cardinality.size() == 1
               ? cardinality.front()
               : cardinality[static_cast<std::size_t>(attribute)];
  }

  // Throws SpecificationError; overlapping segments (a row could match two
  // of them) are rejected because the ground truth would be ambiguous.
  void Validate() const;
};

CampaignDataset GenerateSynthetic(const SyntheticSpec& spec);

// Flat key-value plan file:
//
//   rows = 100000            attributes = 9
//   cardinality = 10         (or a comma list, one per attribute)
//   background_rate = 0.02   background_cost = 0.5,1.5
//   seed = 42   campaign = 1   true_cvr = false
//   segment.1.match = cat1:3,cat4:7
//   segment.1.rows = 5000
//   segment.1.rate = 0.3
//   segment.1.cost = 0.2,0.4
//
// Keys not present keep the values already in `base`. Throws ArgumentError on
// unknown keys or malformed values.
SyntheticSpec ParseSyntheticSpec(const std::string& text,
                                 SyntheticSpec base = {});
SyntheticSpec LoadSyntheticSpec(const std::filesystem::path& path,
                                SyntheticSpec base = {});

}  // namespace rtbconf

#endif  // RTBCONF_SYNTHETIC_H_
