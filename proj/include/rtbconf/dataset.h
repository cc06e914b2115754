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

// Impression data model.
//
// A CampaignDataset is a columnar, immutable collection of impressions sorted
// by timestamp. All "modifying" operations return a new dataset, so a dataset
// can be shared read-only by any number of workers.

#ifndef RTBCONF_DATASET_H_
#define RTBCONF_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rtbconf/configuration.h"

namespace rtbconf {

inline constexpr int kDefaultAttributes = 9;

// Campaign id of a raw log that mixes several campaigns.
inline constexpr std::int64_t kAllCampaigns = -1;

// One displayed advert.
struct ImpressionRecord {
  std::int64_t timestamp = 0;
  std::int64_t campaign_id = 0;
  int conversion = 0;
  int click = 0;
  double cost = 0.0;
  std::optional<double> cpo;
  std::vector<AttributeValue> attributes;
  std::optional<double> cvr;
  std::optional<double> profitability;
};

class CampaignDataset {
 public:
  class Builder;

  // Empty dataset with the default attribute count.
  CampaignDataset() = default;

  // Validates and stable-sorts `records` by timestamp. `campaign_id` is the
  // id shared by all records, or kAllCampaigns. Throws DataError on records
  // violating the ImpressionRecord invariants.
  static CampaignDataset FromRecords(std::vector<ImpressionRecord> records,
                                     std::int64_t campaign_id,
                                     int n_attributes = kDefaultAttributes);

  std::size_t rows() const { return timestamps_.size(); }
  bool empty() const { return timestamps_.empty(); }
  int n_attributes() const { return n_attributes_; }
  std::int64_t campaign_id() const { return campaign_id_; }

  std::span<const std::int64_t> timestamps() const { return timestamps_; }
  std::span<const std::int64_t> campaign_ids() const { return campaigns_; }
  std::span<const std::uint8_t> conversions() const { return conversions_; }
  std::span<const std::uint8_t> clicks() const { return clicks_; }
  std::span<const double> costs() const { return costs_; }
  std::span<const AttributeValue> attribute(int a) const {
    return attributes_[static_cast<std::size_t>(a)];
  }

  // NaN marks an absent cell in the three optional columns below.
  std::span<const double> cpo() const { return cpo_; }
  std::span<const double> cvr() const { return cvr_; }
  std::span<const double> profitability() const { return profitability_; }
  bool has_cvr() const { return !cvr_.empty(); }
  bool has_profitability() const { return !profitability_.empty(); }

  AttributeValue value(std::size_t row, int a) const {
    return attributes_[static_cast<std::size_t>(a)][row];
  }
  bool Matches(const Configuration& config, std::size_t row) const;

  ImpressionRecord record(std::size_t row) const;

  // Rows at the given (strictly increasing) positions.
  CampaignDataset Select(std::span<const std::size_t> rows) const;
  // Rows [begin, end).
  CampaignDataset Range(std::size_t begin, std::size_t end) const;
  // Throws ArgumentError if some row belongs to another campaign.
  CampaignDataset WithCampaignId(std::int64_t campaign_id) const;
  // `values.size()` must equal rows(); NaN entries mean "absent".
  CampaignDataset WithCvr(std::vector<double> values) const;
  CampaignDataset WithProfitability(std::vector<double> values) const;

  // Ordered column-by-column equality (NaN == NaN for optional columns).
  bool Equals(const CampaignDataset& other) const;

 private:
  // Rows in the given order, unchecked.
  CampaignDataset GatherRows(std::span<const std::size_t> rows) const;

  int n_attributes_ = kDefaultAttributes;
  std::int64_t campaign_id_ = kAllCampaigns;
  std::vector<std::int64_t> timestamps_;
  std::vector<std::int64_t> campaigns_;
  std::vector<std::uint8_t> conversions_;
  std::vector<std::uint8_t> clicks_;
  std::vector<double> costs_;
  std::vector<double> cpo_;
  std::vector<std::vector<AttributeValue>> attributes_ =
      std::vector<std::vector<AttributeValue>>(kDefaultAttributes);
  std::vector<double> cvr_;
  std::vector<double> profitability_;
};

// Accumulates rows column by column; Build() sorts by timestamp (stable).
class CampaignDataset::Builder {
 public:
  explicit Builder(int n_attributes = kDefaultAttributes);

  void Reserve(std::size_t rows);
  // Throws DataError (tagged with `line`, 0 = unknown) when `r` violates the
  // ImpressionRecord invariants.
  void Add(const ImpressionRecord& r, std::size_t line = 0);
  std::size_t rows() const { return data_.timestamps_.size(); }

  // With no id, the dataset takes the common campaign id of its rows, or
  // kAllCampaigns when they differ.
  CampaignDataset Build(std::optional<std::int64_t> campaign_id = {}) &&;

 private:
  CampaignDataset data_;
  bool any_cvr_ = false;
  bool any_profitability_ = false;
};

// First `train_rows` rows (time order) and the remainder. Throws
// ArgumentError unless 0 < train_rows < rows(d).
std::pair<CampaignDataset, CampaignDataset> SplitTrainTest(
    const CampaignDataset& d, std::size_t train_rows);

struct CampaignSlices {
  std::vector<CampaignDataset> slices;  // each carries its true campaign id
  std::vector<std::int64_t> campaign_of_slice;
  std::size_t campaigns_skipped = 0;    // fewer than slice_size rows
  std::size_t rows_discarded = 0;
};

// Up to two time-ordered slices of exactly `slice_size` rows per campaign,
// campaigns in ascending id order. Throws ArgumentError if slice_size == 0.
CampaignSlices MakeCampaignSlices(const CampaignDataset& d,
                                  std::size_t slice_size);

}  // namespace rtbconf

#endif  // RTBCONF_DATASET_H_
