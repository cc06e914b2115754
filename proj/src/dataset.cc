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

#include "rtbconf/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "rtbconf/errors.h"

namespace rtbconf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
std::vector<T> Gather(const std::vector<T>& column,
                      std::span<const std::size_t> rows) {
  if (column.empty()) return {};
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(column[r]);
  return out;
}

template <typename T>
std::vector<T> Cut(const std::vector<T>& column, std::size_t begin,
                   std::size_t end) {
  if (column.empty()) return {};
  return std::vector<T>(column.begin() + static_cast<std::ptrdiff_t>(begin),
                        column.begin() + static_cast<std::ptrdiff_t>(end));
}

bool SameDoubles(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  // Bitwise, so that NaN cells compare equal and -0.0 != 0.0.
  return a.empty() ||
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::optional<double> OptionalCell(const std::vector<double>& column,
                                   std::size_t row) {
  if (column.empty() || std::isnan(column[row])) return std::nullopt;
  return column[row];
}

}  // namespace

CampaignDataset::Builder::Builder(int n_attributes) {
  if (n_attributes < 1 || n_attributes > kMaxAttributes) {
    throw ArgumentError("n_attributes must be in [1, " +
                        std::to_string(kMaxAttributes) + "]");
  }
  data_.n_attributes_ = n_attributes;
  data_.attributes_.assign(static_cast<std::size_t>(n_attributes), {});
}

void CampaignDataset::Builder::Reserve(std::size_t n) {
  data_.timestamps_.reserve(n);
  data_.campaigns_.reserve(n);
  data_.conversions_.reserve(n);
  data_.clicks_.reserve(n);
  data_.costs_.reserve(n);
  data_.cpo_.reserve(n);
  for (auto& column : data_.attributes_) column.reserve(n);
}

void CampaignDataset::Builder::Add(const ImpressionRecord& r,
                                   std::size_t line) {
  const int n_attributes = data_.n_attributes_;
  if (r.attributes.size() != static_cast<std::size_t>(n_attributes)) {
    throw DataError("record has " + std::to_string(r.attributes.size()) +
                        " attributes, expected " +
                        std::to_string(n_attributes),
                    line);
  }
  if (r.conversion != 0 && r.conversion != 1) {
    throw DataError("conversion must be 0 or 1", line);
  }
  if (r.click != 0 && r.click != 1) {
    throw DataError("click must be 0 or 1", line);
  }
  if (r.timestamp < 0) throw DataError("negative timestamp", line);
  if (!std::isfinite(r.cost)) throw DataError("non-finite cost", line);
  if (r.cvr && !(*r.cvr > 0.0 && *r.cvr < 1.0)) {
    throw DataError("cvr outside (0,1)", line);
  }
  if (r.profitability &&
      !(std::isfinite(*r.profitability) && *r.profitability >= 0.0)) {
    throw DataError("profitability must be finite and >= 0", line);
  }

  const std::size_t before = rows();
  if (r.cvr && !any_cvr_) {
    any_cvr_ = true;
    data_.cvr_.assign(before, kNaN);
  }
  if (r.profitability && !any_profitability_) {
    any_profitability_ = true;
    data_.profitability_.assign(before, kNaN);
  }
  data_.timestamps_.push_back(r.timestamp);
  data_.campaigns_.push_back(r.campaign_id);
  data_.conversions_.push_back(static_cast<std::uint8_t>(r.conversion));
  data_.clicks_.push_back(static_cast<std::uint8_t>(r.click));
  data_.costs_.push_back(r.cost);
  data_.cpo_.push_back(r.cpo.value_or(kNaN));
  for (int a = 0; a < n_attributes; ++a) {
    data_.attributes_[static_cast<std::size_t>(a)].push_back(
        r.attributes[static_cast<std::size_t>(a)]);
  }
  if (any_cvr_) data_.cvr_.push_back(r.cvr.value_or(kNaN));
  if (any_profitability_) {
    data_.profitability_.push_back(r.profitability.value_or(kNaN));
  }
}

CampaignDataset CampaignDataset::Builder::Build(
    std::optional<std::int64_t> campaign_id) && {
  CampaignDataset d = std::move(data_);
  const auto& campaigns = d.campaigns_;
  if (campaign_id) {
    d.campaign_id_ = *campaign_id;
    if (*campaign_id != kAllCampaigns) {
      for (std::size_t i = 0; i < campaigns.size(); ++i) {
        if (campaigns[i] != *campaign_id) {
          throw DataError("record campaign " + std::to_string(campaigns[i]) +
                              " differs from dataset campaign " +
                              std::to_string(*campaign_id),
                          i + 1);
        }
      }
    }
  } else {
    const bool uniform =
        !campaigns.empty() &&
        std::all_of(campaigns.begin(), campaigns.end(),
                    [&](std::int64_t c) { return c == campaigns.front(); });
    d.campaign_id_ = uniform ? campaigns.front() : kAllCampaigns;
  }
  if (std::is_sorted(d.timestamps_.begin(), d.timestamps_.end())) return d;

  std::vector<std::size_t> order(d.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return d.timestamps_[a] < d.timestamps_[b];
                   });
  return d.GatherRows(order);
}

CampaignDataset CampaignDataset::FromRecords(
    std::vector<ImpressionRecord> records, std::int64_t campaign_id,
    int n_attributes) {
  Builder builder(n_attributes);
  builder.Reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    builder.Add(records[i], i + 1);
  }
  return std::move(builder).Build(campaign_id);
}

bool CampaignDataset::Matches(const Configuration& config,
                              std::size_t row) const {
  for (std::size_t k = 0; k < config.attributes.size(); ++k) {
    const int a = config.attributes[k];
    if (a >= n_attributes_ || value(row, a) != config.values[k]) return false;
  }
  return true;
}

ImpressionRecord CampaignDataset::record(std::size_t row) const {
  ImpressionRecord r;
  r.timestamp = timestamps_[row];
  r.campaign_id = campaigns_[row];
  r.conversion = conversions_[row];
  r.click = clicks_[row];
  r.cost = costs_[row];
  r.cpo = OptionalCell(cpo_, row);
  r.attributes.reserve(static_cast<std::size_t>(n_attributes_));
  for (const auto& column : attributes_) r.attributes.push_back(column[row]);
  r.cvr = OptionalCell(cvr_, row);
  r.profitability = OptionalCell(profitability_, row);
  return r;
}

CampaignDataset CampaignDataset::Select(
    std::span<const std::size_t> rows) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= this->rows() || (i > 0 && rows[i] <= rows[i - 1])) {
      throw ArgumentError("Select requires strictly increasing row indices "
                          "within range");
    }
  }
  return GatherRows(rows);
}

CampaignDataset CampaignDataset::GatherRows(
    std::span<const std::size_t> rows) const {
  CampaignDataset d;
  d.n_attributes_ = n_attributes_;
  d.campaign_id_ = campaign_id_;
  d.timestamps_ = Gather(timestamps_, rows);
  d.campaigns_ = Gather(campaigns_, rows);
  d.conversions_ = Gather(conversions_, rows);
  d.clicks_ = Gather(clicks_, rows);
  d.costs_ = Gather(costs_, rows);
  d.cpo_ = Gather(cpo_, rows);
  d.attributes_.clear();
  for (const auto& column : attributes_) {
    d.attributes_.push_back(Gather(column, rows));
  }
  d.cvr_ = Gather(cvr_, rows);
  d.profitability_ = Gather(profitability_, rows);
  return d;
}

CampaignDataset CampaignDataset::Range(std::size_t begin,
                                       std::size_t end) const {
  if (begin > end || end > rows()) {
    throw ArgumentError("row range out of bounds");
  }
  CampaignDataset d;
  d.n_attributes_ = n_attributes_;
  d.campaign_id_ = campaign_id_;
  d.timestamps_ = Cut(timestamps_, begin, end);
  d.campaigns_ = Cut(campaigns_, begin, end);
  d.conversions_ = Cut(conversions_, begin, end);
  d.clicks_ = Cut(clicks_, begin, end);
  d.costs_ = Cut(costs_, begin, end);
  d.cpo_ = Cut(cpo_, begin, end);
  d.attributes_.clear();
  for (const auto& column : attributes_) {
    d.attributes_.push_back(Cut(column, begin, end));
  }
  d.cvr_ = Cut(cvr_, begin, end);
  d.profitability_ = Cut(profitability_, begin, end);
  return d;
}

CampaignDataset CampaignDataset::WithCampaignId(
    std::int64_t campaign_id) const {
  if (campaign_id != kAllCampaigns &&
      std::any_of(campaigns_.begin(), campaigns_.end(),
                  [&](std::int64_t c) { return c != campaign_id; })) {
    throw ArgumentError("rows belong to more than one campaign");
  }
  CampaignDataset d = *this;
  d.campaign_id_ = campaign_id;
  return d;
}

CampaignDataset CampaignDataset::WithCvr(std::vector<double> values) const {
  if (values.size() != rows()) {
    throw ArgumentError("cvr column length does not match dataset rows");
  }
  for (double v : values) {
    if (!std::isnan(v) && !(v > 0.0 && v < 1.0)) {
      throw ArgumentError("cvr outside (0,1)");
    }
  }
  CampaignDataset d = *this;
  d.cvr_ = std::move(values);
  return d;
}

CampaignDataset CampaignDataset::WithProfitability(
    std::vector<double> values) const {
  if (values.size() != rows()) {
    throw ArgumentError(
        "profitability column length does not match dataset rows");
  }
  for (double v : values) {
    if (!std::isnan(v) && !(std::isfinite(v) && v >= 0.0)) {
      throw ArgumentError("profitability must be finite and >= 0");
    }
  }
  CampaignDataset d = *this;
  d.profitability_ = std::move(values);
  return d;
}

bool CampaignDataset::Equals(const CampaignDataset& other) const {
  return n_attributes_ == other.n_attributes_ &&
         campaign_id_ == other.campaign_id_ &&
         timestamps_ == other.timestamps_ && campaigns_ == other.campaigns_ &&
         conversions_ == other.conversions_ && clicks_ == other.clicks_ &&
         SameDoubles(costs_, other.costs_) && SameDoubles(cpo_, other.cpo_) &&
         attributes_ == other.attributes_ && SameDoubles(cvr_, other.cvr_) &&
         SameDoubles(profitability_, other.profitability_);
}

std::pair<CampaignDataset, CampaignDataset> SplitTrainTest(
    const CampaignDataset& d, std::size_t train_rows) {
  if (train_rows == 0 || train_rows >= d.rows()) {
    throw ArgumentError("train_rows must satisfy 0 < train_rows < rows (" +
                        std::to_string(d.rows()) + "), got " +
                        std::to_string(train_rows));
  }
  return {d.Range(0, train_rows), d.Range(train_rows, d.rows())};
}

CampaignSlices MakeCampaignSlices(const CampaignDataset& d,
                                  std::size_t slice_size) {
  if (slice_size == 0) throw ArgumentError("slice_size must be positive");
  std::map<std::int64_t, std::vector<std::size_t>> by_campaign;
  const auto campaigns = d.campaign_ids();
  for (std::size_t row = 0; row < d.rows(); ++row) {
    by_campaign[campaigns[row]].push_back(row);
  }
  CampaignSlices out;
  for (const auto& [campaign, rows] : by_campaign) {
    const std::size_t count =
        std::min<std::size_t>(rows.size() / slice_size, 2);
    if (count == 0) {
      ++out.campaigns_skipped;
      out.rows_discarded += rows.size();
      continue;
    }
    for (std::size_t s = 0; s < count; ++s) {
      const std::span<const std::size_t> part(rows.data() + s * slice_size,
                                              slice_size);
      out.slices.push_back(d.Select(part).WithCampaignId(campaign));
      out.campaign_of_slice.push_back(campaign);
    }
    out.rows_discarded += rows.size() - count * slice_size;
  }
  return out;
}

}  // namespace rtbconf
