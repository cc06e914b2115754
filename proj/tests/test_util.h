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


// Shared helpers for the test binaries: random dataset generators, a
// temporary directory and an exhaustive search oracle that does not share
// code with the library's search.

#ifndef RTBCONF_TESTS_TEST_UTIL_H_
#define RTBCONF_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unistd.h>
#include <vector>

#include "rtbconf/config_search.h"
#include "rtbconf/configuration.h"
#include "rtbconf/dataset.h"

namespace rtbconf::testing {

// Uniform integer in [0, n) from raw generator output; identical everywhere.
inline std::uint64_t Below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

inline double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RandomDatasetOptions {
  std::size_t rows = 100;
  int attributes = 4;
  int cardinality = 4;
  double excluded_fraction = 0.05;  // rows with cost 0 (no profitability)
  std::int64_t campaign = 7;
};

// Dataset with random attributes, cvr in (0,1), cost in (0.1, 2] (or 0 for
// excluded rows) and the matching profitability column.
inline CampaignDataset RandomScoredDataset(std::mt19937_64& rng,
                                           const RandomDatasetOptions& o) {
  std::vector<ImpressionRecord> records;
  for (std::size_t r = 0; r < o.rows; ++r) {
    ImpressionRecord rec;
    rec.timestamp = static_cast<std::int64_t>(r);
    rec.campaign_id = o.campaign;
    rec.conversion = Unit(rng) < 0.3 ? 1 : 0;
    rec.attributes.resize(static_cast<std::size_t>(o.attributes));
    for (auto& v : rec.attributes) {
      v = static_cast<AttributeValue>(
          Below(rng, static_cast<std::uint64_t>(o.cardinality)));
    }
    rec.cvr = 0.01 + 0.98 * Unit(rng);
    if (Unit(rng) < o.excluded_fraction) {
      rec.cost = 0.0;
    } else {
      rec.cost = 0.1 + 1.9 * Unit(rng);
      rec.profitability = *rec.cvr / rec.cost;
    }
    records.push_back(std::move(rec));
  }
  CampaignDataset d = CampaignDataset::FromRecords(std::move(records),
                                                   o.campaign, o.attributes);
  if (!d.has_profitability()) {
    // Every row was excluded; keep an all-absent column.
    d = d.WithProfitability(std::vector<double>(
        d.rows(), std::numeric_limits<double>::quiet_NaN()));
  }
  return d;
}

// One row per entry of `values` with the given profitability (NaN = absent).
inline CampaignDataset DatasetFromTable(
    const std::vector<std::vector<AttributeValue>>& values,
    const std::vector<double>& profitability, std::int64_t campaign = 1) {
  std::vector<ImpressionRecord> records;
  const int n = values.empty() ? 1 : static_cast<int>(values[0].size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    ImpressionRecord rec;
    rec.timestamp = static_cast<std::int64_t>(r);
    rec.campaign_id = campaign;
    rec.cost = 1.0;
    rec.cvr = 0.5;
    rec.attributes = values[r];
    if (!std::isnan(profitability[r])) rec.profitability = profitability[r];
    records.push_back(std::move(rec));
  }
  return CampaignDataset::FromRecords(std::move(records), campaign, n);
}

// Every (attribute subset, value tuple) pair scored directly from row lists,
// filtered and ordered by an independent comparator.
inline std::vector<ScoredConfiguration> BruteForceSearch(
    const CampaignDataset& d, std::size_t limit, bool allow_below_limit,
    int max_subset_size = kMaxAttributes) {
  const int n = d.n_attributes();
  std::vector<ScoredConfiguration> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> attrs;
    for (int a = 0; a < n; ++a) {
      if (mask & (1u << a)) attrs.push_back(a);
    }
    if (static_cast<int>(attrs.size()) > max_subset_size) continue;
    std::map<std::vector<AttributeValue>, std::vector<std::size_t>> buckets;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      std::vector<AttributeValue> key;
      for (int a : attrs) key.push_back(d.value(r, a));
      buckets[key].push_back(r);
    }
    for (const auto& [key, rows] : buckets) {
      if (!allow_below_limit && rows.size() < limit) continue;
      double sum = 0.0;
      for (std::size_t r : rows) {
        const double p = d.profitability()[r];
        if (!std::isnan(p)) sum += p;
      }
      ScoredConfiguration c;
      c.config.attributes = attrs;
      c.config.values = key;
      c.matched_rows = rows.size();
      c.profitability_sum = sum;
      c.avg_profitability = sum / static_cast<double>(rows.size());
      c.quality_score =
          c.avg_profitability *
          static_cast<double>(std::min<std::size_t>(rows.size(), limit));
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ScoredConfiguration& a, const ScoredConfiguration& b) {
              return std::make_tuple(-a.quality_score, -static_cast<double>(a.matched_rows),
                                     a.config.attributes, a.config.values) <
                     std::make_tuple(-b.quality_score, -static_cast<double>(b.matched_rows),
                                     b.config.attributes, b.config.values);
            });
  return out;
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rtbconf_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace rtbconf::testing

#endif  // RTBCONF_TESTS_TEST_UTIL_H_
