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

#include "rtbconf/synthetic.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "random.h"
#include "rtbconf/errors.h"
#include "rtbconf/kv_config.h"

namespace rtbconf {
namespace {

void ValidateCost(const CostRange& cost, const std::string& what) {
  if (!(std::isfinite(cost.low) && std::isfinite(cost.high) &&
        cost.low > 0.0 && cost.high >= cost.low)) {
    throw SpecificationError(what +
                             ": cost range needs 0 < low <= high, finite");
  }
}

void ValidateRate(double rate, const std::string& what) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw SpecificationError(what + ": conversion rate must be in [0,1]");
  }
}

// Two segments overlap when some row could satisfy both: they agree on
// every attribute they share.
bool Overlap(const Configuration& a, const Configuration& b) {
  for (std::size_t i = 0; i < a.attributes.size(); ++i) {
    for (std::size_t j = 0; j < b.attributes.size(); ++j) {
      if (a.attributes[i] == b.attributes[j] && a.values[i] != b.values[j]) {
        return false;
      }
    }
  }
  return true;
}

bool RowMatches(const std::vector<AttributeValue>& row,
                const Configuration& c) {
  for (std::size_t k = 0; k < c.attributes.size(); ++k) {
    if (row[static_cast<std::size_t>(c.attributes[k])] != c.values[k]) {
      return false;
    }
  }
  return true;
}

CostRange ParseCost(const std::string& key, const std::string& value) {
  const std::vector<double> parts = ParseDoubleList(key, value);
  if (parts.size() == 1) return {parts[0], parts[0]};
  if (parts.size() == 2) return {parts[0], parts[1]};
  throw ArgumentError("bad value for '" + key + "': expected low,high");
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (n_attributes < 1 || n_attributes > kMaxAttributes) {
    throw SpecificationError("attributes must be in [1, 9]");
  }
  if (cardinality.size() != 1 &&
      cardinality.size() != static_cast<std::size_t>(n_attributes)) {
    throw SpecificationError(
        "cardinality needs one value or one per attribute");
  }
  for (int c : cardinality) {
    if (c < 1) throw SpecificationError("cardinality must be >= 1");
  }
  ValidateRate(background_rate, "background");
  ValidateCost(background_cost, "background");
  std::size_t planted = 0;
  for (std::size_t s = 0; s < planted_segments.size(); ++s) {
    const PlantedSegment& seg = planted_segments[s];
    const std::string what = "segment " + std::to_string(s + 1);
    try {
      seg.match.Validate();
    } catch (const ArgumentError& e) {
      throw SpecificationError(what + ": " + e.what());
    }
    if (seg.match.attributes.back() >= n_attributes) {
      throw SpecificationError(what + ": attribute beyond n_attributes");
    }
    ValidateRate(seg.conversion_rate, what);
    ValidateCost(seg.cost, what);
    planted += seg.rows;
    for (std::size_t t = 0; t < s; ++t) {
      if (Overlap(seg.match, planted_segments[t].match)) {
        throw SpecificationError(what + " overlaps segment " +
                                 std::to_string(t + 1) +
                                 " (a row could match both)");
      }
    }
  }
  if (planted > n_rows) {
    throw SpecificationError("planted segments need more rows than n_rows");
  }
}

CampaignDataset GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  internal::StableRng rng(spec.seed);
  const std::size_t n = spec.n_rows;
  const auto& segments = spec.planted_segments;

  // owner[row] = planted segment index, or -1 for background.
  std::vector<int> owner(n, -1);
  {
    std::size_t total = 0;
    for (const auto& seg : segments) total += seg.rows;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = 0; i < total; ++i) {
      std::swap(perm[i], perm[i + rng.Below(n - i)]);
    }
    std::size_t next = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      for (std::size_t k = 0; k < segments[s].rows; ++k) {
        owner[perm[next++]] = static_cast<int>(s);
      }
    }
  }

  constexpr int kMaxRedraws = 1000;
  CampaignDataset::Builder builder(spec.n_attributes);
  builder.Reserve(n);
  ImpressionRecord r;
  r.campaign_id = spec.campaign_id;
  r.attributes.resize(static_cast<std::size_t>(spec.n_attributes));
  auto draw_attributes = [&] {
    for (int a = 0; a < spec.n_attributes; ++a) {
      r.attributes[static_cast<std::size_t>(a)] = static_cast<AttributeValue>(
          rng.Below(static_cast<std::uint64_t>(spec.cardinality_of(a))));
    }
  };

  for (std::size_t row = 0; row < n; ++row) {
    draw_attributes();
    double rate = spec.background_rate;
    CostRange cost = spec.background_cost;
    if (owner[row] >= 0) {
      const PlantedSegment& seg = segments[static_cast<std::size_t>(owner[row])];
      for (std::size_t k = 0; k < seg.match.attributes.size(); ++k) {
        r.attributes[static_cast<std::size_t>(seg.match.attributes[k])] =
            seg.match.values[k];
      }
      rate = seg.conversion_rate;
      cost = seg.cost;
    } else {
      int redraws = 0;
      while (std::any_of(segments.begin(), segments.end(),
                         [&](const PlantedSegment& seg) {
                           return RowMatches(r.attributes, seg.match);
                         })) {
        if (++redraws > kMaxRedraws) {
          throw SpecificationError(
              "background rows cannot avoid the planted segments; lower the "
              "segment coverage or raise cardinality");
        }
        draw_attributes();
      }
    }
    r.timestamp = static_cast<std::int64_t>(row);
    r.conversion = rng.Bernoulli(rate) ? 1 : 0;
    r.cost = rng.Uniform(cost.low, cost.high);
    if (spec.emit_true_cvr) {
      r.cvr = std::clamp(rate, SyntheticSpec::kMinTrueCvr,
                         1.0 - SyntheticSpec::kMinTrueCvr);
    }
    builder.Add(r, row + 1);
  }
  return std::move(builder).Build(spec.campaign_id);
}

SyntheticSpec ParseSyntheticSpec(const std::string& text, SyntheticSpec base) {
  SyntheticSpec spec = std::move(base);
  // Segments are keyed by their label so the file order of keys is free.
  std::map<std::string, PlantedSegment> segments;
  std::map<std::string, bool> has_match;
  for (const KeyValue& kv : ParseKeyValues(text)) {
    const std::string& key = kv.key;
    const std::string& value = kv.value;
    if (key == "rows") {
      const long long v = ParseInteger(key, value);
      if (v < 0) throw ArgumentError("rows must be >= 0");
      spec.n_rows = static_cast<std::size_t>(v);
    } else if (key == "attributes") {
      spec.n_attributes = static_cast<int>(ParseInteger(key, value));
    } else if (key == "cardinality") {
      spec.cardinality.clear();
      for (double c : ParseDoubleList(key, value)) {
        spec.cardinality.push_back(static_cast<int>(c));
      }
    } else if (key == "background_rate") {
      spec.background_rate = ParseDouble(key, value);
    } else if (key == "background_cost") {
      spec.background_cost = ParseCost(key, value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(ParseInteger(key, value));
    } else if (key == "campaign") {
      spec.campaign_id = ParseInteger(key, value);
    } else if (key == "true_cvr") {
      spec.emit_true_cvr = ParseBool(key, value);
    } else if (key.rfind("segment.", 0) == 0) {
      const auto dot = key.find('.', 8);
      if (dot == std::string::npos) {
        throw ArgumentError("line " + std::to_string(kv.line) +
                            ": expected segment.<label>.<field>");
      }
      const std::string label = key.substr(8, dot - 8);
      const std::string field = key.substr(dot + 1);
      PlantedSegment& seg = segments[label];
      if (field == "match") {
        seg.match = Configuration::Parse(value);
        has_match[label] = true;
      } else if (field == "rows") {
        const long long v = ParseInteger(key, value);
        if (v < 0) throw ArgumentError(key + " must be >= 0");
        seg.rows = static_cast<std::size_t>(v);
      } else if (field == "rate") {
        seg.conversion_rate = ParseDouble(key, value);
      } else if (field == "cost") {
        seg.cost = ParseCost(key, value);
      } else {
        throw ArgumentError("unknown segment field '" + field + "'");
      }
    } else {
      throw ArgumentError("unknown key '" + key + "' on line " +
                          std::to_string(kv.line));
    }
  }
  for (auto& [label, seg] : segments) {
    if (!has_match[label]) {
      throw ArgumentError("segment." + label + " has no match");
    }
    spec.planted_segments.push_back(std::move(seg));
  }
  return spec;
}

SyntheticSpec LoadSyntheticSpec(const std::filesystem::path& path,
                                SyntheticSpec base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open plan file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSyntheticSpec(buffer.str(), std::move(base));
}

}  // namespace rtbconf
