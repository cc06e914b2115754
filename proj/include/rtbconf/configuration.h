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

#ifndef RTBCONF_CONFIGURATION_H_
#define RTBCONF_CONFIGURATION_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rtbconf {

// Opaque categorical code of one attribute (Criteo `catN` column).
using AttributeValue = std::int64_t;

// Hard upper bound on the number of categorical attributes per impression.
inline constexpr int kMaxAttributes = 9;

// Bit i set <=> attribute i participates.
using AttributeMask = std::uint16_t;

// A targeting rule: a conjunction of `attribute == value` constraints.
//
// Attribute indices are 0-based and strictly increasing; `values[k]` is the
// required value of attribute `attributes[k]`. The defaulted ordering
// compares the index set lexicographically first and the value tuple
// second, which is the tie-break order used when ranking.
struct Configuration {
  std::vector<int> attributes;
  std::vector<AttributeValue> values;

  // Builds a configuration from unordered (attribute, value) pairs. Throws
  // ArgumentError on duplicates, out-of-range indices or an empty list.
  static Configuration FromPairs(
      std::vector<std::pair<int, AttributeValue>> pairs);

  // Parses "cat1:5,cat3:2" (1-based names, as in the log header).
  static Configuration Parse(std::string_view text);

  std::size_t size() const { return attributes.size(); }
  AttributeMask mask() const;

  // True iff every (attribute, value) pair of `sub` also appears here.
  bool Contains(const Configuration& sub) const;

  // "cat1:5,cat3:2"; inverse of Parse.
  std::string ToString() const;

  // Checks the structural invariants; throws ArgumentError.
  void Validate() const;

  friend auto operator<=>(const Configuration&,
                          const Configuration&) = default;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

}  // namespace rtbconf

#endif  // RTBCONF_CONFIGURATION_H_
