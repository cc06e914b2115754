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

#include "rtbconf/configuration.h"

#include <algorithm>
#include <charconv>

#include "rtbconf/errors.h"

namespace rtbconf {

Configuration Configuration::FromPairs(
    std::vector<std::pair<int, AttributeValue>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  Configuration c;
  c.attributes.reserve(pairs.size());
  c.values.reserve(pairs.size());
  for (const auto& [attribute, value] : pairs) {
    c.attributes.push_back(attribute);
    c.values.push_back(value);
  }
  c.Validate();
  return c;
}

Configuration Configuration::Parse(std::string_view text) {
  std::vector<std::pair<int, AttributeValue>> pairs;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    const auto colon = item.find(':');
    if (item.substr(0, 3) != "cat" || colon == std::string_view::npos) {
      throw ArgumentError("bad configuration item '" + std::string(item) +
                          "' (expected catN:value)");
    }
    int index = 0;
    AttributeValue value = 0;
    const std::string_view index_text = item.substr(3, colon - 3);
    const std::string_view value_text = item.substr(colon + 1);
    auto r1 = std::from_chars(index_text.data(),
                              index_text.data() + index_text.size(), index);
    auto r2 = std::from_chars(value_text.data(),
                              value_text.data() + value_text.size(), value);
    if (r1.ec != std::errc{} || r1.ptr != index_text.data() + index_text.size() ||
        r2.ec != std::errc{} || r2.ptr != value_text.data() + value_text.size()) {
      throw ArgumentError("bad configuration item '" + std::string(item) + "'");
    }
    pairs.emplace_back(index - 1, value);
  }
  return FromPairs(std::move(pairs));
}

AttributeMask Configuration::mask() const {
  AttributeMask m = 0;
  for (int a : attributes) m |= static_cast<AttributeMask>(1u << a);
  return m;
}

bool Configuration::Contains(const Configuration& sub) const {
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.attributes.size(); ++i) {
    while (j < attributes.size() && attributes[j] < sub.attributes[i]) ++j;
    if (j == attributes.size() || attributes[j] != sub.attributes[i] ||
        values[j] != sub.values[i]) {
      return false;
    }
  }
  return true;
}

std::string Configuration::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (i) out += ',';
    out += "cat" + std::to_string(attributes[i] + 1) + ':' +
           std::to_string(values[i]);
  }
  return out;
}

void Configuration::Validate() const {
  if (attributes.empty()) throw ArgumentError("empty configuration");
  if (attributes.size() != values.size()) {
    throw ArgumentError("configuration index/value length mismatch");
  }
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] < 0 || attributes[i] >= kMaxAttributes) {
      throw ArgumentError("configuration attribute index out of range: " +
                          std::to_string(attributes[i]));
    }
    if (i > 0 && attributes[i] <= attributes[i - 1]) {
      throw ArgumentError("configuration attribute indices must be strictly "
                          "increasing");
    }
  }
}

}  // namespace rtbconf
