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

#ifndef RTBCONF_KV_CONFIG_H_
#define RTBCONF_KV_CONFIG_H_

#include <cstddef>
#include <string>
#include <vector>

namespace rtbconf {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// `key = value` lines; blank lines and lines starting with '#' or ';' are
// skipped, surrounding whitespace and matching quotes around the value are
// stripped. Throws ArgumentError on a line without '='.
std::vector<KeyValue> ParseKeyValues(const std::string& text);

// Value parsers that throw ArgumentError naming `key` on bad input.
double ParseDouble(const std::string& key, const std::string& value);
long long ParseInteger(const std::string& key, const std::string& value);
bool ParseBool(const std::string& key, const std::string& value);
std::vector<double> ParseDoubleList(const std::string& key,
                                    const std::string& value);

}  // namespace rtbconf

#endif  // RTBCONF_KV_CONFIG_H_
