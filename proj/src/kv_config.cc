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

#include "rtbconf/kv_config.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string_view>

#include "rtbconf/errors.h"

namespace rtbconf {
namespace {

std::string_view Strip(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Bad(const std::string& key, const std::string& value,
                      const char* expected) {
  throw ArgumentError("bad value for '" + key + "': '" + value +
                      "' (expected " + expected + ")");
}

}  // namespace

std::vector<KeyValue> ParseKeyValues(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = Strip(raw);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("line " + std::to_string(line) +
                          ": expected 'key = value'");
    }
    std::string_view value = Strip(s.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    out.push_back({std::string(Strip(s.substr(0, eq))), std::string(value),
                   line});
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  const std::string_view s = Strip(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() ||
      !std::isfinite(out)) {
    Bad(key, value, "a finite number");
  }
  return out;
}

long long ParseInteger(const std::string& key, const std::string& value) {
  const std::string_view s = Strip(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    Bad(key, value, "an integer");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  const std::string_view s = Strip(value);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  Bad(key, value, "true or false");
}

std::vector<double> ParseDoubleList(const std::string& key,
                                    const std::string& value) {
  std::vector<double> out;
  std::string_view rest = value;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(ParseDouble(key, std::string(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

}  // namespace rtbconf
