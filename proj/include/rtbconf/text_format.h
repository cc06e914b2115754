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

#ifndef RTBCONF_TEXT_FORMAT_H_
#define RTBCONF_TEXT_FORMAT_H_

#include <array>
#include <charconv>
#include <string>

namespace rtbconf {

// Shortest decimal that round-trips to the same double.
inline std::string FormatShortest(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

// `digits` significant digits, %g style.
inline std::string FormatSignificant(double v, int digits) {
  std::array<char, 40> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                               std::chars_format::general, digits);
  return std::string(buf.data(), r.ptr);
}

}  // namespace rtbconf

#endif  // RTBCONF_TEXT_FORMAT_H_
