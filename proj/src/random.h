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

#ifndef RTBCONF_SRC_RANDOM_H_
#define RTBCONF_SRC_RANDOM_H_

#include <cstdint>
#include <limits>
#include <random>

namespace rtbconf::internal {

// Platform-stable draws on top of std::mt19937_64, whose output sequence is
// fixed by the standard (the std:: distributions are not).
class StableRng {
 public:
  explicit StableRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double low, double high) {
    return low + (high - low) * Uniform01();
  }

  // Uniform on [0, n), unbiased by rejection. n > 0.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rtbconf::internal

#endif  // RTBCONF_SRC_RANDOM_H_
