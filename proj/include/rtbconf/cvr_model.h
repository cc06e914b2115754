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

// Conversion-rate model: online logistic regression over hashed categorical
// attributes with a per-slot adaptive learning rate.
//
// Every attribute value is hashed into one of D slots. A row activates one
// slot per attribute; its prediction is sigmoid(sum of the active weights),
// with no intercept. After predicting p for a row with label y, each active
// slot i (in attribute order, repeated slots visited once per occurrence) is
// updated as
//
//     w[i] -= alpha * (p - y) / sqrt(n[i] + 1);   n[i] += 1;
//
// i.e. the step shrinks with the number of times the slot has been touched.

#ifndef RTBCONF_CVR_MODEL_H_
#define RTBCONF_CVR_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rtbconf/dataset.h"

namespace rtbconf {

enum class HashMode {
  kModulus,  // slot = value mod D
  kSalted,   // slot = StableAttributeHash(position, value) mod D
};

// Position-salted 64-bit mix of an attribute value. Identical on every
// platform and run.
std::uint64_t StableAttributeHash(int position, AttributeValue value);

struct HashedRow {
  std::array<std::uint64_t, kMaxAttributes> slots{};
  int size = 0;
  int label = 0;

  std::span<const std::uint64_t> active() const {
    return {slots.data(), static_cast<std::size_t>(size)};
  }
};

HashedRow HashRow(const ImpressionRecord& r, std::uint64_t hash_space,
                  HashMode mode = HashMode::kModulus);
HashedRow HashRow(const CampaignDataset& d, std::size_t row,
                  std::uint64_t hash_space, HashMode mode = HashMode::kModulus);

// Logistic function, evaluated without overflow and clamped to the open
// interval (0, 1).
double Sigmoid(double s);

class CvrModel {
 public:
  static constexpr std::uint64_t kDefaultHashSpace = std::uint64_t{1} << 20;
  static constexpr double kDefaultLearningRate = 0.1;
  static constexpr std::uint64_t kMaxHashSpace = std::uint64_t{1} << 30;

  // Throws ArgumentError unless hash_space is a power of two and
  // learning_rate is positive and finite.
  explicit CvrModel(std::uint64_t hash_space = kDefaultHashSpace,
                    double learning_rate = kDefaultLearningRate,
                    HashMode mode = HashMode::kModulus);

  std::uint64_t hash_space() const { return hash_space_; }
  double learning_rate() const { return learning_rate_; }
  HashMode hash_mode() const { return mode_; }
  std::uint64_t rows_trained() const { return rows_trained_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  HashedRow Hash(const CampaignDataset& d, std::size_t row) const {
    return HashRow(d, row, hash_space_, mode_);
  }

  // Pure; slots must be < hash_space().
  double Predict(const HashedRow& h) const;
  // One SGD step for row `h` given its prediction `p` under this model.
  void Update(const HashedRow& h, double p);

  // Test hook; the value must be finite.
  void set_weight(std::uint64_t slot, double w);

  // Little-endian checkpoint: "RTBCVRM1", u32 version, u32 flags
  // (bit 0 = salted hashing), u64 D, f64 alpha, u64 rows trained, then D f64
  // weights and D u64 counts.
  void Write(std::ostream& out) const;
  static CvrModel Read(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static CvrModel Load(const std::filesystem::path& path);

  bool operator==(const CvrModel&) const = default;

 private:
  std::uint64_t hash_space_;
  double learning_rate_;
  HashMode mode_;
  std::uint64_t rows_trained_ = 0;
  std::vector<double> weights_;
  std::vector<std::uint64_t> counts_;
};

struct TrainSummary {
  std::size_t rows = 0;
  // Mean progressive log loss (prediction made before the update) of each
  // consecutive window of `monitor_window` rows; the last entry may cover a
  // shorter tail.
  std::vector<double> window_log_loss;
};

// Single pass over `data` in row order: hash, predict, update.
TrainSummary Train(CvrModel& model, const CampaignDataset& data,
                   std::size_t monitor_window = 100000);

// Predicted cvr for every row; the model is only read.
std::vector<double> PredictRows(const CvrModel& model,
                                const CampaignDataset& data, int workers = 1);
// `data` with its cvr column replaced by the model's predictions.
CampaignDataset PredictAll(const CvrModel& model, const CampaignDataset& data,
                           int workers = 1);

}  // namespace rtbconf

#endif  // RTBCONF_CVR_MODEL_H_
