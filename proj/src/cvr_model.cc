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

#include "rtbconf/cvr_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "parallel.h"
#include "rtbconf/errors.h"
#include "rtbconf/metrics.h"

namespace rtbconf {
namespace {

constexpr char kMagic[8] = {'R', 'T', 'B', 'C', 'V', 'R', 'M', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kFlagSalted = 1;

std::uint64_t SlotOf(AttributeValue value, int position,
                     std::uint64_t hash_space, HashMode mode) {
  if (mode == HashMode::kSalted) {
    return StableAttributeHash(position, value) % hash_space;
  }
  const auto d = static_cast<std::int64_t>(hash_space);
  std::int64_t r = value % d;
  if (r < 0) r += d;
  return static_cast<std::uint64_t>(r);
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutU64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t GetU64(std::istream& in, int bytes = 8) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), bytes);
  if (!in) throw DataError("truncated model checkpoint");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

std::uint64_t StableAttributeHash(int position, AttributeValue value) {
  // splitmix64 finalizer over the value offset by a per-position constant.
  std::uint64_t z = static_cast<std::uint64_t>(value) +
                    static_cast<std::uint64_t>(position + 1) *
                        0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

HashedRow HashRow(const ImpressionRecord& r, std::uint64_t hash_space,
                  HashMode mode) {
  if (hash_space == 0) throw ArgumentError("hash space must be positive");
  if (r.attributes.size() > static_cast<std::size_t>(kMaxAttributes)) {
    throw ArgumentError("too many attributes");
  }
  HashedRow h;
  h.size = static_cast<int>(r.attributes.size());
  h.label = r.conversion;
  for (int a = 0; a < h.size; ++a) {
    h.slots[static_cast<std::size_t>(a)] =
        SlotOf(r.attributes[static_cast<std::size_t>(a)], a, hash_space, mode);
  }
  return h;
}

HashedRow HashRow(const CampaignDataset& d, std::size_t row,
                  std::uint64_t hash_space, HashMode mode) {
  HashedRow h;
  h.size = d.n_attributes();
  h.label = d.conversions()[row];
  for (int a = 0; a < h.size; ++a) {
    h.slots[static_cast<std::size_t>(a)] =
        SlotOf(d.value(row, a), a, hash_space, mode);
  }
  return h;
}

double Sigmoid(double s) {
  double p;
  if (s >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-s));
  } else {
    const double e = std::exp(s);
    p = e / (1.0 + e);
  }
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

CvrModel::CvrModel(std::uint64_t hash_space, double learning_rate,
                   HashMode mode)
    : hash_space_(hash_space), learning_rate_(learning_rate), mode_(mode) {
  if (!std::has_single_bit(hash_space) || hash_space > kMaxHashSpace) {
    throw ArgumentError("hash space must be a power of two <= 2^30");
  }
  if (!(learning_rate > 0.0 && std::isfinite(learning_rate))) {
    throw ArgumentError("learning rate must be positive and finite");
  }
  weights_.assign(hash_space, 0.0);
  counts_.assign(hash_space, 0);
}

double CvrModel::Predict(const HashedRow& h) const {
  double s = 0.0;
  for (std::uint64_t slot : h.active()) s += weights_[slot];
  return Sigmoid(s);
}

void CvrModel::Update(const HashedRow& h, double p) {
  const double gradient = p - static_cast<double>(h.label);
  for (std::uint64_t slot : h.active()) {
    weights_[slot] -= learning_rate_ * gradient /
                      std::sqrt(static_cast<double>(counts_[slot]) + 1.0);
    ++counts_[slot];
  }
  ++rows_trained_;
}

void CvrModel::set_weight(std::uint64_t slot, double w) {
  if (slot >= hash_space_) throw ArgumentError("slot out of range");
  if (!std::isfinite(w)) throw ArgumentError("weight must be finite");
  weights_[slot] = w;
}

void CvrModel::Write(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  PutU32(out, kFormatVersion);
  PutU32(out, mode_ == HashMode::kSalted ? kFlagSalted : 0);
  PutU64(out, hash_space_);
  PutU64(out, std::bit_cast<std::uint64_t>(learning_rate_));
  PutU64(out, rows_trained_);
  for (double w : weights_) PutU64(out, std::bit_cast<std::uint64_t>(w));
  for (std::uint64_t n : counts_) PutU64(out, n);
}

CvrModel CvrModel::Read(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a model checkpoint (bad magic)");
  }
  const auto version = static_cast<std::uint32_t>(GetU64(in, 4));
  if (version != kFormatVersion) {
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version));
  }
  const auto flags = static_cast<std::uint32_t>(GetU64(in, 4));
  if ((flags & ~kFlagSalted) != 0) throw DataError("unknown checkpoint flags");
  const std::uint64_t hash_space = GetU64(in);
  const double alpha = std::bit_cast<double>(GetU64(in));
  const std::uint64_t rows = GetU64(in);
  CvrModel model = [&] {
    try {
      return CvrModel(hash_space, alpha,
                      (flags & kFlagSalted) ? HashMode::kSalted
                                            : HashMode::kModulus);
    } catch (const ArgumentError& e) {
      throw DataError(std::string("invalid checkpoint header: ") + e.what());
    }
  }();
  model.rows_trained_ = rows;
  for (double& w : model.weights_) {
    w = std::bit_cast<double>(GetU64(in));
    if (!std::isfinite(w)) throw DataError("non-finite weight in checkpoint");
  }
  for (std::uint64_t& n : model.counts_) n = GetU64(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("checkpoint longer than its declared hash space");
  }
  return model;
}

void CvrModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  Write(out);
  if (!out) throw Error("write failed: " + path.string());
}

CvrModel CvrModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  // Check the declared hash space against the file length before Read()
  // allocates for it.
  constexpr std::uint64_t kHeaderBytes = 8 + 4 + 4 + 8 + 8 + 8;
  const std::uint64_t size = std::filesystem::file_size(path);
  if (size >= kHeaderBytes) {
    in.seekg(16);
    const std::uint64_t hash_space = GetU64(in);
    if (hash_space > kMaxHashSpace ||
        size != kHeaderBytes + 16 * hash_space) {
      throw DataError("checkpoint size does not match its hash space");
    }
    in.seekg(0);
  }
  return Read(in);
}

TrainSummary Train(CvrModel& model, const CampaignDataset& data,
                   std::size_t monitor_window) {
  if (monitor_window == 0) throw ArgumentError("monitor window must be > 0");
  TrainSummary summary;
  double window_sum = 0.0;
  std::size_t window_rows = 0;
  for (std::size_t row = 0; row < data.rows(); ++row) {
    const HashedRow h = model.Hash(data, row);
    const double p = model.Predict(h);
    window_sum += LogLossTerm(p, h.label);
    model.Update(h, p);
    if (++window_rows == monitor_window) {
      summary.window_log_loss.push_back(window_sum /
                                        static_cast<double>(window_rows));
      window_sum = 0.0;
      window_rows = 0;
    }
  }
  if (window_rows > 0) {
    summary.window_log_loss.push_back(window_sum /
                                      static_cast<double>(window_rows));
  }
  summary.rows = data.rows();
  return summary;
}

std::vector<double> PredictRows(const CvrModel& model,
                                const CampaignDataset& data, int workers) {
  std::vector<double> out(data.rows());
  internal::ParallelForRange(data.rows(), workers,
                             [&](std::size_t begin, std::size_t end) {
                               for (std::size_t row = begin; row < end; ++row) {
                                 out[row] = model.Predict(model.Hash(data, row));
                               }
                             });
  return out;
}

CampaignDataset PredictAll(const CvrModel& model, const CampaignDataset& data,
                           int workers) {
  return data.WithCvr(PredictRows(model, data, workers));
}

}  // namespace rtbconf
