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

#include "rtbconf/config_search.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "parallel.h"
#include "rtbconf/errors.h"
#include "rtbconf/scoring.h"
#include "rtbconf/text_format.h"

namespace rtbconf {
namespace {

using Bitmap = std::vector<std::uint64_t>;

constexpr std::uint32_t kEmptySlot = std::numeric_limits<std::uint32_t>::max();

std::uint64_t Mix(std::uint64_t h, std::uint64_t v) {
  h = (h ^ v) * 0xBF58476D1CE4E5B9ull;
  return h ^ (h >> 31);
}

// Read-only view of a dataset prepared for grouping: dense per-attribute
// codes and the profitability column with absent cells as 0.
struct Prepared {
  const CampaignDataset* data = nullptr;
  std::size_t rows = 0;
  std::vector<std::vector<std::uint32_t>> codes;
  std::vector<double> profitability;

  explicit Prepared(const CampaignDataset& d) : data(&d), rows(d.rows()) {
    codes.resize(static_cast<std::size_t>(d.n_attributes()));
    for (int a = 0; a < d.n_attributes(); ++a) {
      std::unordered_map<AttributeValue, std::uint32_t> dense;
      auto& out = codes[static_cast<std::size_t>(a)];
      out.resize(rows);
      const auto column = d.attribute(a);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto [it, inserted] = dense.try_emplace(
            column[r], static_cast<std::uint32_t>(dense.size()));
        out[r] = it->second;
      }
    }
    profitability.assign(rows, 0.0);
    const auto prof = d.profitability();
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::isnan(prof[r])) profitability[r] = prof[r];
    }
  }
};

struct Group {
  std::size_t representative = 0;  // first row of the group
  std::size_t count = 0;
  double sum = 0.0;
};

template <typename Fn>
void ForEachSetBit(const Bitmap& bits, Fn&& fn) {
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t word = bits[w];
    while (word != 0) {
      fn(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
}

std::size_t PopCount(const Bitmap& bits) {
  std::size_t n = 0;
  for (std::uint64_t w : bits) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

// Groups the candidate rows (all rows when `candidates` is null) by their
// projection onto `attributes`, in ascending row order. When `group_of_row`
// is given it receives the group index of every visited row.
std::vector<Group> GroupRows(const Prepared& p,
                             const std::vector<int>& attributes,
                             const Bitmap* candidates,
                             std::vector<std::uint32_t>* group_of_row) {
  const std::size_t n = candidates ? PopCount(*candidates) : p.rows;
  std::vector<Group> groups;
  if (n == 0) return groups;
  std::vector<const std::uint32_t*> cols;
  cols.reserve(attributes.size());
  for (int a : attributes) cols.push_back(p.codes[static_cast<std::size_t>(a)].data());

  const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, 2 * n));
  const std::size_t mask = capacity - 1;
  std::vector<std::uint32_t> table(capacity, kEmptySlot);
  if (group_of_row) group_of_row->resize(p.rows);

  auto visit = [&](std::size_t r) {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (const std::uint32_t* c : cols) h = Mix(h, c[r]);
    std::size_t slot = static_cast<std::size_t>(h) & mask;
    while (true) {
      const std::uint32_t g = table[slot];
      if (g == kEmptySlot) {
        table[slot] = static_cast<std::uint32_t>(groups.size());
        groups.push_back({r, 1, p.profitability[r]});
        if (group_of_row) (*group_of_row)[r] = table[slot];
        return;
      }
      Group& group = groups[g];
      bool same = true;
      for (const std::uint32_t* c : cols) {
        if (c[group.representative] != c[r]) {
          same = false;
          break;
        }
      }
      if (same) {
        ++group.count;
        group.sum += p.profitability[r];
        if (group_of_row) (*group_of_row)[r] = g;
        return;
      }
      slot = (slot + 1) & mask;
    }
  };
  if (candidates) {
    ForEachSetBit(*candidates, visit);
  } else {
    for (std::size_t r = 0; r < p.rows; ++r) visit(r);
  }
  return groups;
}

struct Scored {
  const Group* group;
  double avg;
  double score;
};

// Orders groups of one subset by the ranking's total order.
bool GroupRanksBefore(const Prepared& p, const std::vector<int>& attributes,
                      const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.group->count != b.group->count) return a.group->count > b.group->count;
  for (int attr : attributes) {
    const AttributeValue va = p.data->value(a.group->representative, attr);
    const AttributeValue vb = p.data->value(b.group->representative, attr);
    if (va != vb) return va < vb;
  }
  return false;
}

// Scores the groups accepted by `keep` and returns the best `top_k` (all
// when 0) as configurations.
template <typename Keep>
std::vector<ScoredConfiguration> ScoreGroups(const Prepared& p,
                                             const std::vector<int>& attributes,
                                             const std::vector<Group>& groups,
                                             const SearchParams& params,
                                             Keep&& keep) {
  const QualityScoreParams qs{params.limit};
  std::vector<Scored> scored;
  for (const Group& g : groups) {
    if (!keep(g)) continue;
    const double avg = g.sum / static_cast<double>(g.count);
    scored.push_back({&g, avg, QualityScore(avg, g.count, qs)});
  }
  auto less = [&](const Scored& a, const Scored& b) {
    return GroupRanksBefore(p, attributes, a, b);
  };
  if (params.top_k > 0 && scored.size() > params.top_k) {
    std::partial_sort(scored.begin(),
                      scored.begin() + static_cast<std::ptrdiff_t>(params.top_k),
                      scored.end(), less);
    scored.resize(params.top_k);
  }
  std::vector<ScoredConfiguration> out;
  out.reserve(scored.size());
  for (const Scored& s : scored) {
    ScoredConfiguration c;
    c.config.attributes = attributes;
    for (int a : attributes) {
      c.config.values.push_back(p.data->value(s.group->representative, a));
    }
    c.matched_rows = s.group->count;
    c.profitability_sum = s.group->sum;
    c.avg_profitability = s.avg;
    c.quality_score = s.score;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<int>> SubsetsOfSize(
    const std::vector<std::vector<int>>& all, std::size_t k) {
  std::vector<std::vector<int>> out;
  for (const auto& s : all) {
    if (s.size() == k) out.push_back(s);
  }
  return out;
}

AttributeMask MaskOf(const std::vector<int>& attributes) {
  AttributeMask m = 0;
  for (int a : attributes) m |= static_cast<AttributeMask>(1u << a);
  return m;
}

// Visits the combinations of `k` positions out of `n` in lexicographic order.
template <typename Fn>
void ForEachCombination(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

std::uint64_t CountAttributeSubsets(int n) {
  if (n < 1 || n > 63) throw ArgumentError("attribute count must be in [1,63]");
  return (std::uint64_t{1} << n) - 1;
}

std::vector<std::vector<int>> EnumerateSubsets(int n, int max_size) {
  if (n < 1 || n > kMaxAttributes) {
    throw ArgumentError("attribute count must be in [1,9]");
  }
  if (max_size < 1 || max_size > n) {
    throw ArgumentError("max subset size must be in [1," + std::to_string(n) +
                        "]");
  }
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= max_size; ++k) {
    ForEachCombination(n, k, [&](const std::vector<int>& c) { out.push_back(c); });
  }
  return out;
}

std::map<std::vector<AttributeValue>, std::vector<std::size_t>>
UniqueValueTuples(const CampaignDataset& d, const std::vector<int>& attributes) {
  for (int a : attributes) {
    if (a < 0 || a >= d.n_attributes()) {
      throw ArgumentError("attribute index out of range");
    }
  }
  std::map<std::vector<AttributeValue>, std::vector<std::size_t>> out;
  std::vector<AttributeValue> key(attributes.size());
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      key[i] = d.value(r, attributes[i]);
    }
    out[key].push_back(r);
  }
  return out;
}

std::size_t RejectedSet::TupleHash::operator()(
    const std::vector<AttributeValue>& v) const {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (AttributeValue x : v) h = Mix(h, static_cast<std::uint64_t>(x));
  return static_cast<std::size_t>(h);
}

void RejectedSet::Add(const Configuration& c) {
  c.Validate();
  if (by_mask_[c.mask()].insert(c.values).second) ++size_;
}

bool RejectedSet::PruneCheck(const Configuration& c) const {
  if (size_ == 0) return false;
  const int n = static_cast<int>(c.size());
  std::vector<AttributeValue> probe;
  for (int k = 1; k <= n; ++k) {
    bool found = false;
    ForEachCombination(n, k, [&](const std::vector<int>& pos) {
      if (found) return;
      AttributeMask m = 0;
      for (int i : pos) {
        m |= static_cast<AttributeMask>(1u << c.attributes[static_cast<std::size_t>(i)]);
      }
      const TupleSet& set = by_mask_[m];
      if (set.empty()) return;
      probe.clear();
      for (int i : pos) probe.push_back(c.values[static_cast<std::size_t>(i)]);
      found = set.contains(probe);
    });
    if (found) return true;
  }
  return false;
}

void SearchParams::Validate(int n_attributes) const {
  if (limit < 1) throw ArgumentError("limit must be >= 1");
  if (max_subset_size < 1) throw ArgumentError("max subset size must be >= 1");
  if (workers < 1) throw ArgumentError("workers must be >= 1");
  if (n_attributes < 1 || n_attributes > kMaxAttributes) {
    throw ArgumentError("dataset must have 1..9 attributes");
  }
}

bool RanksBefore(const ScoredConfiguration& a, const ScoredConfiguration& b) {
  return RanksBefore(a.quality_score, a.matched_rows, a.config, b.quality_score,
                     b.matched_rows, b.config);
}

std::vector<ScoredConfiguration> Search(const CampaignDataset& d,
                                        const SearchParams& params) {
  params.Validate(d.n_attributes());
  if (!d.has_profitability()) {
    throw ArgumentError("search needs a profitability column");
  }
  const auto start = std::chrono::steady_clock::now();
  const int n = d.n_attributes();
  const int max_size = std::min(params.max_subset_size, n);
  const Prepared prepared(d);
  const auto all_subsets = EnumerateSubsets(n, max_size);
  const std::size_t words = (d.rows() + 63) / 64;

  // Row-mask engine state: bitmaps of the previous level, indexed by mask;
  // a missing bitmap means no row qualified.
  std::vector<std::optional<Bitmap>> alive(1u << kMaxAttributes);
  RejectedSet rejected;

  std::vector<ScoredConfiguration> ranking;
  for (int k = 1; k <= max_size; ++k) {
    const auto level = SubsetsOfSize(all_subsets, static_cast<std::size_t>(k));
    std::vector<std::vector<ScoredConfiguration>> results(level.size());
    std::vector<std::optional<Bitmap>> next_alive(level.size());
    std::vector<std::vector<Configuration>> newly_rejected(level.size());
    const bool track_alive = params.pruning == PruningMode::kRowMask &&
                             !params.allow_below_limit && k < max_size;

    internal::ParallelForEach(level.size(), params.workers, [&](std::size_t s) {
      const std::vector<int>& attrs = level[s];
      auto qualifies = [&](const Group& g) {
        return params.allow_below_limit || g.count >= params.limit;
      };
      switch (params.pruning) {
        case PruningMode::kRowMask: {
          std::optional<Bitmap> candidates;
          if (k > 1 && !params.allow_below_limit) {
            const AttributeMask m = MaskOf(attrs);
            for (int a : attrs) {
              const auto& parent = alive[m & ~(1u << a)];
              if (!parent) return;
              if (!candidates) {
                candidates = *parent;
              } else {
                for (std::size_t w = 0; w < words; ++w) {
                  (*candidates)[w] &= (*parent)[w];
                }
              }
            }
          }
          std::vector<std::uint32_t> group_of_row;
          const auto groups =
              GroupRows(prepared, attrs, candidates ? &*candidates : nullptr,
                        track_alive ? &group_of_row : nullptr);
          results[s] = ScoreGroups(prepared, attrs, groups, params, qualifies);
          if (track_alive) {
            Bitmap bits(words, 0);
            bool any = false;
            auto mark = [&](std::size_t r) {
              if (groups[group_of_row[r]].count >= params.limit) {
                bits[r / 64] |= std::uint64_t{1} << (r % 64);
                any = true;
              }
            };
            if (candidates) {
              ForEachSetBit(*candidates, mark);
            } else {
              for (std::size_t r = 0; r < d.rows(); ++r) mark(r);
            }
            if (any) next_alive[s] = std::move(bits);
          }
          break;
        }
        case PruningMode::kRejectedSet: {
          const auto groups = GroupRows(prepared, attrs, nullptr, nullptr);
          Configuration c;
          c.attributes = attrs;
          auto keep = [&](const Group& g) {
            c.values.clear();
            for (int a : attrs) c.values.push_back(d.value(g.representative, a));
            if (rejected.PruneCheck(c)) return false;
            if (qualifies(g)) return true;
            newly_rejected[s].push_back(c);
            return false;
          };
          results[s] = ScoreGroups(prepared, attrs, groups, params, keep);
          break;
        }
        case PruningMode::kNone: {
          const auto groups = GroupRows(prepared, attrs, nullptr, nullptr);
          results[s] = ScoreGroups(prepared, attrs, groups, params, qualifies);
          break;
        }
      }
    });

    // Level barrier: publish this level's pruning state, then collect.
    if (track_alive) {
      std::fill(alive.begin(), alive.end(), std::nullopt);
      for (std::size_t s = 0; s < level.size(); ++s) {
        alive[MaskOf(level[s])] = std::move(next_alive[s]);
      }
    }
    for (auto& batch : newly_rejected) {
      for (const Configuration& c : batch) rejected.Add(c);
    }
    const double elapsed =
        params.record_time
            ? std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count()
            : 0.0;
    for (auto& part : results) {
      for (auto& c : part) {
        c.elapsed_seconds = elapsed;
        ranking.push_back(std::move(c));
      }
    }
  }

  auto less = [](const ScoredConfiguration& a, const ScoredConfiguration& b) {
    return RanksBefore(a, b);
  };
  if (params.top_k > 0 && ranking.size() > params.top_k) {
    std::partial_sort(ranking.begin(),
                      ranking.begin() + static_cast<std::ptrdiff_t>(params.top_k),
                      ranking.end(), less);
    ranking.resize(params.top_k);
  } else {
    std::sort(ranking.begin(), ranking.end(), less);
  }
  return ranking;
}

SequentialResult SearchSequential(const CampaignDataset& d,
                                  const SearchParams& params,
                                  std::size_t n_rounds) {
  if (n_rounds < 1) throw ArgumentError("need at least one round");
  SearchParams round_params = params;
  round_params.top_k = 1;
  SequentialResult result;
  CampaignDataset working = d;
  for (std::size_t round = 0; round < n_rounds; ++round) {
    std::vector<ScoredConfiguration> best;
    if (!working.empty()) best = Search(working, round_params);
    if (best.empty()) {
      result.early_stop = true;
      break;
    }
    SequentialRound r;
    r.best = std::move(best.front());
    r.rows_before = working.rows();
    std::vector<std::size_t> keep;
    keep.reserve(working.rows());
    for (std::size_t row = 0; row < working.rows(); ++row) {
      if (!working.Matches(r.best.config, row)) keep.push_back(row);
    }
    working = working.Select(keep);
    r.remaining_rows = working.rows();
    result.rounds.push_back(std::move(r));
  }
  return result;
}

namespace {

std::string JoinColumns(const Configuration& c) {
  std::string out;
  for (std::size_t i = 0; i < c.attributes.size(); ++i) {
    if (i) out += ';';
    out += "cat" + std::to_string(c.attributes[i] + 1);
  }
  return out;
}

std::string JoinValues(const Configuration& c) {
  std::string out;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(c.values[i]);
  }
  return out;
}

}  // namespace

void WriteRanking(std::ostream& out,
                  const std::vector<ScoredConfiguration>& ranking,
                  char delimiter, bool include_time) {
  const char d = delimiter;
  out << "rank" << d << "avg_profitability" << d << "matched_rows" << d
      << "selected_columns" << d << "values" << d;
  if (include_time) out << "elapsed_seconds" << d;
  out << "quality_score\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const ScoredConfiguration& c = ranking[i];
    out << (i + 1) << d << FormatShortest(c.avg_profitability) << d
        << c.matched_rows << d << JoinColumns(c.config) << d
        << JoinValues(c.config) << d;
    if (include_time) out << FormatShortest(c.elapsed_seconds) << d;
    out << FormatShortest(c.quality_score) << '\n';
  }
}

nlohmann::ordered_json RankingToJson(
    const std::vector<ScoredConfiguration>& ranking, bool include_time) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const ScoredConfiguration& c = ranking[i];
    nlohmann::ordered_json row;
    row["rank"] = i + 1;
    row["avg_profitability"] = c.avg_profitability;
    row["matched_rows"] = c.matched_rows;
    nlohmann::ordered_json columns = nlohmann::ordered_json::array();
    for (int a : c.config.attributes) columns.push_back("cat" + std::to_string(a + 1));
    row["selected_columns"] = std::move(columns);
    row["values"] = c.config.values;
    if (include_time) row["elapsed_seconds"] = c.elapsed_seconds;
    row["quality_score"] = c.quality_score;
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* PruningModeName(PruningMode mode) {
  switch (mode) {
    case PruningMode::kRowMask: return "rowmask";
    case PruningMode::kRejectedSet: return "rejected-set";
    case PruningMode::kNone: return "none";
  }
  return "?";
}

PruningMode ParsePruningMode(const std::string& name) {
  if (name == "rowmask") return PruningMode::kRowMask;
  if (name == "rejected-set") return PruningMode::kRejectedSet;
  if (name == "none") return PruningMode::kNone;
  throw ArgumentError("unknown pruning mode '" + name +
                      "' (rowmask, rejected-set, none)");
}

}  // namespace rtbconf
