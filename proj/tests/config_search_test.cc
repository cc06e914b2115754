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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rtbconf/errors.h"
#include "rtbconf/scoring.h"
#include "test_util.h"

namespace rtbconf {
namespace {

using testing::BruteForceSearch;

CampaignDataset RandomData(std::mt19937_64& rng, std::size_t rows, int attrs,
                           int cardinality, double excluded = 0.1) {
  testing::RandomDatasetOptions o;
  o.rows = rows;
  o.attributes = attrs;
  o.cardinality = cardinality;
  o.excluded_fraction = excluded;
  return testing::RandomScoredDataset(rng, o);
}

TEST(ConfigSearch, CountsSubsets) {
  EXPECT_EQ(CountAttributeSubsets(1), 1u);
  EXPECT_EQ(CountAttributeSubsets(3), 7u);
  EXPECT_EQ(CountAttributeSubsets(9), 511u);
  // Direct binomial summation.
  for (int n = 1; n <= 20; ++n) {
    std::uint64_t sum = 0, c = 1;
    for (int k = 1; k <= n; ++k) {
      c = c * static_cast<std::uint64_t>(n - k + 1) / static_cast<std::uint64_t>(k);
      sum += c;
    }
    EXPECT_EQ(CountAttributeSubsets(n), sum);
  }
}

TEST(ConfigSearch, EnumeratesBySizeThenLexicographically) {
  using S = std::vector<std::vector<int>>;
  EXPECT_EQ(EnumerateSubsets(2, 2), (S{{0}, {1}, {0, 1}}));
  EXPECT_EQ(EnumerateSubsets(3, 1), (S{{0}, {1}, {2}}));
  EXPECT_EQ(EnumerateSubsets(3, 3),
            (S{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}));
  const S all = EnumerateSubsets(9, 9);
  EXPECT_EQ(all.size(), 511u);
  for (std::size_t i = 1; i < all.size(); ++i) {
    EXPECT_TRUE(all[i - 1].size() < all[i].size() ||
                (all[i - 1].size() == all[i].size() && all[i - 1] < all[i]));
  }
  EXPECT_THROW(EnumerateSubsets(3, 4), ArgumentError);
  EXPECT_THROW(EnumerateSubsets(0, 1), ArgumentError);
}

TEST(ConfigSearch, UniqueValueTuples) {
  const CampaignDataset d = testing::DatasetFromTable(
      {{85, 58}, {7714, 424}, {596, 3458}, {85, 58}}, {1, 1, 1, 1});
  const auto buckets = UniqueValueTuples(d, {0, 1});
  ASSERT_EQ(buckets.size(), 3u);
  EXPECT_EQ(buckets.at({85, 58}), (std::vector<std::size_t>{0, 3}));

  const CampaignDataset one = testing::DatasetFromTable({{1, 2}}, {1});
  EXPECT_EQ(UniqueValueTuples(one, {1}).size(), 1u);
  const CampaignDataset same =
      testing::DatasetFromTable({{4, 4}, {4, 4}, {4, 4}}, {1, 2, 3});
  EXPECT_EQ(UniqueValueTuples(same, {0, 1}).begin()->second.size(), 3u);

  std::mt19937_64 rng(2);
  const CampaignDataset r = RandomData(rng, 300, 4, 5);
  for (const auto& attrs : EnumerateSubsets(4, 4)) {
    std::size_t total = 0;
    for (const auto& [key, rows] : UniqueValueTuples(r, attrs)) total += rows.size();
    EXPECT_EQ(total, r.rows());
  }
}

TEST(ConfigSearch, PruneCheckExamples) {
  RejectedSet rejected;
  EXPECT_FALSE(rejected.PruneCheck(Configuration::Parse("cat1:458,cat3:47")));
  rejected.Add(Configuration::Parse("cat1:458"));
  EXPECT_TRUE(rejected.PruneCheck(Configuration::Parse("cat1:458,cat3:47")));
  EXPECT_TRUE(rejected.PruneCheck(
      Configuration::Parse("cat1:458,cat3:47,cat4:58,cat7:58")));
  EXPECT_FALSE(rejected.PruneCheck(Configuration::Parse("cat1:999,cat3:47")));
  EXPECT_FALSE(rejected.PruneCheck(Configuration::Parse("cat2:458")));
  EXPECT_EQ(rejected.size(), 1u);
}

TEST(ConfigSearch, RejectedSetMatchesLinearOracle) {
  std::mt19937_64 rng(6);
  auto random_config = [&](int max_size) {
    std::vector<std::pair<int, AttributeValue>> pairs;
    for (int a = 0; a < 9; ++a) {
      if (testing::Below(rng, 9) < static_cast<std::uint64_t>(max_size)) {
        pairs.emplace_back(a, static_cast<AttributeValue>(testing::Below(rng, 3)));
      }
    }
    if (pairs.empty()) pairs.emplace_back(0, 0);
    return Configuration::FromPairs(pairs);
  };
  for (int trial = 0; trial < 50; ++trial) {
    RejectedSet set;
    std::vector<Configuration> list;
    for (int i = 0; i < 30; ++i) {
      list.push_back(random_config(2));
      set.Add(list.back());
    }
    for (int q = 0; q < 100; ++q) {
      const Configuration c = random_config(5);
      bool expected = false;
      for (const Configuration& r : list) {
        bool contained = true;
        for (std::size_t k = 0; k < r.attributes.size() && contained; ++k) {
          bool found = false;
          for (std::size_t j = 0; j < c.attributes.size(); ++j) {
            found = found || (c.attributes[j] == r.attributes[k] &&
                              c.values[j] == r.values[k]);
          }
          contained = found;
        }
        expected = expected || contained;
      }
      EXPECT_EQ(set.PruneCheck(c), expected);
    }
  }
}

TEST(ConfigSearch, AllEnginesEqualBruteForce) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const int attrs = 1 + static_cast<int>(testing::Below(rng, 5));
    const std::size_t rows = 1 + testing::Below(rng, 250);
    const int cardinality = 1 + static_cast<int>(testing::Below(rng, 6));
    const CampaignDataset d = RandomData(rng, rows, attrs, cardinality, 0.15);
    const std::size_t limit = 1 + testing::Below(rng, 40);
    const bool below = testing::Below(rng, 4) == 0;
    const int max_size = 1 + static_cast<int>(testing::Below(rng, attrs));
    const auto oracle = BruteForceSearch(d, limit, below, max_size);
    for (PruningMode mode :
         {PruningMode::kRowMask, PruningMode::kRejectedSet, PruningMode::kNone}) {
      for (int workers : {1, 3}) {
        SearchParams p;
        p.limit = limit;
        p.allow_below_limit = below;
        p.max_subset_size = max_size;
        p.pruning = mode;
        p.workers = workers;
        const auto got = Search(d, p);
        ASSERT_EQ(got.size(), oracle.size())
            << PruningModeName(mode) << " trial " << trial;
        for (std::size_t i = 0; i < got.size(); ++i) {
          EXPECT_EQ(got[i], oracle[i]) << PruningModeName(mode) << " rank " << i;
        }
      }
    }
  }
}

TEST(ConfigSearch, NineAttributeSearchMatchesBruteForce) {
  std::mt19937_64 rng(4);
  const CampaignDataset d = RandomData(rng, 200, 9, 3);
  SearchParams p;
  p.limit = 15;
  p.workers = 4;
  EXPECT_EQ(Search(d, p), BruteForceSearch(d, 15, false));
  p.pruning = PruningMode::kRejectedSet;
  EXPECT_EQ(Search(d, p), BruteForceSearch(d, 15, false));
}

TEST(ConfigSearch, TopKIsThePrefixOfTheFullRanking) {
  std::mt19937_64 rng(5);
  const CampaignDataset d = RandomData(rng, 400, 4, 4);
  SearchParams p;
  p.limit = 10;
  const auto full = Search(d, p);
  ASSERT_GT(full.size(), 10u);
  p.top_k = 10;
  for (int workers : {1, 4}) {
    p.workers = workers;
    const auto top = Search(d, p);
    ASSERT_EQ(top.size(), 10u);
    EXPECT_TRUE(std::equal(top.begin(), top.end(), full.begin()));
  }
}

TEST(ConfigSearch, ConstantAttributes) {
  const std::size_t rows = 50;
  std::vector<std::vector<AttributeValue>> values(rows, std::vector<AttributeValue>(4, 7));
  std::vector<double> prof(rows);
  for (std::size_t i = 0; i < rows; ++i) prof[i] = 0.25 * static_cast<double>(i % 4);
  const CampaignDataset d = testing::DatasetFromTable(values, prof);
  SearchParams p;
  p.limit = 20;
  const auto ranking = Search(d, p);
  ASSERT_EQ(ranking.size(), 15u);
  double sum = 0.0;
  for (double v : prof) sum += v;
  for (const auto& c : ranking) {
    EXPECT_EQ(c.matched_rows, rows);
    EXPECT_EQ(c.avg_profitability, ranking[0].avg_profitability);
  }
  EXPECT_DOUBLE_EQ(ranking[0].quality_score, sum / 50.0 * 20.0);
  EXPECT_EQ(ranking[0].config.attributes, (std::vector<int>{0}));
  EXPECT_EQ(ranking[1].config.attributes, (std::vector<int>{0, 1}));
  EXPECT_EQ(ranking.back().config.attributes, (std::vector<int>{3}));
}

TEST(ConfigSearch, LimitAboveRowsGivesEmptyRanking) {
  std::mt19937_64 rng(1);
  const CampaignDataset d = RandomData(rng, 100, 3, 2);
  SearchParams p;
  p.limit = 101;
  for (PruningMode mode :
       {PruningMode::kRowMask, PruningMode::kRejectedSet, PruningMode::kNone}) {
    p.pruning = mode;
    EXPECT_TRUE(Search(d, p).empty());
  }
}

TEST(ConfigSearch, BestAverageIsNonIncreasingInLimit) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const CampaignDataset d = RandomData(rng, 300, 4, 4);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t limit = 1; limit <= 300; limit += 13) {
      SearchParams p;
      p.limit = limit;
      const auto r = Search(d, p);
      if (r.empty()) {
        previous = -1.0;
        continue;
      }
      double best = 0.0;
      for (const auto& c : r) best = std::max(best, c.avg_profitability);
      EXPECT_LE(best, previous);
      previous = best;
    }
  }
}

TEST(ConfigSearch, ScoresRecomputeFromTheirFields) {
  std::mt19937_64 rng(9);
  const CampaignDataset d = RandomData(rng, 300, 4, 3);
  SearchParams p;
  p.limit = 25;
  p.allow_below_limit = true;
  const QualityScoreParams q{p.limit};
  for (const auto& c : Search(d, p)) {
    EXPECT_EQ(c.quality_score, QualityScore(c.avg_profitability, c.matched_rows, q));
    EXPECT_EQ(c.avg_profitability,
              c.profitability_sum / static_cast<double>(c.matched_rows));
  }
}

TEST(ConfigSearch, RelaxedRankingIsASuperset) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const CampaignDataset d = RandomData(rng, 200, 3, 4);
    SearchParams p;
    p.limit = 30;
    const auto strict = Search(d, p);
    p.allow_below_limit = true;
    const auto relaxed = Search(d, p);
    for (const auto& c : strict) {
      EXPECT_NE(std::find(relaxed.begin(), relaxed.end(), c), relaxed.end());
    }
    if (!strict.empty()) {
      EXPECT_GE(relaxed[0].quality_score, strict[0].quality_score);
    }
  }
}

TEST(ConfigSearch, WorkerCountDoesNotChangeTheRanking) {
  std::mt19937_64 rng(12);
  const CampaignDataset d = RandomData(rng, 3000, 9, 4);
  SearchParams p;
  p.limit = 100;
  const auto one = Search(d, p);
  p.workers = 8;
  EXPECT_EQ(Search(d, p), one);
  std::ostringstream a, b;
  WriteRanking(a, one);
  WriteRanking(b, Search(d, p));
  EXPECT_EQ(a.str(), b.str());
}

TEST(ConfigSearch, SequentialRecoversDisjointSegments) {
  // Attribute 0: value 1 rows are very profitable, value 2 moderately, the
  // rest poor.
  std::vector<std::vector<AttributeValue>> values;
  std::vector<double> prof;
  for (int i = 0; i < 300; ++i) {
    const AttributeValue v = i < 50 ? 1 : (i < 100 ? 2 : 3 + i % 4);
    values.push_back({v, static_cast<AttributeValue>(i % 2)});
    prof.push_back(v == 1 ? 5.0 : (v == 2 ? 3.0 : 0.1));
  }
  const CampaignDataset d = testing::DatasetFromTable(values, prof);
  SearchParams p;
  p.limit = 40;
  const SequentialResult r = SearchSequential(d, p, 2);
  ASSERT_EQ(r.rounds.size(), 2u);
  EXPECT_FALSE(r.early_stop);
  EXPECT_EQ(r.rounds[0].best.config.ToString(), "cat1:1");
  EXPECT_EQ(r.rounds[0].rows_before, 300u);
  EXPECT_EQ(r.rounds[0].remaining_rows, 250u);
  EXPECT_EQ(r.rounds[1].best.config.ToString(), "cat1:2");
  EXPECT_EQ(r.rounds[1].remaining_rows, 200u);

  const SequentialResult one = SearchSequential(d, p, 1);
  p.top_k = 1;
  EXPECT_EQ(one.rounds.at(0).best, Search(d, p).at(0));
}

TEST(ConfigSearch, SequentialStopsEarlyAndShrinks) {
  std::mt19937_64 rng(14);
  const CampaignDataset d = RandomData(rng, 2000, 4, 5);
  SearchParams p;
  p.limit = 100;
  const SequentialResult r = SearchSequential(d, p, 30);
  ASSERT_FALSE(r.rounds.empty());
  EXPECT_TRUE(r.early_stop);
  EXPECT_LT(r.rounds.size(), 30u);
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    EXPECT_EQ(r.rounds[i].remaining_rows,
              r.rounds[i].rows_before - r.rounds[i].best.matched_rows);
    EXPECT_GE(r.rounds[i].best.matched_rows, 100u);
    if (i > 0) {
      EXPECT_EQ(r.rounds[i].rows_before, r.rounds[i - 1].remaining_rows);
    }
  }
}

TEST(ConfigSearch, RankingSerialization) {
  ScoredConfiguration c;
  c.config = Configuration::Parse("cat1:5,cat3:2");
  c.matched_rows = 40;
  c.profitability_sum = 50;
  c.avg_profitability = 1.25;
  c.quality_score = 25;
  c.elapsed_seconds = 0.5;
  std::ostringstream out;
  WriteRanking(out, {c});
  EXPECT_EQ(out.str(),
            "rank,avg_profitability,matched_rows,selected_columns,values,"
            "quality_score\n1,1.25,40,cat1;cat3,5;2,25\n");
  std::ostringstream timed;
  WriteRanking(timed, {c}, '\t', true);
  EXPECT_EQ(timed.str(),
            "rank\tavg_profitability\tmatched_rows\tselected_columns\tvalues\t"
            "elapsed_seconds\tquality_score\n1\t1.25\t40\tcat1;cat3\t5;2\t0.5\t25\n");
  const auto json = RankingToJson({c});
  ASSERT_EQ(json.size(), 1u);
  EXPECT_EQ(json[0]["matched_rows"], 40);
}

TEST(ConfigSearch, ParameterValidation) {
  std::mt19937_64 rng(3);
  const CampaignDataset d = RandomData(rng, 10, 3, 2);
  SearchParams p;
  p.limit = 0;
  EXPECT_THROW(Search(d, p), ArgumentError);
  p.limit = 1;
  p.workers = 0;
  EXPECT_THROW(Search(d, p), ArgumentError);
  EXPECT_EQ(ParsePruningMode("rejected-set"), PruningMode::kRejectedSet);
  EXPECT_THROW(ParsePruningMode("fast"), ArgumentError);
}

}  // namespace
}  // namespace rtbconf
