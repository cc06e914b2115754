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

// Reading and writing impression logs in the Criteo attribution layout.
//
// Input files are comma- or tab-separated (detected from the header line)
// and columns are matched by header name, so their order is free. Only
// timestamp, campaign, conversion, cost and cat1..catN are required; cvr and
// profitability are read back when present so a scored file can be searched
// directly.

#ifndef RTBCONF_DATA_IO_H_
#define RTBCONF_DATA_IO_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtbconf/dataset.h"

namespace rtbconf {

struct LogSchema {
  std::string timestamp = "timestamp";
  std::string campaign = "campaign";
  std::string conversion = "conversion";
  std::string cost = "cost";
  std::string click = "click";
  std::string cpo = "cpo";
  std::string cvr = "cvr";
  std::string profitability = "profitability";
  std::string categorical_prefix = "cat";
  int n_attributes = kDefaultAttributes;

  std::string categorical(int attribute) const {
    return categorical_prefix + std::to_string(attribute + 1);
  }
};

struct RowIssue {
  std::size_t line = 0;  // 1-based physical line (header is line 1)
  std::string message;
};

struct LoadReport {
  std::size_t data_rows = 0;         // rows seen after the header
  std::size_t rejected_missing = 0;  // a categorical cell was empty
  std::size_t rejected_malformed = 0;
  std::vector<RowIssue> issues;      // first kMaxReportedIssues only

  static constexpr std::size_t kMaxReportedIssues = 100;
  std::size_t rejected() const { return rejected_missing + rejected_malformed; }
};

struct LoadResult {
  CampaignDataset dataset;
  LoadReport report;
};

// Malformed rows are collected and skipped; if more than 1% of the data rows
// are malformed a DataError is thrown. Numeric overflow (out-of-range or
// non-finite numbers) is always fatal. Missing columns raise SchemaError.
LoadResult ReadLog(std::istream& in, const LogSchema& schema = {});
LoadResult LoadLog(const std::filesystem::path& path,
                   const LogSchema& schema = {});

// Writes the same layout, with cvr and profitability appended when the
// dataset carries them (6 significant digits; empty cell when absent).
void WriteLog(std::ostream& out, const CampaignDataset& d,
              char delimiter = ',');
void SaveLog(const std::filesystem::path& path, const CampaignDataset& d,
             char delimiter = ',');

}  // namespace rtbconf

#endif  // RTBCONF_DATA_IO_H_
