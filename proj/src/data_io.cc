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

#include "rtbconf/data_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "rtbconf/errors.h"
#include "rtbconf/text_format.h"

namespace rtbconf {
namespace {

enum class CellStatus { kOk, kEmpty, kMalformed, kOverflow };

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
CellStatus ParseCell(std::string_view cell, T& out) {
  cell = Trim(cell);
  if (cell.empty()) return CellStatus::kEmpty;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc::result_out_of_range) return CellStatus::kOverflow;
  if (ec != std::errc{} || ptr != last) return CellStatus::kMalformed;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) return CellStatus::kOverflow;
  }
  return CellStatus::kOk;
}

void SplitInto(std::string_view line, char delimiter,
               std::vector<std::string_view>& cells) {
  cells.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Column positions resolved from the header; -1 when an optional column is
// absent.
struct ColumnMap {
  int timestamp = -1;
  int campaign = -1;
  int conversion = -1;
  int cost = -1;
  int click = -1;
  int cpo = -1;
  int cvr = -1;
  int profitability = -1;
  std::vector<int> categorical;
  std::size_t width = 0;
};

ColumnMap ResolveColumns(const std::vector<std::string_view>& header,
                         const LogSchema& schema) {
  std::unordered_map<std::string, int> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    position.emplace(std::string(Trim(header[i])), static_cast<int>(i));
  }
  auto find = [&](const std::string& name, bool required) {
    const auto it = position.find(name);
    if (it == position.end()) {
      if (required) throw SchemaError(name);
      return -1;
    }
    return it->second;
  };
  ColumnMap m;
  m.width = header.size();
  m.timestamp = find(schema.timestamp, true);
  m.campaign = find(schema.campaign, true);
  m.conversion = find(schema.conversion, true);
  m.cost = find(schema.cost, true);
  for (int a = 0; a < schema.n_attributes; ++a) {
    m.categorical.push_back(find(schema.categorical(a), true));
  }
  m.click = find(schema.click, false);
  m.cpo = find(schema.cpo, false);
  m.cvr = find(schema.cvr, false);
  m.profitability = find(schema.profitability, false);
  return m;
}

enum class RowOutcome { kAccepted, kMissing, kMalformed };

// Six significant digits, unless rounding would push the probability onto
// 0 or 1 (which the reader rejects).
std::string FormatProbability(double p) {
  std::string text = FormatSignificant(p, 6);
  double back = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), back);
  if (!(back > 0.0 && back < 1.0)) text = FormatShortest(p);
  return text;
}

}  // namespace

LoadResult ReadLog(std::istream& in, const LogSchema& schema) {
  if (schema.n_attributes < 1 || schema.n_attributes > kMaxAttributes) {
    throw ArgumentError("schema n_attributes must be in [1, 9]");
  }
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: no header line");
  const char delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string_view> cells;
  SplitInto(line, delimiter, cells);
  const ColumnMap columns = ResolveColumns(cells, schema);

  LoadResult result;
  LoadReport& report = result.report;
  CampaignDataset::Builder builder(schema.n_attributes);
  ImpressionRecord record;
  record.attributes.resize(static_cast<std::size_t>(schema.n_attributes));
  std::size_t line_no = 1;

  auto note = [&](std::string message) {
    if (report.issues.size() < LoadReport::kMaxReportedIssues) {
      report.issues.push_back({line_no, std::move(message)});
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    ++report.data_rows;
    SplitInto(line, delimiter, cells);

    auto parse_row = [&]() -> RowOutcome {
      if (cells.size() != columns.width) {
        note("expected " + std::to_string(columns.width) + " cells, found " +
             std::to_string(cells.size()));
        return RowOutcome::kMalformed;
      }
      // Required numeric cell: empty or unparseable -> malformed row,
      // overflow -> fatal.
      auto required = [&](int column, const std::string& name, auto& out) {
        switch (ParseCell(cells[static_cast<std::size_t>(column)], out)) {
          case CellStatus::kOk:
            return true;
          case CellStatus::kOverflow:
            throw DataError("numeric overflow in column '" + name + "'",
                            line_no);
          default:
            note("unparseable value in column '" + name + "'");
            return false;
        }
      };
      // Optional numeric cell: empty -> nullopt.
      auto optional = [&](int column, const std::string& name,
                          std::optional<double>& out) {
        out.reset();
        if (column < 0) return true;
        double v = 0.0;
        switch (ParseCell(cells[static_cast<std::size_t>(column)], v)) {
          case CellStatus::kOk:
            out = v;
            return true;
          case CellStatus::kEmpty:
            return true;
          case CellStatus::kOverflow:
            throw DataError("numeric overflow in column '" + name + "'",
                            line_no);
          default:
            note("unparseable value in column '" + name + "'");
            return false;
        }
      };

      for (int a = 0; a < schema.n_attributes; ++a) {
        const auto cell = Trim(
            cells[static_cast<std::size_t>(columns.categorical[a])]);
        if (cell.empty()) {
          note("missing value in column '" + schema.categorical(a) + "'");
          return RowOutcome::kMissing;
        }
      }
      std::int64_t conversion = 0;
      if (!required(columns.timestamp, schema.timestamp, record.timestamp) ||
          !required(columns.campaign, schema.campaign, record.campaign_id) ||
          !required(columns.conversion, schema.conversion, conversion) ||
          !required(columns.cost, schema.cost, record.cost)) {
        return RowOutcome::kMalformed;
      }
      for (int a = 0; a < schema.n_attributes; ++a) {
        if (!required(columns.categorical[static_cast<std::size_t>(a)],
                      schema.categorical(a),
                      record.attributes[static_cast<std::size_t>(a)])) {
          return RowOutcome::kMalformed;
        }
      }
      record.click = 0;
      if (columns.click >= 0) {
        std::int64_t click = 0;
        const auto status =
            ParseCell(cells[static_cast<std::size_t>(columns.click)], click);
        if (status == CellStatus::kOverflow) {
          throw DataError("numeric overflow in column '" + schema.click + "'",
                          line_no);
        }
        if (status == CellStatus::kMalformed || (click != 0 && click != 1)) {
          note("click must be 0 or 1");
          return RowOutcome::kMalformed;
        }
        record.click = static_cast<int>(click);
      }
      if (!optional(columns.cpo, schema.cpo, record.cpo) ||
          !optional(columns.cvr, schema.cvr, record.cvr) ||
          !optional(columns.profitability, schema.profitability,
                    record.profitability)) {
        return RowOutcome::kMalformed;
      }
      if (conversion != 0 && conversion != 1) {
        note("conversion must be 0 or 1");
        return RowOutcome::kMalformed;
      }
      record.conversion = static_cast<int>(conversion);
      if (record.timestamp < 0) {
        note("negative timestamp");
        return RowOutcome::kMalformed;
      }
      if (record.cvr && !(*record.cvr > 0.0 && *record.cvr < 1.0)) {
        note("cvr outside (0,1)");
        return RowOutcome::kMalformed;
      }
      if (record.profitability && *record.profitability < 0.0) {
        note("negative profitability");
        return RowOutcome::kMalformed;
      }
      return RowOutcome::kAccepted;
    };

    switch (parse_row()) {
      case RowOutcome::kAccepted:
        builder.Add(record, line_no);
        break;
      case RowOutcome::kMissing:
        ++report.rejected_missing;
        break;
      case RowOutcome::kMalformed:
        ++report.rejected_malformed;
        break;
    }
  }

  if (report.rejected_malformed * 100 > report.data_rows) {
    const std::string first =
        report.issues.empty()
            ? std::string()
            : "; first: line " + std::to_string(report.issues.front().line) +
                  ": " + report.issues.front().message;
    throw DataError("too many malformed rows: " +
                    std::to_string(report.rejected_malformed) + " of " +
                    std::to_string(report.data_rows) + " (limit 1%)" + first);
  }
  result.dataset = std::move(builder).Build();
  return result;
}

LoadResult LoadLog(const std::filesystem::path& path,
                   const LogSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return ReadLog(in, schema);
}

void WriteLog(std::ostream& out, const CampaignDataset& d, char delimiter) {
  const LogSchema schema;
  const int n_attributes = d.n_attributes();
  std::string row;
  auto cell = [&](std::string_view text) {
    if (!row.empty()) row += delimiter;
    row += text;
  };

  cell(schema.timestamp);
  cell(schema.campaign);
  cell(schema.conversion);
  cell(schema.click);
  cell(schema.cost);
  cell(schema.cpo);
  for (int a = 0; a < n_attributes; ++a) cell(schema.categorical(a));
  if (d.has_cvr()) cell(schema.cvr);
  if (d.has_profitability()) cell(schema.profitability);
  out << row << '\n';

  for (std::size_t i = 0; i < d.rows(); ++i) {
    row.clear();
    cell(std::to_string(d.timestamps()[i]));
    cell(std::to_string(d.campaign_ids()[i]));
    cell(std::to_string(d.conversions()[i]));
    cell(std::to_string(d.clicks()[i]));
    cell(FormatShortest(d.costs()[i]));
    cell(std::isnan(d.cpo()[i]) ? std::string() : FormatShortest(d.cpo()[i]));
    for (int a = 0; a < n_attributes; ++a) {
      cell(std::to_string(d.value(i, a)));
    }
    if (d.has_cvr()) {
      const double v = d.cvr()[i];
      cell(std::isnan(v) ? std::string() : FormatProbability(v));
    }
    if (d.has_profitability()) {
      const double v = d.profitability()[i];
      cell(std::isnan(v) ? std::string() : FormatSignificant(v, 6));
    }
    out << row << '\n';
  }
}

void SaveLog(const std::filesystem::path& path, const CampaignDataset& d,
             char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  WriteLog(out, d, delimiter);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace rtbconf
