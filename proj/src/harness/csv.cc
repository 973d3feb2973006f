// Copyright 2026 The psu-align Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <sstream>

#include "psu/error.h"
#include "psu/harness.h"

namespace psu {

CsvTable ParseCsv(std::string_view text, char delimiter, bool has_header) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  PSU_ENFORCE(!quoted, ErrorCode::kDatasetError,
              "unterminated quoted field near line " + std::to_string(line));
  if (field_started || !field.empty() || !record.empty()) end_record();

  CsvTable table;
  size_t first = 0;
  if (has_header) {
    PSU_ENFORCE(!records.empty(), ErrorCode::kDatasetError,
                "file has no header row");
    table.header = std::move(records[0]);
    first = 1;
  }
  for (size_t i = first; i < records.size(); ++i) {
    // A lone empty field is a blank line.
    if (records[i].size() == 1 && records[i][0].empty()) continue;
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

CsvTable ReadCsv(const fs::path& path, char delimiter, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  PSU_ENFORCE(in.good(), ErrorCode::kDatasetError,
              "cannot read dataset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseCsv(buf.str(), delimiter, has_header);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDatasetError, path.string() + ": " + e.what());
  }
}

namespace {

void AppendField(std::string& out, const std::string& field, char delimiter) {
  bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                      std::string::npos;
  if (!needs_quotes) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void AppendRecord(std::string& out, const std::vector<std::string>& record,
                  char delimiter) {
  for (size_t i = 0; i < record.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    AppendField(out, record[i], delimiter);
  }
  out.push_back('\n');
}

}  // namespace

std::string FormatCsv(const CsvTable& table, char delimiter) {
  std::string out;
  if (!table.header.empty()) AppendRecord(out, table.header, delimiter);
  for (const auto& row : table.rows) AppendRecord(out, row, delimiter);
  return out;
}

void WriteCsv(const fs::path& path, const CsvTable& table, char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  PSU_ENFORCE(out.good(), ErrorCode::kConfigError,
              "cannot write " + path.string());
  out << FormatCsv(table, delimiter);
}

std::vector<std::vector<std::string>> ProjectIdentifiers(
    const CsvTable& table, const DatasetSpec& spec) {
  std::vector<size_t> columns;
  for (const auto& name : spec.id_columns) {
    if (spec.has_header) {
      auto it = std::find(table.header.begin(), table.header.end(), name);
      PSU_ENFORCE(it != table.header.end(), ErrorCode::kDatasetError,
                  spec.path.string() + " has no column '" + name + "'");
      columns.push_back(static_cast<size_t>(it - table.header.begin()));
    } else {
      size_t pos = 0;
      size_t value = 0;
      try {
        value = std::stoul(name, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      PSU_ENFORCE(pos == name.size() && pos > 0, ErrorCode::kDatasetError,
                  spec.path.string() + " has no header, so column '" + name +
                      "' must be a 0-based number");
      columns.push_back(value);
    }
  }
  std::vector<std::vector<std::string>> out;
  out.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<std::string> ids;
    for (size_t c = 0; c < columns.size(); ++c) {
      PSU_ENFORCE(columns[c] < row.size(), ErrorCode::kDatasetError,
                  spec.path.string() + " row " + std::to_string(r + 1) +
                      " lacks column '" + spec.id_columns[c] + "'");
      ids.push_back(row[columns[c]]);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace psu
