// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stam/core/error.hpp"

namespace stam {

/// Names the roles of a CSV's columns. `inputs` empty means every retained
/// column is a model input (the target included — the pollution setup, where
/// the predicted variable is also observed history). Synthetic fixtures list
/// the driver columns explicitly to keep the target out of the inputs.
struct CsvSchema {
  std::string target;
  std::vector<std::string> categoricals;
  std::vector<std::string> inputs;  // empty -> all retained columns
  std::vector<std::string> drop;    // columns ignored entirely (ids, timestamps)
  char delimiter = ',';
  std::vector<std::string> na_tokens = {"", "NA", "NaN", "nan"};
};

/// Time-ordered numeric table after ingestion: categoricals are integer
/// codes, missing values are resolved, row order is exactly file order.
struct RawSeries {
  std::vector<std::string> columns;
  int n_rows = 0, n_cols = 0;
  std::vector<double> data;  // row-major n_rows x n_cols
  int target_col = -1;
  std::vector<int> input_cols;
  // per categorical column: category names in first-appearance (= code) order
  std::map<std::string, std::vector<std::string>> category_maps;

  double at(int r, int c) const { return data[static_cast<size_t>(r) * n_cols + c]; }
  double& at(int r, int c) { return data[static_cast<size_t>(r) * n_cols + c]; }

  int column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DataError("unknown column '" + name + "'");
    return static_cast<int>(it - columns.begin());
  }

  /// Contiguous row range [first, first+count) as a new series.
  RawSeries slice_rows(int first, int count) const {
    RawSeries out = *this;
    out.n_rows = count;
    out.data.assign(data.begin() + static_cast<int64_t>(first) * n_cols,
                    data.begin() + (static_cast<int64_t>(first) + count) * n_cols);
    return out;
  }
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == delim) cells.push_back("");
  return cells;
}

}  // namespace detail

/// Reads a CSV into a RawSeries, deterministically given file + schema:
/// categoricals are coded by first appearance, leading rows with a missing
/// target are dropped (the pollution file opens with an NA block), remaining
/// gaps are forward-filled from the last seen value.
inline RawSeries load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("load_csv: '" + path + "' is empty");
  const std::vector<std::string> header = detail::split_line(line, schema.delimiter);

  auto in_list = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& name : schema.drop)
    if (!in_list(header, name)) throw DataError("load_csv: drop column '" + name + "' not in file");
  for (const auto& name : schema.categoricals)
    if (!in_list(header, name))
      throw DataError("load_csv: categorical column '" + name + "' not in file");
  if (!in_list(header, schema.target))
    throw DataError("load_csv: target column '" + schema.target + "' not in file");

  RawSeries out;
  std::vector<int> keep;  // retained source column indices
  for (size_t c = 0; c < header.size(); ++c) {
    if (in_list(schema.drop, header[c])) continue;
    keep.push_back(static_cast<int>(c));
    out.columns.push_back(header[c]);
  }
  out.n_cols = static_cast<int>(keep.size());
  out.target_col = out.column_index(schema.target);

  std::vector<bool> is_cat(out.columns.size(), false);
  std::vector<std::map<std::string, int>> codes(out.columns.size());
  for (size_t c = 0; c < out.columns.size(); ++c)
    if (in_list(schema.categoricals, out.columns[c])) is_cat[c] = true;

  constexpr double kNa = std::numeric_limits<double>::quiet_NaN();
  int file_row = 1;
  while (std::getline(in, line)) {
    ++file_row;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto cells = detail::split_line(line, schema.delimiter);
    if (cells.size() != header.size())
      throw DataError("load_csv: row " + std::to_string(file_row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    for (size_t k = 0; k < keep.size(); ++k) {
      const std::string& cell = cells[static_cast<size_t>(keep[k])];
      if (in_list(schema.na_tokens, cell)) {
        out.data.push_back(kNa);
        continue;
      }
      if (is_cat[k]) {
        auto [it, inserted] = codes[k].emplace(cell, static_cast<int>(codes[k].size()));
        if (inserted) out.category_maps[out.columns[k]].push_back(cell);
        out.data.push_back(static_cast<double>(it->second));
      } else {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
          throw DataError("load_csv: unparseable cell '" + cell + "' at row " +
                          std::to_string(file_row) + ", column '" + out.columns[k] + "'");
        out.data.push_back(v);
      }
    }
    ++out.n_rows;
  }
  if (out.n_rows == 0) throw DataError("load_csv: '" + path + "' has no data rows");

  // trim leading rows with missing target
  int first = 0;
  while (first < out.n_rows && std::isnan(out.at(first, out.target_col))) ++first;
  if (first == out.n_rows)
    throw DataError("load_csv: target column '" + schema.target + "' is entirely missing");
  if (first > 0) out = out.slice_rows(first, out.n_rows - first);

  // forward-fill interior gaps
  for (int c = 0; c < out.n_cols; ++c) {
    if (std::isnan(out.at(0, c)))
      throw DataError("load_csv: column '" + out.columns[static_cast<size_t>(c)] +
                      "' starts with a missing value after target head-trim; cannot forward-fill");
    for (int r = 1; r < out.n_rows; ++r)
      if (std::isnan(out.at(r, c))) out.at(r, c) = out.at(r - 1, c);
  }

  if (schema.inputs.empty()) {
    for (int c = 0; c < out.n_cols; ++c) out.input_cols.push_back(c);
  } else {
    for (const auto& name : schema.inputs) out.input_cols.push_back(out.column_index(name));
  }
  return out;
}

/// Contiguous chronological split, no shuffling. Boundaries floor-round and
/// the remainder goes to the last (test) segment, so the final test row is
/// always the final file row.
struct SplitSeries {
  RawSeries train, val, test;
};

inline SplitSeries split_chronological(const RawSeries& series,
                                       const std::array<double, 3>& fractions = {0.6, 0.2, 0.2}) {
  double sum = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) throw DataError("split_chronological: fractions must be positive");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw DataError("split_chronological: fractions sum to " + std::to_string(sum) + ", not 1");
  const int n = series.n_rows;
  const int n_train = static_cast<int>(std::floor(n * fractions[0]));
  const int n_val = static_cast<int>(std::floor(n * fractions[1]));
  const int n_test = n - n_train - n_val;
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw DataError("split_chronological: " + std::to_string(n) + " rows is too short to split");
  SplitSeries out;
  out.train = series.slice_rows(0, n_train);
  out.val = series.slice_rows(n_train, n_val);
  out.test = series.slice_rows(n_train + n_val, n_test);
  return out;
}

}  // namespace stam
