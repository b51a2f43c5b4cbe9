// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pace/errors.hpp"
#include "pace/rng.hpp"

namespace pace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one logical CSV record into fields, honoring quotes. `pos` points
// into `text` and is advanced past the record (and its newline).
std::vector<std::string> next_record(std::string_view text, std::size_t& pos,
                                     char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++pos;
      break;
    } else if (c != '\r') {
      field += c;
    }
    ++pos;
  }
  fields.push_back(std::move(field));
  return fields;
}

std::optional<double> parse_cell(std::string_view raw,
                                 const CsvOptions& options, int row, int col) {
  std::string_view cell = trim(raw);
  for (const std::string& token : options.missing_tokens) {
    if (cell == token) return std::nullopt;
  }
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric cell at row " + std::to_string(row) +
                    ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

RawTable parse_csv(std::string_view text, const CsvOptions& options) {
  RawTable table;
  std::size_t pos = 0;
  int data_row = 0;
  bool first = true;
  while (pos < text.size()) {
    std::vector<std::string> fields = next_record(text, pos, options.delimiter);
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;

    if (first) {
      first = false;
      if (options.header) {
        for (std::string& f : fields) {
          table.column_names.push_back(std::string(trim(f)));
        }
        continue;
      }
      for (std::size_t c = 0; c < fields.size(); ++c) {
        table.column_names.push_back("x" + std::to_string(c));
      }
    }
    ++data_row;
    if (fields.size() != table.column_names.size()) {
      throw DataError("row " + std::to_string(data_row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(table.column_names.size()));
    }
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto cell = parse_cell(fields[c], options, data_row,
                             static_cast<int>(c) + 1);
      if (!cell.has_value()) ++table.missing_cells;
      row.push_back(cell);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RawTable load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options);
}

Dataset preprocess(const RawTable& table, const std::string& name) {
  const std::size_t cols = table.column_names.size();

  // Drop rows with any missing value.
  std::vector<const std::vector<std::optional<double>>*> kept;
  for (const auto& row : table.rows) {
    const bool complete =
        std::all_of(row.begin(), row.end(),
                    [](const auto& cell) { return cell.has_value(); });
    if (complete) kept.push_back(&row);
  }
  if (kept.empty()) {
    throw DataError("preprocess: no complete rows in dataset");
  }

  Dataset ds;
  ds.name = name;
  ds.rows_dropped = static_cast<int>(table.rows.size() - kept.size());

  // Column ranges; constant columns are dropped.
  std::vector<std::size_t> active;
  std::vector<double> lo(cols, std::numeric_limits<double>::infinity());
  std::vector<double> hi(cols, -std::numeric_limits<double>::infinity());
  for (const auto* row : kept) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = (*row)[c].value();
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (hi[c] - lo[c] > 0.0) {
      active.push_back(c);
    } else {
      ds.columns_dropped.push_back(table.column_names[c]);
    }
  }
  if (active.empty()) {
    throw DataError("preprocess: all columns are constant");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto d = static_cast<Eigen::Index>(active.size());
  ds.X.resize(n, d);
  ds.transforms.resize(active.size());
  for (Eigen::Index cc = 0; cc < d; ++cc) {
    const std::size_t c = active[cc];
    ColumnTransform& tf = ds.transforms[cc];
    tf.name = table.column_names[c];
    tf.offset = lo[c];
    tf.scale = 2.0 / (hi[c] - lo[c]);
    ds.column_names.push_back(tf.name);
    for (Eigen::Index r = 0; r < n; ++r) {
      ds.X(r, cc) = ((*kept[r])[c].value() - tf.offset) * tf.scale - 1.0;
    }
    const double mean = ds.X.col(cc).mean();
    tf.mean = mean;
    ds.X.col(cc).array() -= mean;
  }

  // Centering can push entries past [-1, 1]; the effective bound is what the
  // sensitivity calibration must see.
  ds.bound = std::max(ds.X.cwiseAbs().maxCoeff(), 1e-12);
  return ds;
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& X) {
  if (X.rows() < 1) {
    throw DataError("second_moment: empty data matrix");
  }
  Eigen::MatrixXd sigma = X.transpose() * X / static_cast<double>(X.rows());
  sigma = 0.5 * (sigma + sigma.transpose());
  return sigma;
}

Dataset synth_ar1(int d, std::int64_t n, double corr, std::uint64_t seed) {
  if (d < 1 || n < 1) {
    throw DataError("synth_ar1: d and n must be positive");
  }
  if (!(corr > -1.0 && corr < 1.0)) {
    throw DataError("synth_ar1: corr must be in (-1, 1)");
  }

  Eigen::MatrixXd cov(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      cov(j, k) = std::pow(corr, std::abs(j - k));
    }
  }
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

  RngStream rng(seed);
  Dataset ds;
  {
    std::ostringstream label;
    label << "synth_ar1(d=" << d << ",n=" << n << ",corr=" << corr << ")";
    ds.name = label.str();
  }
  ds.X.resize(n, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) z[c] = rng.normal();
    // Marginal standard deviation is 1; three of them map onto the bound.
    ds.X.row(r) = (chol * z / 3.0)
                      .cwiseMin(1.0)
                      .cwiseMax(-1.0)
                      .transpose();
  }
  ds.bound = 1.0;
  for (int c = 0; c < d; ++c) {
    ds.column_names.push_back("x" + std::to_string(c));
  }
  return ds;
}

}  // namespace pace
