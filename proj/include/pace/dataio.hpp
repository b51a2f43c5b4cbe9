// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pace {

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  std::vector<std::string> missing_tokens = {"", "NA", "NaN", "nan", "?"};
};

/// Parsed numeric table; missing cells are empty optionals.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::optional<double>>> rows;
  int missing_cells = 0;
};

/// Parses an RFC-4180-style CSV file (quoted fields, configurable delimiter).
/// Non-numeric cells that are not missing tokens raise DataError naming the
/// 1-based row and column.
RawTable load_csv(const std::string& path, const CsvOptions& options = {});
RawTable parse_csv(std::string_view text, const CsvOptions& options = {});

/// Per-column preprocessing provenance: x' = (x - offset) * scale - mean.
struct ColumnTransform {
  std::string name;
  double offset = 0.0;
  double scale = 1.0;
  double mean = 0.0;
};

struct Dataset {
  std::string name;
  Eigen::MatrixXd X;  // n x d
  std::vector<std::string> column_names;
  /// Coordinate-wise bound honored by X. Rescaling maps each column into
  /// [-1, 1]; mean-centering can push entries slightly past that, so the
  /// bound is recomputed as the post-centering max absolute entry (<= 2).
  double bound = 1.0;
  std::vector<ColumnTransform> transforms;
  int rows_dropped = 0;
  std::vector<std::string> columns_dropped;
};

/// Drops rows with missing values, affinely maps each column from
/// [min, max] onto [-1, 1], drops constant columns, then centers each column
/// by its empirical mean (treated as public). The min/max/mean used are
/// recorded as provenance and are not privatized.
Dataset preprocess(const RawTable& table, const std::string& name = "dataset");

/// Empirical second-moment matrix X^T X / n (symmetrized).
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& X);

/// Synthetic AR(1) dataset: n rows of a zero-mean Gaussian with covariance
/// corr^|j-k|, columns scaled by 1/3 (three standard deviations map to the
/// bound) and clipped to [-1, 1], so clipping is rare. bound = 1.
Dataset synth_ar1(int d, std::int64_t n, double corr, std::uint64_t seed);

}  // namespace pace
