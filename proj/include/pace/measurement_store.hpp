// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pace {

/// Canonical matrix-entry key with j >= k (indices are 0-based).
struct PairKey {
  int j = 0;
  int k = 0;

  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

inline PairKey canonical_pair(int j, int k) {
  return j >= k ? PairKey{j, k} : PairKey{k, j};
}

struct RawMeasurement {
  int j = 0;
  int k = 0;
  double z = 0.0;
  double sigma2 = 0.0;
};

/// Precision-weighted state of one entry: y is the inverse-variance weighted
/// mean of all observations, lambda the combined precision (sum of 1/sigma^2).
struct PairEstimate {
  double y = 0.0;
  double lambda = 0.0;
};

/// Sparse store of noisy second-moment observations. Entries are keyed by
/// canonical pair; lambda > 0 exactly for the measured pairs, which form the
/// measurement graph S.
class MeasurementStore {
 public:
  explicit MeasurementStore(int dim, bool keep_raw_log = true);

  int dim() const { return dim_; }

  /// Folds one observation z with noise variance sigma2 into the entry (j, k):
  ///   y <- (lambda y + z / sigma2) / (lambda + 1 / sigma2)
  ///   lambda <- lambda + 1 / sigma2
  void record(int j, int k, double z, double sigma2);

  bool measured(int j, int k) const;

  /// Current (y, lambda) for the entry; {0, 0} when never measured.
  PairEstimate at(int j, int k) const;

  /// Canonical pairs with lambda > 0, sorted.
  std::vector<PairKey> support() const;

  /// Number of measured diagonal / off-diagonal entries.
  int diagonal_count() const;
  int offdiagonal_count() const;

  /// Partition of {0..d-1} under the graph with one edge per measured
  /// off-diagonal pair; diagonal entries add no edges. Components and their
  /// members are sorted.
  std::vector<std::vector<int>> connected_components() const;

  const std::vector<RawMeasurement>& raw_log() const { return raw_log_; }
  bool keeps_raw_log() const { return keep_raw_log_; }

  const std::map<std::pair<int, int>, PairEstimate>& entries() const {
    return entries_;
  }

  /// JSON document with the measured pairs and their (y, lambda), for audit
  /// output. Schema: {"d": d, "pairs": [{"j", "k", "y", "lambda"}, ...]}.
  std::string to_json() const;

 private:
  int dim_;
  bool keep_raw_log_;
  std::map<std::pair<int, int>, PairEstimate> entries_;
  std::vector<RawMeasurement> raw_log_;
};

}  // namespace pace
