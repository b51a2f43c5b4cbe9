// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pace/dataio.hpp"
#include "pace/pace_ggm.hpp"

namespace pace {

enum class EstimatorKind { kPaceGgm, kSsp, kDiagonal };

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(std::string_view name);

std::string solver_name(SolverKind kind);
SolverKind solver_from_name(std::string_view name);

struct SyntheticSpec {
  int d = 8;
  std::int64_t n = 1000;
  double corr = 0.0;
};

/// Sweep configuration: one dataset, a grid of budgets and estimators, and a
/// trial count. Serializable to/from JSON (see from_json_text).
struct ExperimentConfig {
  std::string dataset_path;  // empty when synthetic is set
  std::optional<SyntheticSpec> synthetic;
  std::uint64_t synthetic_seed = 90210;
  CsvOptions csv;

  std::vector<double> rhos = {0.01};
  std::vector<EstimatorKind> estimators = {EstimatorKind::kPaceGgm,
                                           EstimatorKind::kSsp,
                                           EstimatorKind::kDiagonal};
  int trials = 10;
  std::uint64_t base_seed = 0;
  double alpha = 0.3;
  double beta = 0.5;
  int max_rounds = -1;
  SolverKind solver = SolverKind::kIpm;
  bool use_components = true;
  std::string output_path;  // empty: keep records in memory only
  int jobs = 1;

  void validate() const;
  static ExperimentConfig from_json_text(std::string_view text);
  static ExperimentConfig from_json_file(const std::string& path);
};

/// One (estimator, rho, trial) outcome. Measurement counts and round counts
/// are present only for the adaptive estimator (-1 otherwise).
struct TrialRecord {
  std::string dataset;
  std::string estimator;
  double rho = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double frobenius = 0.0;
  double mahalanobis = 0.0;
  int diag_count = -1;
  int offdiag_count = -1;
  int rounds = -1;
  double wall_seconds = 0.0;
  int solver_flags = 0;
  std::string error;  // nonempty when the trial failed

  std::string key() const;  // "estimator|rho|trial"
  std::string to_json() const;
  static TrialRecord from_json(std::string_view line);
};

/// Stable per-trial seed: base_seed XOR a 64-bit hash of
/// "estimator|rho|trial", so extending the estimator or budget grid never
/// perturbs existing trials.
std::uint64_t derive_trial_seed(std::uint64_t base_seed,
                                std::string_view estimator, double rho,
                                int trial);

/// Runs the sweep. When output_path is set, records append to it as
/// JSON-lines and (estimator, rho, trial) keys already present are skipped,
/// so an interrupted sweep resumes where it stopped. Records are emitted in
/// deterministic config order regardless of the worker count.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                        std::ostream* progress = nullptr);

struct SummaryRow {
  std::string dataset;
  std::string estimator;
  double rho = 0.0;
  int trials = 0;
  double frobenius_mean = 0.0;
  std::optional<double> frobenius_stderr;
  double frobenius_median = 0.0;
  double mahalanobis_mean = 0.0;
  std::optional<double> mahalanobis_stderr;
  double mahalanobis_median = 0.0;
  std::string measurements;  // "d + offdiag" for the adaptive estimator
  double rounds_mean = 0.0;
  double wall_seconds_mean = 0.0;
};

/// Per (estimator, rho) aggregation: mean, sample standard error, median.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// Plot-ready CSV with one row per (estimator, rho).
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

std::vector<TrialRecord> read_jsonl(const std::string& path);

/// Loads the configured dataset (file or synthetic).
Dataset load_dataset(const ExperimentConfig& config);

}  // namespace pace
