// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pace/measurement_store.hpp"
#include "pace/privacy.hpp"
#include "pace/reconstruction.hpp"
#include "pace/rng.hpp"

namespace pace {

enum class SolverKind { kIpm, kPgdZeros, kPgdOnes };

/// Parameters of one adaptive estimation run.
struct PaceConfig {
  double rho = 1.0;    // total zCDP budget
  double bound = 1.0;  // coordinate-wise bound B
  double alpha = 0.3;  // fraction of rho spent on diagonal initialization
  double beta = 0.5;   // fraction of each round spent on selection
  int max_rounds = -1;  // <0: d(d-1)
  std::uint64_t seed = 0;
  int anneal_cap = 60;  // max number of budget doublings
  SolverKind solver = SolverKind::kIpm;
  bool use_components = true;
  IpmSchedule ipm;
  PgdOptions pgd;
  bool keep_raw_log = false;

  void validate() const;
};

struct RoundRecord {
  int t = 0;
  int j = 0;
  int k = 0;
  double sigma_t = 0.0;
  double rho_sel = 0.0;
  double rho_meas = 0.0;
  bool annealed = false;
  bool solver_flag = false;
  double wall_seconds = 0.0;
};

struct PaceResult {
  Eigen::MatrixXd sigma_hat;
  int rounds = 0;
  double rho_used = 0.0;
  double rho_diag = 0.0;
  std::vector<RoundRecord> round_log;
  int diagonal_measurements = 0;     // distinct diagonal entries measured
  int offdiagonal_measurements = 0;  // distinct off-diagonal entries measured
  int clipped_entries = 0;
  int solver_warnings = 0;
};

/// Phase 1: measures every diagonal entry once with per-entry budget
/// alpha * rho / d, populates the store, and returns the clamped diagonal
/// initial estimate diag(max(y_jj, 0)). The raw draws, clamped or not, stay
/// in the store. `delta` is the per-entry sensitivity.
std::pair<MeasurementStore, Eigen::MatrixXd> initialize_diagonal(
    const Eigen::MatrixXd& second_moment, double delta,
    const PaceConfig& config, BudgetLedger& ledger, RngStream& rng);

/// Selection step: samples a canonical pair with the exponential mechanism,
/// scoring each candidate by |second_moment_jk - sigma_prev_jk|. All
/// canonical pairs, including diagonals, are candidates.
PairKey select_entry(const Eigen::MatrixXd& second_moment,
                     const Eigen::MatrixXd& sigma_prev, double delta,
                     double rho_sel, BudgetLedger& ledger, RngStream& rng);

/// Measurement step: Gaussian mechanism on one entry with budget rho_meas;
/// the draw is folded into the store. Returns (z, sigma_t).
std::pair<double, double> measure_entry(const Eigen::MatrixXd& second_moment,
                                        PairKey pair, double delta,
                                        double rho_meas,
                                        MeasurementStore& store,
                                        BudgetLedger& ledger, RngStream& rng);

/// Mutable budget state threaded through the annealing rule.
struct AnnealState {
  double rho_sel = 0.0;
  double rho_meas = 0.0;
  double rho_used = 0.0;
  double rho_total = 0.0;
  double beta = 0.5;
  int doublings = 0;
  int doubling_cap = 60;
};

/// Annealing rule applied after each round. If the measured entry's estimate
/// moved by at most sqrt(2/pi) * sigma_t (the mean absolute value of the
/// measurement noise), the round budgets double: rho_sel *= 2, rho_meas *= 4,
/// capped at doubling_cap events. Then, if the remaining budget is below
/// twice the next round's cost, the next round is sized to consume the
/// remainder exactly: rho_sel = beta * remaining, rho_meas the rest.
/// Returns true when the doubling branch fired.
bool anneal_budgets(double estimate_change, double sigma_t, AnnealState& state);

/// Full adaptive run: diagonal initialization, then select / measure /
/// reconstruct / anneal rounds until the budget is exhausted. Rows of `data`
/// violating the coordinate bound are clipped (counted in the result).
PaceResult pace_ggm_run(const Eigen::MatrixXd& data, const PaceConfig& config);

/// JSON-lines rendering of a round log (one record per line).
std::string round_log_to_jsonl(const std::vector<RoundRecord>& log);

}  // namespace pace
