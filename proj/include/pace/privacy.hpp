// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pace/errors.hpp"
#include "pace/rng.hpp"

namespace pace {

/// Data-bound parameters that calibrate query sensitivities: a coordinate-wise
/// bound |x_j| <= B on each record, the record count n, and the dimension d.
struct SensitivitySpec {
  double bound = 1.0;
  std::int64_t n = 1;
  std::int64_t d = 1;

  SensitivitySpec(double bound, std::int64_t n, std::int64_t d);
};

/// Sensitivity of a single second-moment entry: 2 B^2 / n.
double entry_sensitivity(const SensitivitySpec& spec);

/// Frobenius sensitivity of the full second-moment matrix: sqrt(2) d B^2 / n.
double full_matrix_sensitivity(const SensitivitySpec& spec);

/// Noise scale for the Gaussian mechanism at zCDP cost rho:
/// sigma = sqrt(delta^2 / (2 rho)).
double gaussian_noise_sigma(double delta, double rho);

/// Converts a rho-zCDP guarantee to (epsilon, delta)-DP:
/// epsilon = rho + 2 sqrt(rho ln(1/delta)).
double zcdp_to_approx_dp(double rho, double delta);

struct ChargeRecord {
  std::string label;
  double rho = 0.0;
};

/// Single-writer zCDP budget accountant. Every mechanism invocation charges
/// the ledger before touching the data; a charge that would exceed the total
/// budget is rejected and leaves the ledger unchanged.
class BudgetLedger {
 public:
  /// Absolute slack absorbing floating-point accumulation across charges.
  static constexpr double kSlack = 1e-12;

  explicit BudgetLedger(double rho_total);

  double rho_total() const { return rho_total_; }
  double rho_used() const { return rho_used_; }
  double remaining() const { return rho_total_ - rho_used_; }

  bool can_absorb(double rho) const {
    return rho >= 0.0 && rho_used_ + rho <= rho_total_ + kSlack;
  }

  /// Records a charge of rho under the given label.
  /// Throws BudgetError if rho is negative or the budget would be exceeded.
  void charge(std::string_view label, double rho);

  const std::vector<ChargeRecord>& entries() const { return entries_; }

 private:
  double rho_total_;
  double rho_used_ = 0.0;
  std::vector<ChargeRecord> entries_;
};

/// Gaussian mechanism: returns values + N(0, sigma^2 I) with sigma calibrated
/// to the query's l2 sensitivity `delta` and zCDP budget `rho`. The ledger is
/// charged exactly rho before any noise is drawn.
std::vector<double> gaussian_mechanism(std::span<const double> values,
                                       double delta, double rho,
                                       BudgetLedger& ledger, RngStream& rng,
                                       std::string_view label = "gaussian");

/// Exponential mechanism via Gumbel-max: selects index r with probability
/// proportional to exp(eps * scores[r] / (2 * score_sensitivity)) where
/// eps = sqrt(8 rho_sel). Adding independent Gumbel noise to the scaled
/// scores and taking the argmax realizes exactly this law while staying
/// finite for arbitrarily large exponents. Ties (a probability-zero event)
/// resolve to the lowest index.
std::size_t exponential_select(std::span<const double> scores,
                               double score_sensitivity, double rho_sel,
                               BudgetLedger& ledger, RngStream& rng,
                               std::string_view label = "select");

}  // namespace pace
