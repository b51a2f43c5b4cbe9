// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "pace/privacy.hpp"
#include "pace/rng.hpp"

namespace pace {

/// Sufficient statistic perturbation: one Gaussian mechanism release of all
/// d(d+1)/2 canonical entries with full-matrix sensitivity and the whole
/// budget rho. The upper triangle mirrors the lower one; the output is
/// deliberately not projected to the PSD cone. If `ledger` is null a fresh
/// ledger with total rho is used; either way exactly rho is charged.
Eigen::MatrixXd ssp_estimate(const Eigen::MatrixXd& data, double rho,
                             double bound, RngStream& rng,
                             BudgetLedger* ledger = nullptr);

/// Diagonal-only baseline: each diagonal entry measured with per-entry budget
/// rho / d and single-entry sensitivity, off-diagonal entries set to zero,
/// and the diagonal clamped at zero (the PSD projection of a diagonal
/// matrix).
Eigen::MatrixXd diagonal_only_estimate(const Eigen::MatrixXd& data, double rho,
                                       double bound, RngStream& rng,
                                       BudgetLedger* ledger = nullptr);

/// Clips entries of X into [-bound, bound] in place; returns the number of
/// clipped entries.
int clip_to_bound(Eigen::MatrixXd& X, double bound);

}  // namespace pace
