// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace pace {

/// Frobenius norm of est - truth.
double frobenius_error(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

/// Affine-invariant shape error || truth^{-1/2} est truth^{-1/2} - I ||_F.
/// The inverse square root comes from an eigendecomposition with eigenvalues
/// floored at 1e-12 * trace / d, so numerically singular truths stay usable.
/// Truths with an eigenvalue below -1e-8 * trace are rejected.
double mahalanobis_error(const Eigen::MatrixXd& est,
                         const Eigen::MatrixXd& truth);

/// Fraction of squared Frobenius norm carried by the off-diagonal entries.
double off_diag_energy(const Eigen::MatrixXd& sigma);

/// exp of the entropy of the normalized eigenvalue distribution; in [1, d].
double effective_rank(const Eigen::MatrixXd& sigma);

}  // namespace pace
