// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace pace {

double frobenius_error(const Eigen::MatrixXd& est,
                       const Eigen::MatrixXd& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw std::invalid_argument("frobenius_error: shape mismatch");
  }
  return (est - truth).norm();
}

double mahalanobis_error(const Eigen::MatrixXd& est,
                         const Eigen::MatrixXd& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols() ||
      truth.rows() != truth.cols()) {
    throw std::invalid_argument("mahalanobis_error: shape mismatch");
  }
  const int d = static_cast<int>(truth.rows());
  const double trace = truth.trace();
  if (!(trace > 0.0)) {
    throw std::invalid_argument("mahalanobis_error: truth has no mass");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(truth);
  if (eig.eigenvalues().minCoeff() < -1e-8 * trace) {
    throw std::invalid_argument("mahalanobis_error: truth is not PSD");
  }
  const double floor = 1e-12 * trace / d;
  const Eigen::VectorXd inv_sqrt =
      eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd root = eig.eigenvectors() * inv_sqrt.asDiagonal() *
                               eig.eigenvectors().transpose();
  const Eigen::MatrixXd normalized = root * est * root;
  return (normalized - Eigen::MatrixXd::Identity(d, d)).norm();
}

double off_diag_energy(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("off_diag_energy: matrix must be square");
  }
  const double total = sigma.squaredNorm();
  if (total == 0.0) return 0.0;
  const double diag = sigma.diagonal().squaredNorm();
  return (total - diag) / total;
}

double effective_rank(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("effective_rank: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument("effective_rank: spectrum has no mass");
  }
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < clipped.size(); ++i) {
    const double p = clipped[i] / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

}  // namespace pace
