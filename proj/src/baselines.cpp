// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pace {

namespace {

Eigen::MatrixXd clipped_second_moment(const Eigen::MatrixXd& data,
                                      double bound) {
  Eigen::MatrixXd X = data;
  clip_to_bound(X, bound);
  return X.transpose() * X / static_cast<double>(X.rows());
}

}  // namespace

int clip_to_bound(Eigen::MatrixXd& X, double bound) {
  int clipped = 0;
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    double& v = X.data()[i];
    if (std::abs(v) > bound) {
      v = std::clamp(v, -bound, bound);
      ++clipped;
    }
  }
  return clipped;
}

Eigen::MatrixXd ssp_estimate(const Eigen::MatrixXd& data, double rho,
                             double bound, RngStream& rng,
                             BudgetLedger* ledger) {
  const int d = static_cast<int>(data.cols());
  const Eigen::MatrixXd sigma = clipped_second_moment(data, bound);
  const SensitivitySpec spec(bound, data.rows(), d);
  const double delta_full = full_matrix_sensitivity(spec);

  std::vector<double> entries;
  entries.reserve(d * (d + 1) / 2);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k <= j; ++k) {
      entries.push_back(sigma(j, k));
    }
  }
  BudgetLedger fresh(rho);
  BudgetLedger& acct = ledger ? *ledger : fresh;
  const std::vector<double> noisy =
      gaussian_mechanism(entries, delta_full, rho, acct, rng, "ssp");

  Eigen::MatrixXd out(d, d);
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k <= j; ++k) {
      out(j, k) = noisy[idx];
      out(k, j) = noisy[idx];
      ++idx;
    }
  }
  return out;
}

Eigen::MatrixXd diagonal_only_estimate(const Eigen::MatrixXd& data, double rho,
                                       double bound, RngStream& rng,
                                       BudgetLedger* ledger) {
  const int d = static_cast<int>(data.cols());
  const Eigen::MatrixXd sigma = clipped_second_moment(data, bound);
  const SensitivitySpec spec(bound, data.rows(), d);
  const double delta = entry_sensitivity(spec);
  const double rho_entry = rho / d;

  BudgetLedger fresh(rho);
  BudgetLedger& acct = ledger ? *ledger : fresh;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const double value = sigma(j, j);
    const std::vector<double> noisy =
        gaussian_mechanism({&value, 1}, delta, rho_entry, acct, rng, "diag");
    out(j, j) = std::max(noisy[0], 0.0);
  }
  return out;
}

}  // namespace pace
