// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace pace {

enum class OptimStatus {
  kConverged,        // projected-gradient inf-norm at or below tolerance
  kMaxIterations,    // iteration budget exhausted
  kLineSearchFailed  // no acceptable step found along the feasible path
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  OptimStatus status = OptimStatus::kMaxIterations;

  bool converged() const { return status == OptimStatus::kConverged; }
};

struct BoundedLbfgsOptions {
  int memory = 8;
  int max_iterations = 500;
  double tolerance = 1e-8;  // projected-gradient inf-norm target
  double armijo_c = 1e-4;
  double min_step = 1e-20;
};

/// Objective callback: fills `grad` and returns the value at `x`.
using ObjectiveFn =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Bound-constrained limited-memory quasi-Newton descent with lower bounds
/// only. Directions come from the standard two-loop recursion; steps follow
/// the projected path x(a) = max(x + a d, lower) with Armijo backtracking, so
/// the objective is non-increasing across accepted steps. Entries of `lower`
/// may be -infinity for unconstrained coordinates. x0 must be feasible.
OptimResult minimize_bounded(const ObjectiveFn& objective,
                             const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& lower,
                             const BoundedLbfgsOptions& options = {});

}  // namespace pace
