// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/bounded_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace pace {

namespace {

// Inf-norm of the projected gradient: at an active lower bound only the
// decreasing direction counts.
double projected_gradient_norm(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& g,
                               const Eigen::VectorXd& lower) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (gi > 0.0 && std::isfinite(lower[i])) {
      gi = std::min(gi, x[i] - lower[i]);
    }
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;  // 1 / (s.y)
};

// Two-loop recursion; returns the quasi-Newton descent direction -H g.
Eigen::VectorXd lbfgs_direction(const std::deque<Correction>& history,
                                const Eigen::VectorXd& g) {
  Eigen::VectorXd q = -g;
  if (history.empty()) return q;

  const std::size_t m = history.size();
  std::vector<double> alpha(m);
  for (std::size_t i = m; i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const Correction& last = history.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (std::size_t i = 0; i < m; ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return q;
}

}  // namespace

OptimResult minimize_bounded(const ObjectiveFn& objective,
                             const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& lower,
                             const BoundedLbfgsOptions& options) {
  if (x0.size() != lower.size()) {
    throw std::invalid_argument("minimize_bounded: bound size mismatch");
  }
  const Eigen::Index n = x0.size();

  Eigen::VectorXd x = x0.cwiseMax(lower);
  Eigen::VectorXd g(n), g_new(n);
  double fx = objective(x, g);

  std::deque<Correction> history;
  OptimResult result;
  result.status = OptimStatus::kMaxIterations;

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const double pg = projected_gradient_norm(x, g, lower);
    if (pg <= options.tolerance) {
      result.status = OptimStatus::kConverged;
      result.iterations = iter;
      break;
    }
    if (iter == options.max_iterations) {
      result.iterations = iter;
      break;
    }

    Eigen::VectorXd d = lbfgs_direction(history, g);
    if (!d.allFinite() || d.dot(g) >= 0.0) {
      d = -g;  // fall back to steepest descent
      history.clear();
    }

    // Backtracking Armijo along the projected path; if the quasi-Newton
    // direction yields nothing, retry once along -g before giving up.
    Eigen::VectorXd x_new;
    double f_new = fx;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      while (step >= options.min_step) {
        x_new = (x + step * d).cwiseMax(lower);
        const double directional = g.dot(x_new - x);
        if (directional < 0.0) {
          f_new = objective(x_new, g_new);
          if (std::isfinite(f_new) &&
              f_new <= fx + options.armijo_c * directional) {
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (attempt == 0 && (d + g).norm() > 0.0) {
          d = -g;
          history.clear();
        } else {
          break;
        }
      }
    }
    if (!accepted) {
      result.status = OptimStatus::kLineSearchFailed;
      result.iterations = iter;
      break;
    }

    Correction c;
    c.s = x_new - x;
    c.y = g_new - g;
    const double sy = c.s.dot(c.y);
    if (sy > 1e-12 * c.s.norm() * c.y.norm()) {
      c.rho = 1.0 / sy;
      history.push_back(std::move(c));
      if (static_cast<int>(history.size()) > options.memory) {
        history.pop_front();
      }
    }
    x = std::move(x_new);
    fx = f_new;
    g = g_new;
  }

  result.x = std::move(x);
  result.value = fx;
  result.projected_gradient_norm = projected_gradient_norm(result.x, g, lower);
  return result;
}

}  // namespace pace
