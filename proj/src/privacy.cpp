// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pace {

SensitivitySpec::SensitivitySpec(double bound, std::int64_t n, std::int64_t d)
    : bound(bound), n(n), d(d) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw std::invalid_argument("SensitivitySpec: bound must be finite and >= 0");
  }
  if (n < 1) throw std::invalid_argument("SensitivitySpec: n must be >= 1");
  if (d < 1) throw std::invalid_argument("SensitivitySpec: d must be >= 1");
}

double entry_sensitivity(const SensitivitySpec& spec) {
  return 2.0 * spec.bound * spec.bound / static_cast<double>(spec.n);
}

double full_matrix_sensitivity(const SensitivitySpec& spec) {
  // sqrt(2) d B^2 / n, written as the entry sensitivity times d / sqrt(2) so
  // the two bounds keep their exact ratio in floating point.
  return entry_sensitivity(spec) * static_cast<double>(spec.d) /
         std::numbers::sqrt2;
}

double gaussian_noise_sigma(double delta, double rho) {
  if (!(rho > 0.0)) {
    throw BudgetError("gaussian_noise_sigma: rho must be positive");
  }
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("gaussian_noise_sigma: delta must be >= 0");
  }
  return std::sqrt(delta * delta / (2.0 * rho));
}

double zcdp_to_approx_dp(double rho, double delta) {
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("zcdp_to_approx_dp: rho must be >= 0");
  }
  if (!(delta > 0.0) || delta > 1.0) {
    throw std::invalid_argument("zcdp_to_approx_dp: delta must be in (0, 1]");
  }
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

BudgetLedger::BudgetLedger(double rho_total) : rho_total_(rho_total) {
  if (!(rho_total >= 0.0) || !std::isfinite(rho_total)) {
    throw BudgetError("BudgetLedger: total budget must be finite and >= 0");
  }
}

void BudgetLedger::charge(std::string_view label, double rho) {
  if (!(rho >= 0.0)) {
    throw BudgetError("BudgetLedger: charge must be >= 0");
  }
  if (!can_absorb(rho)) {
    throw BudgetError("BudgetLedger: charge of " + std::to_string(rho) +
                      " exceeds remaining budget " +
                      std::to_string(remaining()));
  }
  rho_used_ += rho;
  entries_.push_back({std::string(label), rho});
}

std::vector<double> gaussian_mechanism(std::span<const double> values,
                                       double delta, double rho,
                                       BudgetLedger& ledger, RngStream& rng,
                                       std::string_view label) {
  const double sigma = gaussian_noise_sigma(delta, rho);
  ledger.charge(label, rho);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) {
    v += sigma * rng.normal();
  }
  return out;
}

std::size_t exponential_select(std::span<const double> scores,
                               double score_sensitivity, double rho_sel,
                               BudgetLedger& ledger, RngStream& rng,
                               std::string_view label) {
  if (scores.empty()) {
    throw std::invalid_argument("exponential_select: empty score list");
  }
  if (!(score_sensitivity > 0.0)) {
    throw std::invalid_argument(
        "exponential_select: score sensitivity must be positive");
  }
  if (!(rho_sel > 0.0)) {
    throw BudgetError("exponential_select: rho_sel must be positive");
  }
  ledger.charge(label, rho_sel);

  const double eps = std::sqrt(8.0 * rho_sel);
  const double scale = eps / (2.0 * score_sensitivity);
  // Shift by the max score; the softmax law is shift-invariant and the keys
  // stay finite no matter how large eps * score gets.
  double top = -std::numeric_limits<double>::infinity();
  for (double s : scores) top = std::max(top, s);
  std::size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < scores.size(); ++r) {
    const double key = scale * (scores[r] - top) + rng.gumbel();
    if (key > best_key) {  // strict: ties keep the lowest index
      best_key = key;
      best = r;
    }
  }
  return best;
}

}  // namespace pace
