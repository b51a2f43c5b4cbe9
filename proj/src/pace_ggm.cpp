// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/pace_ggm.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "pace/baselines.hpp"
#include "pace/errors.hpp"

namespace pace {

namespace {

// E|xi| / sigma for a centered Gaussian; the annealing threshold.
const double kAnnealThreshold = std::sqrt(2.0 / std::numbers::pi);

Eigen::MatrixXd reconstruct(const MeasurementStore& store,
                            const PaceConfig& config,
                            ReconstructionReport* report) {
  switch (config.solver) {
    case SolverKind::kIpm:
      return config.use_components
                 ? solve_max_entropy(store, config.ipm, report)
                 : solve_max_entropy_dense(store, config.ipm, report);
    case SolverKind::kPgdZeros:
    case SolverKind::kPgdOnes: {
      std::vector<int> all(store.dim());
      for (int v = 0; v < store.dim(); ++v) all[v] = v;
      PgdOptions opts = config.pgd;
      opts.init = config.solver == SolverKind::kPgdZeros ? PgdInit::kZeros
                                                         : PgdInit::kOnes;
      if (report) *report = ReconstructionReport{.blocks = 1};
      return pgd_solve(ReconstructionProblem::from_store(store, all), opts).W;
    }
  }
  throw std::logic_error("unreachable solver kind");
}

}  // namespace

void PaceConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ConfigError("PaceConfig: rho must be positive and finite");
  }
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw ConfigError("PaceConfig: bound must be positive and finite");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("PaceConfig: alpha must be in (0, 1)");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("PaceConfig: beta must be in (0, 1)");
  }
  if (max_rounds == 0) {
    throw ConfigError(
        "PaceConfig: max_rounds must be >= 1 (or negative for the default)");
  }
  if (anneal_cap < 0) {
    throw ConfigError("PaceConfig: anneal_cap must be >= 0");
  }
}

std::pair<MeasurementStore, Eigen::MatrixXd> initialize_diagonal(
    const Eigen::MatrixXd& second_moment, double delta,
    const PaceConfig& config, BudgetLedger& ledger, RngStream& rng) {
  const int d = static_cast<int>(second_moment.rows());
  const double rho_diag = config.alpha * config.rho;
  const double rho_entry = rho_diag / d;

  MeasurementStore store(d, config.keep_raw_log);
  Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Zero(d, d);
  const double sigma = gaussian_noise_sigma(delta, rho_entry);
  for (int j = 0; j < d; ++j) {
    const double value = second_moment(j, j);
    const std::vector<double> noisy =
        gaussian_mechanism({&value, 1}, delta, rho_entry, ledger, rng, "diag");
    store.record(j, j, noisy[0], sigma * sigma);
    sigma0(j, j) = std::max(noisy[0], 0.0);
  }
  return {std::move(store), std::move(sigma0)};
}

PairKey select_entry(const Eigen::MatrixXd& second_moment,
                     const Eigen::MatrixXd& sigma_prev, double delta,
                     double rho_sel, BudgetLedger& ledger, RngStream& rng) {
  const int d = static_cast<int>(second_moment.rows());
  std::vector<double> scores;
  std::vector<PairKey> pairs;
  scores.reserve(d * (d + 1) / 2);
  pairs.reserve(d * (d + 1) / 2);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k <= j; ++k) {
      scores.push_back(std::abs(second_moment(j, k) - sigma_prev(j, k)));
      pairs.push_back({j, k});
    }
  }
  const std::size_t r =
      exponential_select(scores, delta, rho_sel, ledger, rng, "sel");
  return pairs[r];
}

std::pair<double, double> measure_entry(const Eigen::MatrixXd& second_moment,
                                        PairKey pair, double delta,
                                        double rho_meas,
                                        MeasurementStore& store,
                                        BudgetLedger& ledger, RngStream& rng) {
  const double sigma_t = gaussian_noise_sigma(delta, rho_meas);
  const double value = second_moment(pair.j, pair.k);
  const std::vector<double> noisy =
      gaussian_mechanism({&value, 1}, delta, rho_meas, ledger, rng, "meas");
  store.record(pair.j, pair.k, noisy[0], sigma_t * sigma_t);
  return {noisy[0], sigma_t};
}

bool anneal_budgets(double estimate_change, double sigma_t,
                    AnnealState& state) {
  bool doubled = false;
  if (estimate_change <= kAnnealThreshold * sigma_t &&
      state.doublings < state.doubling_cap) {
    state.rho_sel *= 2.0;
    state.rho_meas *= 4.0;
    state.doublings += 1;
    doubled = true;
  }
  const double remaining = state.rho_total - state.rho_used;
  if (remaining < 2.0 * (state.rho_sel + state.rho_meas)) {
    state.rho_sel = state.beta * remaining;
    // The two parts sum to the remainder exactly, so the next round closes
    // the ledger.
    state.rho_meas = remaining - state.rho_sel;
  }
  return doubled;
}

PaceResult pace_ggm_run(const Eigen::MatrixXd& data, const PaceConfig& config) {
  config.validate();
  const auto n = data.rows();
  const int d = static_cast<int>(data.cols());
  if (n < 1 || d < 1) {
    throw ConfigError("pace_ggm_run: data must be a nonempty n x d matrix");
  }

  PaceResult result;

  // Rows must satisfy the coordinate-wise bound for the sensitivity
  // calibration to hold; out-of-range entries are clipped and counted.
  Eigen::MatrixXd X = data;
  result.clipped_entries = clip_to_bound(X, config.bound);
  const Eigen::MatrixXd second_moment =
      (X.transpose() * X / static_cast<double>(n)).eval();

  const SensitivitySpec spec(config.bound, n, d);
  const double delta = entry_sensitivity(spec);
  const int max_rounds =
      config.max_rounds > 0 ? config.max_rounds : std::max(1, d * (d - 1));

  BudgetLedger ledger(config.rho);
  RngStream root(config.seed);
  RngStream rng_init = root.substream("diag");

  auto [store, sigma_prev] =
      initialize_diagonal(second_moment, delta, config, ledger, rng_init);
  result.rho_diag = ledger.rho_used();

  AnnealState anneal;
  anneal.rho_total = config.rho;
  anneal.rho_used = ledger.rho_used();
  anneal.beta = config.beta;
  anneal.doubling_cap = config.anneal_cap;
  const double rho_per_round = (config.rho - anneal.rho_used) / max_rounds;
  anneal.rho_sel = config.beta * rho_per_round;
  anneal.rho_meas = (1.0 - config.beta) * rho_per_round;

  Eigen::MatrixXd sigma_hat = sigma_prev;
  int t = 0;
  // Hard cap: per-round spend never decreases until the closing round, so the
  // round count stays near max_rounds even under adversarial annealing.
  const int round_cap = max_rounds + config.anneal_cap + 8;
  while (ledger.remaining() > config.rho * 1e-12 && t < round_cap) {
    t += 1;
    const auto start = std::chrono::steady_clock::now();
    RngStream rng_sel = root.substream("sel").substream(t);
    RngStream rng_meas = root.substream("meas").substream(t);

    const PairKey pair = select_entry(second_moment, sigma_prev, delta,
                                      anneal.rho_sel, ledger, rng_sel);
    const auto [z, sigma_t] = measure_entry(second_moment, pair, delta,
                                            anneal.rho_meas, store, ledger,
                                            rng_meas);

    ReconstructionReport report;
    sigma_hat = reconstruct(store, config, &report);
    result.solver_warnings += report.failed_blocks;

    anneal.rho_used = ledger.rho_used();
    RoundRecord record;
    record.t = t;
    record.j = pair.j;
    record.k = pair.k;
    record.sigma_t = sigma_t;
    record.rho_sel = anneal.rho_sel;
    record.rho_meas = anneal.rho_meas;
    record.solver_flag = report.failed_blocks > 0;

    const double change =
        std::abs(sigma_hat(pair.j, pair.k) - sigma_prev(pair.j, pair.k));
    record.annealed = anneal_budgets(change, sigma_t, anneal);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.round_log.push_back(record);
    sigma_prev = sigma_hat;
  }

  result.sigma_hat = std::move(sigma_hat);
  result.rounds = t;
  result.rho_used = ledger.rho_used();
  result.diagonal_measurements = store.diagonal_count();
  result.offdiagonal_measurements = store.offdiagonal_count();
  return result;
}

std::string round_log_to_jsonl(const std::vector<RoundRecord>& log) {
  std::string out;
  for (const RoundRecord& r : log) {
    nlohmann::json rec{{"t", r.t},
                       {"j", r.j},
                       {"k", r.k},
                       {"sigma_t", r.sigma_t},
                       {"rho_sel", r.rho_sel},
                       {"rho_meas", r.rho_meas},
                       {"annealed", r.annealed},
                       {"solver_flag", r.solver_flag},
                       {"wall_seconds", r.wall_seconds}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace pace
