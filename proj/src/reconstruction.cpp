// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "pace/rng.hpp"

namespace pace {

namespace {

constexpr double kDiagonalFloor = 1e-12;

// Collapses terms to one (y, weight) per canonical pair by inverse-variance
// weighting.
std::map<std::pair<int, int>, PairEstimate> collapse_terms(
    const std::vector<MeasurementTerm>& terms) {
  std::map<std::pair<int, int>, PairEstimate> collapsed;
  for (const MeasurementTerm& t : terms) {
    PairEstimate& e = collapsed[{t.j, t.k}];
    e.y = (e.lambda * e.y + t.weight * t.y) / (e.lambda + t.weight);
    e.lambda += t.weight;
  }
  return collapsed;
}

Eigen::MatrixXd initial_factor(const ReconstructionProblem& problem) {
  const int n = problem.size();
  double top = 1.0;
  for (int j = 0; j < n; ++j) {
    top = std::max(top, problem.diagonal_estimate(j));
  }
  const double eps0 = 1e-6 * top;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    L(j, j) = std::sqrt(std::max(problem.diagonal_estimate(j), eps0));
  }
  return L;
}

}  // namespace

ReconstructionProblem ReconstructionProblem::from_store(
    const MeasurementStore& store, std::span<const int> vertices) {
  ReconstructionProblem p;
  p.size_ = static_cast<int>(vertices.size());
  p.vertices_.assign(vertices.begin(), vertices.end());

  std::map<int, int> local;  // global vertex -> local index
  for (int i = 0; i < p.size_; ++i) {
    local[p.vertices_[i]] = i;
  }
  for (const auto& [key, e] : store.entries()) {
    auto jt = local.find(key.first);
    auto kt = local.find(key.second);
    if (jt == local.end() || kt == local.end()) continue;
    const PairKey lk = canonical_pair(jt->second, kt->second);
    p.terms_.push_back({lk.j, lk.k, e.y, e.lambda});
  }
  p.finalize();
  return p;
}

ReconstructionProblem ReconstructionProblem::from_terms(
    int dim, std::vector<MeasurementTerm> terms) {
  ReconstructionProblem p;
  p.size_ = dim;
  p.vertices_.resize(dim);
  for (int i = 0; i < dim; ++i) p.vertices_[i] = i;
  p.terms_ = std::move(terms);
  for (MeasurementTerm& t : p.terms_) {
    const PairKey lk = canonical_pair(t.j, t.k);
    t.j = lk.j;
    t.k = lk.k;
  }
  p.finalize();
  return p;
}

void ReconstructionProblem::finalize() {
  if (size_ < 1) {
    throw std::invalid_argument("ReconstructionProblem: empty vertex set");
  }
  for (const MeasurementTerm& t : terms_) {
    if (t.j < 0 || t.j >= size_ || t.k < 0 || t.k > t.j) {
      throw std::invalid_argument(
          "ReconstructionProblem: term index out of range");
    }
    if (!(t.weight > 0.0) || !std::isfinite(t.weight) || !std::isfinite(t.y)) {
      throw std::invalid_argument("ReconstructionProblem: invalid term");
    }
  }
  const auto collapsed = collapse_terms(terms_);
  diag_y_.assign(size_, 0.0);
  max_pair_weight_ = 0.0;
  mean_diag_ = 0.0;
  int diagonals = 0;
  for (const auto& [key, e] : collapsed) {
    max_pair_weight_ = std::max(max_pair_weight_, e.lambda);
    if (key.first == key.second) {
      diag_y_[key.first] = e.y;
      mean_diag_ += e.y;
      ++diagonals;
    }
  }
  if (diagonals != size_) {
    throw std::invalid_argument(
        "ReconstructionProblem: every diagonal entry must be measured");
  }
  mean_diag_ /= size_;
}

double loss(const Eigen::MatrixXd& W, const ReconstructionProblem& problem) {
  double value = 0.0;
  for (const MeasurementTerm& t : problem.terms()) {
    const double r = W(t.j, t.k) - t.y;
    value += 0.5 * t.weight * r * r;
  }
  return value;
}

Eigen::VectorXd pack_lower(const Eigen::MatrixXd& L) {
  const int n = static_cast<int>(L.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int idx = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      v[idx++] = L(r, c);
    }
  }
  return v;
}

Eigen::MatrixXd unpack_lower(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  int idx = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      L(r, c) = v[idx++];
    }
  }
  return L;
}

std::vector<int> diagonal_positions(int n) {
  std::vector<int> out(n);
  for (int r = 0; r < n; ++r) {
    out[r] = r * (r + 1) / 2 + r;
  }
  return out;
}

BarrierEval barrier_value_and_gradient(const Eigen::MatrixXd& L,
                                       const ReconstructionProblem& problem,
                                       double mu) {
  const int n = problem.size();
  if (!(mu > 0.0)) {
    throw std::invalid_argument("barrier: mu must be positive");
  }
  for (int j = 0; j < n; ++j) {
    if (!(L(j, j) > 0.0)) {
      throw std::domain_error("barrier: factor diagonal must be positive");
    }
  }

  BarrierEval eval;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, n);
  double value = 0.0;
  for (const MeasurementTerm& t : problem.terms()) {
    // (L L^T)_jk touches only the first k+1 columns because L is lower
    // triangular and k <= j.
    const int len = t.k + 1;
    const double wjk = L.row(t.j).head(len).dot(L.row(t.k).head(len));
    const double r = wjk - t.y;
    value += 0.5 * t.weight * r * r;
    if (t.j == t.k) {
      grad.row(t.j).head(len) += (2.0 * t.weight * r) * L.row(t.j).head(len);
    } else {
      const double coef = t.weight * r;
      grad.row(t.j).head(len) += coef * L.row(t.k).head(len);
      grad.row(t.k).head(len) += coef * L.row(t.j).head(len);
    }
  }
  for (int j = 0; j < n; ++j) {
    value -= 2.0 * mu * std::log(L(j, j));
    grad(j, j) -= 2.0 * mu / L(j, j);
  }
  eval.value = value;
  eval.gradient = pack_lower(grad);
  return eval;
}

Eigen::MatrixXd ipm_solve(const ReconstructionProblem& problem,
                          const IpmSchedule& schedule, BlockSolveInfo* info) {
  const int n = problem.size();
  BlockSolveInfo local_info;
  BlockSolveInfo& out = info ? *info : local_info;
  out = BlockSolveInfo{};

  // Normalize the data weights so tolerances and the floating-point noise
  // floor are independent of the raw precision scale; the barrier weight
  // lives on the same normalized objective.
  const double w_ref = problem.max_pair_weight();
  std::vector<MeasurementTerm> scaled = problem.terms();
  for (MeasurementTerm& t : scaled) t.weight /= w_ref;
  const ReconstructionProblem normalized =
      ReconstructionProblem::from_terms(n, std::move(scaled));

  const double mu0 = schedule.mu0 > 0.0
                         ? schedule.mu0
                         : std::max(1.0, problem.mean_diagonal());
  const double mu_min =
      schedule.mu_min > 0.0 ? schedule.mu_min : 1e-7 * mu0;
  if (!(mu_min < mu0) || !(schedule.mu_reduction > 0.0) ||
      !(schedule.mu_reduction < 1.0)) {
    throw std::invalid_argument("ipm_solve: invalid barrier schedule");
  }

  const Eigen::MatrixXd L0 = initial_factor(problem);
  const int packed = n * (n + 1) / 2;
  Eigen::VectorXd lower = Eigen::VectorXd::Constant(
      packed, -std::numeric_limits<double>::infinity());
  for (int pos : diagonal_positions(n)) lower[pos] = kDiagonalFloor;

  Eigen::MatrixXd L;
  for (int attempt = 0; attempt < 2; ++attempt) {
    L = L0;
    if (attempt == 1) {
      // Retry once from a 1% relative jitter of the initial factor.
      RngStream jitter(mix64(fnv1a64("ipm-retry"), static_cast<uint64_t>(n)));
      for (int j = 0; j < n; ++j) {
        L(j, j) = std::max(L(j, j) * (1.0 + 0.01 * jitter.normal()), 1e-9);
      }
      out.retried = true;
    }
    out.converged = true;
    out.stages = 0;
    out.stage_loss.clear();

    for (double mu = mu0; mu > mu_min; mu *= schedule.mu_reduction) {
      const double tol =
          std::max(schedule.tol_floor, schedule.tol_scale * mu / mu0);
      BoundedLbfgsOptions opts;
      opts.tolerance = tol;
      opts.max_iterations = schedule.max_inner_iterations;
      opts.memory = schedule.lbfgs_memory;
      const auto objective = [&](const Eigen::VectorXd& x,
                                 Eigen::VectorXd& grad) {
        const BarrierEval ev =
            barrier_value_and_gradient(unpack_lower(x, n), normalized, mu);
        grad = ev.gradient;
        return ev.value;
      };
      const OptimResult res =
          minimize_bounded(objective, pack_lower(L), lower, opts);
      L = unpack_lower(res.x, n);
      out.stages += 1;
      out.total_inner_iterations += res.iterations;
      out.final_mu = mu;
      out.stage_loss.push_back(loss(L * L.transpose(), problem));
      const bool stage_ok =
          res.converged() || res.projected_gradient_norm <= 100.0 * tol;
      if (!stage_ok) {
        out.converged = false;
        break;
      }
    }
    if (out.converged || attempt == 1) break;
  }
  return L * L.transpose();
}

namespace {

Eigen::MatrixXd clamped_diagonal_block(const MeasurementStore& store,
                                       std::span<const int> vertices) {
  Eigen::MatrixXd block =
      Eigen::MatrixXd::Zero(vertices.size(), vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    block(i, i) = std::max(store.at(vertices[i], vertices[i]).y, 0.0);
  }
  return block;
}

void require_all_diagonals(const MeasurementStore& store) {
  for (int v = 0; v < store.dim(); ++v) {
    if (!store.measured(v, v)) {
      throw std::invalid_argument(
          "solve_max_entropy: diagonal entry " + std::to_string(v) +
          " has no measurement");
    }
  }
}

}  // namespace

Eigen::MatrixXd solve_max_entropy(const MeasurementStore& store,
                                  const IpmSchedule& schedule,
                                  ReconstructionReport* report) {
  require_all_diagonals(store);
  const int d = store.dim();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  ReconstructionReport local_report;
  ReconstructionReport& rep = report ? *report : local_report;
  rep = ReconstructionReport{};

  for (const std::vector<int>& comp : store.connected_components()) {
    rep.blocks += 1;
    if (comp.size() == 1) {
      rep.singleton_blocks += 1;
      const int v = comp.front();
      sigma(v, v) = std::max(store.at(v, v).y, 0.0);
      continue;
    }
    const ReconstructionProblem problem =
        ReconstructionProblem::from_store(store, comp);
    BlockSolveInfo info;
    Eigen::MatrixXd block = ipm_solve(problem, schedule, &info);
    if (!info.converged) {
      rep.failed_blocks += 1;
      rep.warnings.push_back("block starting at vertex " +
                             std::to_string(comp.front()) +
                             " did not converge; using clamped diagonal");
      block = clamped_diagonal_block(store, comp);
    }
    for (std::size_t a = 0; a < comp.size(); ++a) {
      for (std::size_t b = 0; b < comp.size(); ++b) {
        sigma(comp[a], comp[b]) = block(a, b);
      }
    }
  }
  return sigma;
}

Eigen::MatrixXd solve_max_entropy_dense(const MeasurementStore& store,
                                        const IpmSchedule& schedule,
                                        ReconstructionReport* report) {
  require_all_diagonals(store);
  const int d = store.dim();
  std::vector<int> all(d);
  for (int v = 0; v < d; ++v) all[v] = v;
  ReconstructionReport local_report;
  ReconstructionReport& rep = report ? *report : local_report;
  rep = ReconstructionReport{};
  rep.blocks = 1;

  const ReconstructionProblem problem =
      ReconstructionProblem::from_store(store, all);
  BlockSolveInfo info;
  Eigen::MatrixXd sigma = ipm_solve(problem, schedule, &info);
  if (!info.converged) {
    rep.failed_blocks = 1;
    rep.warnings.push_back("dense solve did not converge; using clamped diagonal");
    sigma = clamped_diagonal_block(store, all);
  }
  return sigma;
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("psd_project: matrix must be square");
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("psd_project: matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() *
                        eig.eigenvectors().transpose();
  out = 0.5 * (out + out.transpose());
  return out;
}

PgdResult pgd_solve(const ReconstructionProblem& problem,
                    const PgdOptions& options) {
  const int n = problem.size();
  const auto collapsed = collapse_terms(problem.terms());

  const double fill = options.init == PgdInit::kZeros ? 0.0 : 1.0;
  Eigen::MatrixXd W = Eigen::MatrixXd::Constant(n, n, fill);
  for (const auto& [key, e] : collapsed) {
    W(key.first, key.second) = e.y;
    W(key.second, key.first) = e.y;
  }

  const double step = options.step > 0.0
                          ? options.step
                          : 1.0 / (2.0 * problem.max_pair_weight());
  Eigen::MatrixXd grad(n, n);
  for (int it = 0; it < options.iterations; ++it) {
    grad.setZero();
    for (const auto& [key, e] : collapsed) {
      const double r = W(key.first, key.second) - e.y;
      if (key.first == key.second) {
        grad(key.first, key.first) = e.lambda * r;
      } else {
        grad(key.first, key.second) = 0.5 * e.lambda * r;
        grad(key.second, key.first) = 0.5 * e.lambda * r;
      }
    }
    W = psd_project(W - step * grad);
  }
  return {W, loss(W, problem)};
}

}  // namespace pace
