// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pace/bounded_lbfgs.hpp"
#include "pace/measurement_store.hpp"

namespace pace {

/// One quadratic term of the reconstruction objective: weight/2 * (W_jk - y)^2
/// with canonical local indices j >= k. Repeated terms for the same pair are
/// allowed; they collapse to their inverse-variance weighted mean without
/// changing the minimizer.
struct MeasurementTerm {
  int j = 0;
  int k = 0;
  double y = 0.0;
  double weight = 0.0;
};

/// Quadratic fitting problem over one vertex block. Every diagonal pair must
/// carry at least one term and all weights must be positive.
class ReconstructionProblem {
 public:
  /// Builds the block problem for `vertices` from the store's collapsed
  /// (y, lambda) entries, one term per measured pair inside the block.
  static ReconstructionProblem from_store(const MeasurementStore& store,
                                          std::span<const int> vertices);

  /// Builds a problem over the full vertex set {0..dim-1} from raw terms
  /// (duplicates permitted).
  static ReconstructionProblem from_terms(int dim,
                                          std::vector<MeasurementTerm> terms);

  int size() const { return size_; }
  const std::vector<int>& vertices() const { return vertices_; }
  const std::vector<MeasurementTerm>& terms() const { return terms_; }

  /// Inverse-variance collapse of the terms on a diagonal pair (local index).
  double diagonal_estimate(int local) const { return diag_y_[local]; }

  /// Largest collapsed per-pair weight; used to normalize the objective so
  /// solver tolerances are independent of the raw weight scale.
  double max_pair_weight() const { return max_pair_weight_; }

  /// Mean of the collapsed diagonal estimates.
  double mean_diagonal() const { return mean_diag_; }

 private:
  ReconstructionProblem() = default;
  void finalize();

  int size_ = 0;
  std::vector<int> vertices_;
  std::vector<MeasurementTerm> terms_;
  std::vector<double> diag_y_;
  double max_pair_weight_ = 0.0;
  double mean_diag_ = 0.0;
};

/// Data term of the reconstruction objective at a symmetric W:
/// sum over terms of (weight/2) * (W_jk - y)^2.
double loss(const Eigen::MatrixXd& W, const ReconstructionProblem& problem);

/// Packs the lower triangle of an n x n matrix row by row into a vector of
/// length n(n+1)/2; unpack_lower is its inverse (upper triangle zero).
Eigen::VectorXd pack_lower(const Eigen::MatrixXd& L);
Eigen::MatrixXd unpack_lower(const Eigen::VectorXd& v, int n);

/// Packed positions of the diagonal entries.
std::vector<int> diagonal_positions(int n);

struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd gradient;  // over packed lower-triangular entries
};

/// Barrier-penalized objective in the Cholesky parameterization W = L L^T:
///   phi_mu(L) = loss(L L^T) - 2 mu sum_j log L_jj.
/// The gradient accumulates, per term with residual r = (L L^T)_jk - y,
/// 2 w r L_row(j) into row j for diagonal terms and w r cross contributions
/// into rows j and k for off-diagonal terms, then subtracts 2 mu / L_jj on
/// the diagonal. Cost is O(#terms * |V|) plus the packing.
BarrierEval barrier_value_and_gradient(const Eigen::MatrixXd& L,
                                       const ReconstructionProblem& problem,
                                       double mu);

/// Barrier-path schedule. Fields at their negative defaults are resolved per
/// problem: mu0 = max(1, mean measured diagonal), mu_min = 1e-7 * mu0, both
/// on the weight-normalized objective. Inner tolerance is
/// tol(mu) = max(tol_floor, tol_scale * mu / mu0).
struct IpmSchedule {
  double mu0 = -1.0;
  double mu_reduction = 0.2;
  double mu_min = -1.0;
  double tol_floor = 1e-8;
  double tol_scale = 1e-2;
  int max_inner_iterations = 600;
  int lbfgs_memory = 8;
};

struct BlockSolveInfo {
  bool converged = true;
  bool retried = false;
  int stages = 0;
  int total_inner_iterations = 0;
  double final_mu = 0.0;
  std::vector<double> stage_loss;  // data term after each barrier stage
};

/// Follows the barrier path mu0 -> mu_min with geometric reduction, warm
/// starting each stage from the previous factor. Returns L L^T from the final
/// stage: positive semidefinite by construction and, for well-posed problems,
/// an approximation of the unique maximum-entropy fit. On an inner-solve
/// failure the whole path is retried once from a jittered initial factor.
Eigen::MatrixXd ipm_solve(const ReconstructionProblem& problem,
                          const IpmSchedule& schedule = {},
                          BlockSolveInfo* info = nullptr);

struct ReconstructionReport {
  int blocks = 0;
  int singleton_blocks = 0;
  int failed_blocks = 0;
  std::vector<std::string> warnings;
};

/// Maximum-entropy reconstruction of the full d x d estimate from a store:
/// decomposes the measurement graph into connected components, solves each
/// multi-vertex block with ipm_solve, maps singleton blocks to max(y_jj, 0),
/// and assembles the block-diagonal result (exact zeros across blocks).
/// A block whose solve fails falls back to its clamped diagonal and is noted
/// in the report.
Eigen::MatrixXd solve_max_entropy(const MeasurementStore& store,
                                  const IpmSchedule& schedule = {},
                                  ReconstructionReport* report = nullptr);

/// Same reconstruction without the component decomposition: one dense block
/// over all vertices. Used for the solver-comparison study.
Eigen::MatrixXd solve_max_entropy_dense(const MeasurementStore& store,
                                        const IpmSchedule& schedule = {},
                                        ReconstructionReport* report = nullptr);

/// Nearest positive-semidefinite matrix in Frobenius norm: eigenvalues
/// clipped at zero. Idempotent.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& M);

enum class PgdInit { kZeros, kOnes };

struct PgdOptions {
  PgdInit init = PgdInit::kZeros;
  double step = -1.0;  // <0: 1 / (2 * max collapsed pair weight)
  int iterations = 5000;
};

struct PgdResult {
  Eigen::MatrixXd W;
  double final_loss = 0.0;
};

/// Projected gradient descent on the data term over the PSD cone. W starts
/// with observed entries at their collapsed y and unobserved entries at 0 or
/// 1; each iteration takes a gradient step and projects back onto the cone.
/// Reference solver for the comparison study only.
PgdResult pgd_solve(const ReconstructionProblem& problem,
                    const PgdOptions& options = {});

}  // namespace pace
