#pragma once

#include <string_view>

#include "eqd/kinship.hpp"

namespace eqd {

/// minimize    c'x
/// subject to  Aeq x = beq
///             0 <= R x <= box_upper     (elementwise)
///             ||C x|| <= radius
///
/// R and C are sparse; C'C must be positive definite.
struct BoxConeProblem {
  Vector c;
  SparseMatrix aeq;
  Vector beq;
  SparseMatrix box;
  Vector box_upper;
  SparseMatrix cone;
  double radius = 0.0;
};

struct ConicOptions {
  double tol = 1e-8;
  int max_iter = 200;
  int refine = 2;
};

enum class ConicStatus {
  Optimal,
  NearOptimal,
  PrimalInfeasible,
  DualInfeasible,
  MaxIterations,
  Stalled,
};

std::string_view to_string(ConicStatus status);

struct ConicSolution {
  ConicStatus status = ConicStatus::Stalled;
  Vector x;
  /// Multipliers of the equality rows.
  Vector y;
  /// Multipliers of the lower box rows, upper box rows and the cone.
  Vector z_lower;
  Vector z_upper;
  Vector z_cone;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and Mehrotra correction. The Newton systems are
/// reduced to R'DR + eta^-2 (C'C + 2vv'), factored by sparse Cholesky with
/// a rank-one update and a dense Schur complement for the equality rows.
ConicSolution solve_box_cone(const BoxConeProblem& problem, const ConicOptions& options = {});

}  // namespace eqd
