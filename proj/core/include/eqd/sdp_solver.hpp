#pragma once

#include <vector>

#include "eqd/kinship.hpp"

namespace eqd {

/// One equality row  A_i . X + a_i x = b_i.  A_i is either a dense
/// symmetric matrix or, when `u` is non-empty, the rank-one matrix u u'.
struct SdpConstraint {
  Matrix dense;
  Vector u;
  /// Coefficient on each LP variable.
  Vector lp;
  double rhs = 0.0;
};

/// minimize    C . X + c' x
/// subject to  A_i . X + a_i' x = b_i,  X psd,  x >= 0
struct DenseSdpProblem {
  Matrix C;
  Vector c_lp;
  std::vector<SdpConstraint> rows;
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 100;
  /// Accepted as NearOptimal when the best iterate reaches this level.
  double near_tol = 1e-5;
};

enum class SdpStatus { Optimal, NearOptimal, Failed };

struct DenseSdpSolution {
  SdpStatus status = SdpStatus::Failed;
  Matrix X;
  Vector x_lp;
  Vector y;
  Matrix S;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
};

/// Infeasible primal-dual path following with the HKM direction and a
/// Mehrotra predictor-corrector. Rows and objective are normalized
/// internally; reported values are in the original scaling.
DenseSdpSolution solve_dense_sdp(const DenseSdpProblem& problem, const SdpOptions& options = {});

}  // namespace eqd
