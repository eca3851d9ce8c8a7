#pragma once

#include <map>
#include <string>

#include "eqd/problem.hpp"
#include "eqd/relaxation.hpp"
#include "eqd/sdp_solver.hpp"

namespace eqd {

/// Largest |V| handled by the dense SDP solver.
inline constexpr int kMaxSdpFree = 400;

/// Lifted matrix Y = [1 y'; y Y_VV] of the SDP relaxation, rows and
/// columns indexed 0..|V| with V in preprocessing order.
struct SdpSolution {
  Matrix Y;
  Vector yV;
  double objective = 0.0;
  /// Objective of the dual iterate, an upper bound up to its infeasibility.
  double dual_objective = 0.0;
  SolveStatus status = SolveStatus::Failed;
  std::map<std::string, double> residuals;
  int iterations = 0;
  double wall_time = 0.0;
};

enum class SdpForm {
  /// Y = P Yr P' with P spanning the complement of the direction that
  /// every feasible Y annihilates; the cardinality rows become implied.
  Reduced,
  /// The lifted problem as stated, solved to the relaxed 1e-5 level.
  Full,
};

/// maximize 2 gbar_V'y + gbar over the lifted relaxation.
/// Throws CapExceededError when |V| > kMaxSdpFree, InputError when
/// tol < 1e-7, InfeasibleError when the relaxation is empty, and
/// SolverFailure when not even the 1e-5 level is reached.
SdpSolution solve_sdp(const PreprocessedInstance& pp, double tol = 1e-7,
                      SdpForm form = SdpForm::Reduced);

/// The SDP result viewed as a relaxation (x = (y + e)/2N on V).
RelaxationResult to_relaxation(const SdpSolution& sol, const PreprocessedInstance& pp);

/// -2 gbar_V'e.
double rho0_sdp(const PreprocessedInstance& pp);

/// v'Yv along (1, -e/Nbar), or (0, e) when Nbar = 0. Vanishes on every
/// feasible Y, so the relaxation has no interior point.
double check_no_interior(const SdpSolution& sol, const PreprocessedInstance& pp);

/// Largest violation of the linear constraints of the relaxation at Y.
double constraint_violation(const Matrix& Y, const PreprocessedInstance& pp);

}  // namespace eqd
