#pragma once

#include "eqd/problem.hpp"
#include "eqd/relaxation.hpp"
#include "eqd/socp_solver.hpp"

namespace eqd {

/// SOCP relaxation in the variable z = A x:
///   maximize    (A^-1 g)'z
///   subject to  (A^-1 e)'z = 1
///               ||B z|| <= sqrt(2 theta)
///               0 <= [A^-1 z]_i <= 1/N   for i in V
///               [A^-1 z]_i = c_i         for i in F
/// Every row is a sparse product with A^-1; nothing is inverted densely.
struct SocpModel {
  Vector gain;
  Vector aeq;
  SparseMatrix B;
  double theta2 = 0.0;
  double upper = 0.0;
  std::vector<int> box;
  SparseMatrix box_rows;
  std::vector<int> fixed;
  SparseMatrix fixed_rows;
  Vector fixed_values;
  std::shared_ptr<const KinshipSystem> kin;

  /// The model as a minimization in solver form.
  BoxConeProblem to_problem() const;
};

SocpModel build_socp(const PreprocessedInstance& pp);

/// Status Optimal when residuals and relative gap are within tol; x is
/// recovered as A^-1 z. Throws InfeasibleError on a certificate of
/// primal infeasibility and SolverFailure when the method does not reach
/// tolerance.
RelaxationResult solve_socp(const SocpModel& model, double tol = 1e-8, int max_iter = 200);

}  // namespace eqd
