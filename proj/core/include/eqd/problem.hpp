#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "eqd/kinship.hpp"

namespace eqd {

/// Raw equal-deployment instance: pick exactly N of Z candidates, each
/// contributing 1/N, maximizing g'x subject to x'Ax <= 2 theta.
struct EdInstance {
  std::shared_ptr<const KinshipSystem> kin;
  Vector g;
  /// The cap 2 theta on x'Ax.
  double theta2 = 0.0;
  int n = 0;
  Vector lower;
  Vector upper;

  std::size_t size() const noexcept { return static_cast<std::size_t>(g.size()); }
};

/// Checks the instance invariants; throws InputError.
void validate(const EdInstance& inst);

/// Instance with free bounds l = 0, u = 1.
EdInstance make_instance(std::shared_ptr<const KinshipSystem> kin, Vector g,
                         double theta2, int n);

/// Feasibility of a quadratic value against 2 theta, with a relative
/// round-off allowance of 1e-12.
bool within_cap(double xax, double theta2);

/// Fixed/variable split and the transformed constants of the signed
/// reformulation y_V = 2N x_V - e.
struct PreprocessedInstance {
  EdInstance inst;

  /// Variable indices, by descending g (ties by index).
  std::vector<int> V;
  /// Fixed indices, ascending.
  std::vector<int> F;
  /// Fixed values over F, each 0 or 1/N.
  Vector cF;
  /// Number of indices fixed at 1/N.
  int p = 0;

  Vector gbarV;
  double gbar = 0.0;
  Vector cbarF;
  double thetabar = 0.0;
  std::int64_t Nbar = 0;

  double gmin = 0.0;
  /// Trace(A_VV) and e'A_VV e.
  double traceVV = 0.0;
  double sumVV = 0.0;

  /// V followed by F: maps reformulated positions to original indices.
  std::vector<int> perm;

  int free_count() const noexcept { return static_cast<int>(V.size()); }
  /// N - p, the number of +1 entries any feasible y_V has.
  int picks() const noexcept { return inst.n - p; }
  /// (Nbar^2 + |V|^2 - 2|V|) / 4.
  std::int64_t Nhat() const;

  double inv_n() const noexcept { return 1.0 / inst.n; }

  /// Dense A_VV in V order.
  Matrix a_vv() const;

  /// x_V = (y + e)/(2N) on V, c_F on F.
  Vector x_from_y(const Vector& yV) const;
  /// y_V = 2N x_V - e.
  Vector y_from_x(const Vector& x) const;
  /// 2 gbar_V'y + gbar.
  double transformed_objective(const Vector& yV) const;
  /// +1 on the first N - p entries of V, -1 elsewhere.
  Vector y_hat() const;
};

/// Result when fixing leaves at most one free variable.
struct ForcedSolution {
  Vector x;
  double gx = 0.0;
  double xAx = 0.0;
  bool feasible = false;
};

using PreprocessResult = std::variant<PreprocessedInstance, ForcedSolution>;

/// Fixes x_i = 1/N when l_i > 0 and x_i = 0 when u_i < 1/N.
/// Throws InfeasibleError for contradictory bounds or cardinality.
PreprocessResult preprocess(const EdInstance& inst);

/// preprocess() that treats a forced solution as an InputError.
PreprocessedInstance preprocess_free(const EdInstance& inst);

struct Assumption1Check {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

Assumption1Check check_assumption1(const PreprocessedInstance& pp);

/// Sum of the m smallest strict-upper-triangle entries of A_VV.
double upper_triangle_sum_smallest(const PreprocessedInstance& pp, std::int64_t m);

struct ObjectiveValue {
  double gx = 0.0;
  double xAx = 0.0;
};

ObjectiveValue objective_of(const EdInstance& inst, const Vector& x);

}  // namespace eqd
