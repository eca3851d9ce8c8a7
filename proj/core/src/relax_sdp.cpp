#include "eqd/relax_sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "eqd/error.hpp"

namespace eqd {

namespace {

// [0 c'; c A_VV]
Matrix quadratic_lift(const PreprocessedInstance& pp, const Matrix& avv) {
  const auto nv = avv.rows();
  Matrix q = Matrix::Zero(nv + 1, nv + 1);
  q.block(1, 1, nv, nv) = avv;
  q.block(0, 1, 1, nv) = pp.cbarF.transpose();
  q.block(1, 0, nv, 1) = pp.cbarF;
  return q;
}

// Direction v with Yv = 0 for every feasible Y.
Vector null_direction(const PreprocessedInstance& pp) {
  const auto n = static_cast<Eigen::Index>(pp.V.size()) + 1;
  Vector v(n);
  if (pp.Nbar != 0) {
    v[0] = 1.0;
    v.tail(n - 1).setConstant(-1.0 / static_cast<double>(pp.Nbar));
  } else {
    v[0] = 0.0;
    v.tail(n - 1).setOnes();
  }
  return v;
}

Matrix lift(const Vector& y) {
  Vector w(y.size() + 1);
  w[0] = 1.0;
  w.tail(y.size()) = y;
  return w * w.transpose();
}

double lifted_quadratic(const PreprocessedInstance& pp, const Matrix& avv, const Matrix& Y) {
  return quadratic_lift(pp, avv).cwiseProduct(Y).sum();
}

// Slack allowed on the quadratic row when it is checked in closed form.
double quad_slack(const PreprocessedInstance& pp) {
  return 1e-12 * std::max(1.0, std::abs(2.0 * pp.thetabar));
}

// N - p is 0 or |V|: y is forced to y_hat.
SdpSolution forced_solution(const PreprocessedInstance& pp, const Matrix& avv) {
  SdpSolution sol;
  sol.yV = pp.y_hat();
  sol.Y = lift(sol.yV);
  if (lifted_quadratic(pp, avv, sol.Y) > 2.0 * pp.thetabar + quad_slack(pp)) {
    throw InfeasibleError("SDP relaxation is infeasible");
  }
  sol.objective = pp.transformed_objective(sol.yV);
  sol.dual_objective = sol.objective;
  sol.status = SolveStatus::Optimal;
  return sol;
}

// |V| = 2 with one pick: y = (t, -t), Y_VV = [1 -1; -1 1], t in [-1, 1].
SdpSolution pair_solution(const PreprocessedInstance& pp, const Matrix& avv) {
  const double base = avv(0, 0) + avv(1, 1) - 2.0 * avv(0, 1);
  const double slope = 2.0 * (pp.cbarF[0] - pp.cbarF[1]);
  const double cap = 2.0 * pp.thetabar + quad_slack(pp);
  const double gain = pp.gbarV[0] - pp.gbarV[1];
  double lo = -1.0;
  double hi = 1.0;
  if (slope > 0.0) {
    hi = std::min(hi, (cap - base) / slope);
  } else if (slope < 0.0) {
    lo = std::max(lo, (cap - base) / slope);
  } else if (base > cap) {
    lo = 1.0;
    hi = -1.0;
  }
  if (lo > hi) {
    throw InfeasibleError("SDP relaxation is infeasible");
  }
  SdpSolution sol;
  const double t = gain >= 0.0 ? hi : lo;
  sol.yV = Vector(2);
  sol.yV << t, -t;
  sol.Y = Matrix(3, 3);
  sol.Y << 1.0, t, -t, t, 1.0, -1.0, -t, -1.0, 1.0;
  sol.objective = pp.transformed_objective(sol.yV);
  sol.dual_objective = sol.objective;
  sol.status = SolveStatus::Optimal;
  return sol;
}

void finish(SdpSolution& sol, const PreprocessedInstance& pp,
            std::chrono::steady_clock::time_point start) {
  sol.residuals["constraints"] = constraint_violation(sol.Y, pp);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sol.Y, Eigen::EigenvaluesOnly);
  sol.residuals["min_eig"] = eig.eigenvalues()[0];
  sol.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SdpSolution solve_sdp(const PreprocessedInstance& pp, double tol, SdpForm form) {
  const auto start = std::chrono::steady_clock::now();
  const auto nv = static_cast<Eigen::Index>(pp.V.size());
  if (nv > kMaxSdpFree) {
    throw CapExceededError("SDP relaxation is limited to |V| <= " +
                           std::to_string(kMaxSdpFree) + " (got " + std::to_string(nv) + ")");
  }
  if (!(tol >= 1e-7)) {
    throw InputError("SDP tolerance must be at least 1e-7");
  }
  const Eigen::Index n = nv + 1;
  const double nbar = static_cast<double>(pp.Nbar);
  const Matrix avv = pp.a_vv();

  if (form == SdpForm::Reduced) {
    if (pp.picks() == 0 || pp.picks() == nv) {
      auto sol = forced_solution(pp, avv);
      finish(sol, pp, start);
      return sol;
    }
    if (nv == 2) {
      auto sol = pair_solution(pp, avv);
      finish(sol, pp, start);
      return sol;
    }
  }

  Matrix C = Matrix::Zero(n, n);
  C.block(0, 1, 1, nv) = -pp.gbarV.transpose();
  C.block(1, 0, nv, 1) = -pp.gbarV;
  Matrix Q = quadratic_lift(pp, avv);

  // Columns of P span the complement of the null direction.
  Matrix P = Matrix::Identity(n, n);
  if (form == SdpForm::Reduced) {
    const Vector v = null_direction(pp).normalized();
    const Matrix vm = v;
    Eigen::HouseholderQR<Matrix> qr(vm);
    const Matrix full = qr.householderQ() * Matrix::Identity(n, n);
    P = full.rightCols(n - 1);
  }

  DenseSdpProblem prob;
  prob.C = P.transpose() * C * P;
  prob.c_lp = Vector::Zero(1);

  SdpConstraint quad;
  quad.dense = P.transpose() * Q * P;
  quad.lp = Vector::Ones(1);
  quad.rhs = 2.0 * pp.thetabar;
  prob.rows.push_back(std::move(quad));

  if (form == SdpForm::Full) {
    SdpConstraint card;
    card.dense = Matrix::Zero(n, n);
    card.dense.block(0, 1, 1, nv).setOnes();
    card.dense.block(1, 0, nv, 1).setOnes();
    card.rhs = 2.0 * nbar;
    prob.rows.push_back(std::move(card));

    SdpConstraint square;
    square.dense = Matrix::Zero(n, n);
    square.dense.block(1, 1, nv, nv).setOnes();
    square.rhs = nbar * nbar;
    prob.rows.push_back(std::move(square));
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    SdpConstraint unit;
    unit.u = P.row(i).transpose();
    unit.rhs = 1.0;
    prob.rows.push_back(std::move(unit));
  }

  SdpOptions opt;
  opt.tol = tol;
  const auto raw = solve_dense_sdp(prob, opt);
  if (raw.status == SdpStatus::Failed) {
    // Smallest attainable quadratic row without the cap.
    DenseSdpProblem phase;
    phase.C = prob.rows.front().dense;
    phase.rows.assign(prob.rows.begin() + 1, prob.rows.end());
    const auto low = solve_dense_sdp(phase, opt);
    if (low.status != SdpStatus::Failed &&
        low.dual_objective > 2.0 * pp.thetabar + 1e-6 * std::max(1.0, std::abs(2.0 * pp.thetabar))) {
      throw InfeasibleError("SDP relaxation is infeasible");
    }
    throw SolverFailure("SDP solver did not converge (error " +
                        std::to_string(std::max({raw.primal_infeasibility,
                                                 raw.dual_infeasibility,
                                                 raw.relative_gap})) +
                        ")");
  }

  SdpSolution sol;
  sol.Y = P * raw.X * P.transpose();
  sol.Y = 0.5 * (sol.Y + sol.Y.transpose());
  sol.yV = sol.Y.block(1, 0, nv, 1);
  sol.objective = pp.transformed_objective(sol.yV);
  sol.dual_objective = -raw.dual_objective + pp.gbar;
  sol.status = raw.status == SdpStatus::Optimal ? SolveStatus::Optimal
                                                : SolveStatus::NearOptimal;
  sol.iterations = raw.iterations;
  sol.residuals["primal"] = raw.primal_infeasibility;
  sol.residuals["dual"] = raw.dual_infeasibility;
  sol.residuals["gap"] = raw.relative_gap;
  finish(sol, pp, start);
  return sol;
}

RelaxationResult to_relaxation(const SdpSolution& sol, const PreprocessedInstance& pp) {
  RelaxationResult out;
  out.kind = RelaxationKind::SDP;
  out.yV = sol.yV;
  out.x = pp.x_from_y(sol.yV);
  out.objective = sol.objective;
  out.status = sol.status;
  out.residuals = sol.residuals;
  out.iterations = sol.iterations;
  out.wall_time = sol.wall_time;
  return out;
}

double rho0_sdp(const PreprocessedInstance& pp) { return -2.0 * pp.gbarV.sum(); }

double check_no_interior(const SdpSolution& sol, const PreprocessedInstance& pp) {
  const Vector v = null_direction(pp);
  return v.dot(sol.Y * v);
}

double constraint_violation(const Matrix& Y, const PreprocessedInstance& pp) {
  const auto nv = Y.rows() - 1;
  const double nbar = static_cast<double>(pp.Nbar);
  const Matrix q = quadratic_lift(pp, pp.a_vv());
  double v = std::max(0.0, q.cwiseProduct(Y).sum() - 2.0 * pp.thetabar);
  v = std::max(v, std::abs(2.0 * Y.block(1, 0, nv, 1).sum() - 2.0 * nbar));
  v = std::max(v, std::abs(Y.block(1, 1, nv, nv).sum() - nbar * nbar));
  for (Eigen::Index i = 0; i <= nv; ++i) {
    v = std::max(v, std::abs(Y(i, i) - 1.0));
  }
  return v;
}

}  // namespace eqd
