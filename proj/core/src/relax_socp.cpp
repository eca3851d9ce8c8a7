#include "eqd/relax_socp.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "eqd/error.hpp"

namespace eqd {

namespace {

SparseMatrix select_rows(const SparseMatrix& m, const std::vector<int>& rows) {
  std::vector<Eigen::Triplet<double>> t;
  const SparseMatrix mt = m.transpose();  // column k of mt is row k of m
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (SparseMatrix::InnerIterator it(mt, rows[r]); it; ++it) {
      t.emplace_back(static_cast<int>(r), static_cast<int>(it.row()), it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

SocpModel build_socp(const PreprocessedInstance& pp) {
  const auto& kin = *pp.inst.kin;
  SocpModel m;
  m.kin = pp.inst.kin;
  m.gain = kin.apply_inverse(pp.inst.g);
  m.aeq = kin.apply_inverse(Vector::Ones(static_cast<Eigen::Index>(kin.size())));
  m.B = kin.factor();
  m.theta2 = pp.inst.theta2;
  m.upper = pp.inv_n();
  m.box = pp.V;
  m.box_rows = select_rows(kin.inverse(), pp.V);
  m.fixed = pp.F;
  m.fixed_rows = select_rows(kin.inverse(), pp.F);
  m.fixed_values = pp.cF;
  return m;
}

BoxConeProblem SocpModel::to_problem() const {
  BoxConeProblem p;
  p.c = -gain;
  const auto nf = static_cast<Eigen::Index>(fixed.size());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < aeq.size(); ++j) {
    if (aeq[j] != 0.0) {
      t.emplace_back(0, static_cast<int>(j), aeq[j]);
    }
  }
  for (int k = 0; k < fixed_rows.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(fixed_rows, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()) + 1, static_cast<int>(it.col()), it.value());
    }
  }
  p.aeq.resize(1 + nf, aeq.size());
  p.aeq.setFromTriplets(t.begin(), t.end());
  p.beq.resize(1 + nf);
  p.beq[0] = 1.0;
  p.beq.tail(nf) = fixed_values;
  p.box = box_rows;
  p.box_upper = Vector::Constant(static_cast<Eigen::Index>(box.size()), upper);
  p.cone = B;
  p.radius = std::sqrt(theta2);
  return p;
}

RelaxationResult solve_socp(const SocpModel& model, double tol, int max_iter) {
  if (!(tol > 0.0)) {
    throw InputError("tol must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  ConicOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  const auto sol = solve_box_cone(model.to_problem(), opt);

  switch (sol.status) {
    case ConicStatus::Optimal:
    case ConicStatus::NearOptimal:
      break;
    case ConicStatus::PrimalInfeasible:
      throw InfeasibleError("SOCP relaxation is infeasible");
    default:
      throw SolverFailure("SOCP solver stopped (" + std::string(to_string(sol.status)) +
                          ") after " + std::to_string(sol.iterations) + " iterations");
  }

  RelaxationResult out;
  out.kind = RelaxationKind::SOCP;
  out.x = model.kin->apply_inverse(sol.x);
  out.objective = model.gain.dot(sol.x);
  out.status = sol.status == ConicStatus::Optimal ? SolveStatus::Optimal
                                                  : SolveStatus::NearOptimal;
  out.iterations = sol.iterations;
  out.residuals["primal"] = sol.primal_residual;
  out.residuals["dual"] = sol.dual_residual;
  out.residuals["gap"] = sol.gap;
  out.residuals["sum"] = std::abs(out.x.sum() - 1.0);
  out.residuals["xAx"] = sol.x.dot(out.x);
  double box = 0.0;
  for (const int i : model.box) {
    box = std::max({box, -out.x[i], out.x[i] - model.upper});
  }
  out.residuals["box"] = box;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace eqd
