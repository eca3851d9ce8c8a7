#include "eqd/socp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "eqd/error.hpp"

namespace eqd {

std::string_view to_string(ConicStatus status) {
  switch (status) {
    case ConicStatus::Optimal:
      return "optimal";
    case ConicStatus::NearOptimal:
      return "near_optimal";
    case ConicStatus::PrimalInfeasible:
      return "primal_infeasible";
    case ConicStatus::DualInfeasible:
      return "dual_infeasible";
    case ConicStatus::MaxIterations:
      return "max_iterations";
    case ConicStatus::Stalled:
      return "stalled";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack and multiplier vectors are laid out as
//   [ lower box (nb) | upper box (nb) | cone head (1) | cone tail (nq) ].
class BoxConeIpm {
 public:
  BoxConeIpm(const BoxConeProblem& p, const ConicOptions& opt)
      : p_(p),
        opt_(opt),
        nx_(p.c.size()),
        m_(p.aeq.rows()),
        nb_(p.box.rows()),
        nq_(p.cone.rows()),
        nl_(2 * nb_),
        nz_(2 * nb_ + 1 + nq_) {
    check_dimensions();
    box_t_ = p.box.transpose();
    cone_t_ = p.cone.transpose();
    aeq_t_ = p.aeq.transpose();
    ctc_ = cone_t_ * p.cone;
    h_ = Vector::Zero(nz_);
    h_.segment(nb_, nb_) = p.box_upper;
    h_[nl_] = p.radius;
    d_ = Vector::Ones(nl_);
    eta_ = 1.0;
    w_ = Vector::Zero(1 + nq_);
    w_[0] = 1.0;
  }

  ConicSolution run();

 private:
  void check_dimensions() const {
    if (p_.aeq.cols() != nx_ || p_.beq.size() != m_ || p_.box.cols() != nx_ ||
        p_.box_upper.size() != nb_ || p_.cone.cols() != nx_) {
      throw InputError("box-cone problem has inconsistent dimensions");
    }
    if (!(p_.radius >= 0.0)) {
      throw InputError("cone radius must be nonnegative");
    }
  }

  // G x = [-R x; R x; 0; -C x].
  Vector g_mul(const Vector& x) const {
    Vector out(nz_);
    const Vector rx = p_.box * x;
    out.head(nb_) = -rx;
    out.segment(nb_, nb_) = rx;
    out[nl_] = 0.0;
    out.tail(nq_) = -(p_.cone * x);
    return out;
  }

  Vector gt_mul(const Vector& z) const {
    return box_t_ * (z.segment(nb_, nb_) - z.head(nb_)) - cone_t_ * z.tail(nq_);
  }

  // --- cone algebra -------------------------------------------------------

  Vector identity() const {
    Vector e = Vector::Zero(nz_);
    e.head(nl_).setOnes();
    e[nl_] = 1.0;
    return e;
  }

  Vector jordan(const Vector& u, const Vector& v) const {
    Vector out(nz_);
    out.head(nl_) = u.head(nl_).cwiseProduct(v.head(nl_));
    out[nl_] = u.tail(1 + nq_).dot(v.tail(1 + nq_));
    out.tail(nq_) = u[nl_] * v.tail(nq_) + v[nl_] * u.tail(nq_);
    return out;
  }

  // Solves lambda o x = r.
  Vector jordan_div(const Vector& lam, const Vector& r) const {
    Vector out(nz_);
    out.head(nl_) = r.head(nl_).cwiseQuotient(lam.head(nl_));
    const double l0 = lam[nl_];
    const auto l1 = lam.tail(nq_);
    const double det = (l0 - l1.norm()) * (l0 + l1.norm());
    const double x0 = (l0 * r[nl_] - l1.dot(r.tail(nq_))) / det;
    out[nl_] = x0;
    out.tail(nq_) = (r.tail(nq_) - x0 * l1) / l0;
    return out;
  }

  // Largest t with v + t e outside the interior, i.e. -min eigenvalue.
  double max_neg_eig(const Vector& v) const {
    double t = -kInf;
    if (nl_ > 0) {
      t = -v.head(nl_).minCoeff();
    }
    return std::max(t, v.tail(nq_).norm() - v[nl_]);
  }

  // Max step a with lam + a dir in the cone (lam interior).
  double max_step(const Vector& lam, const Vector& dir) const {
    double amax = kInf;
    for (Eigen::Index i = 0; i < nl_; ++i) {
      if (dir[i] < 0.0) {
        amax = std::min(amax, -lam[i] / dir[i]);
      }
    }
    const double l0 = lam[nl_];
    const auto l1 = lam.tail(nq_);
    const double aa = std::sqrt((l0 - l1.norm()) * (l0 + l1.norm()));
    const double ln0 = l0 / aa;
    const Vector ln1 = l1 / aa;
    const double x0 = dir[nl_];
    const auto x1 = dir.tail(nq_);
    const double rho0 = (ln0 * x0 - ln1.dot(x1)) / aa;
    const Vector rho1 = (x1 - (x0 - ln1.dot(x1) / (1.0 + ln0)) * ln1) / aa;
    const double t = rho1.norm() - rho0;
    if (t > 0.0) {
      amax = std::min(amax, 1.0 / t);
    }
    return amax;
  }

  // --- scaling ------------------------------------------------------------

  bool update_scaling(const Vector& s, const Vector& z) {
    for (Eigen::Index i = 0; i < nl_; ++i) {
      if (!(s[i] > 0.0) || !(z[i] > 0.0)) {
        return false;
      }
      d_[i] = std::sqrt(s[i] / z[i]);
    }
    const double s0 = s[nl_];
    const double z0 = z[nl_];
    const double s1n = s.tail(nq_).norm();
    const double z1n = z.tail(nq_).norm();
    const double sn2 = (s0 - s1n) * (s0 + s1n);
    const double zn2 = (z0 - z1n) * (z0 + z1n);
    if (!(s0 > s1n) || !(z0 > z1n) || !(sn2 > 0.0) || !(zn2 > 0.0)) {
      return false;
    }
    const double sn = std::sqrt(sn2);
    const double zn = std::sqrt(zn2);
    const Vector sb = s.tail(1 + nq_) / sn;
    const Vector zb = z.tail(1 + nq_) / zn;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    w_[0] = (sb[0] + zb[0]) / (2.0 * gamma);
    w_.tail(nq_) = (sb.tail(nq_) - zb.tail(nq_)) / (2.0 * gamma);
    eta_ = std::sqrt(sn / zn);
    lambda_ = w_mul(z);
    return true;
  }

  Vector w_mul(const Vector& v) const {
    Vector out(nz_);
    out.head(nl_) = d_.cwiseProduct(v.head(nl_));
    const double w0 = w_[0];
    const auto w1 = w_.tail(nq_);
    const double v0 = v[nl_];
    const auto v1 = v.tail(nq_);
    const double w1v1 = w1.dot(v1);
    out[nl_] = eta_ * (w0 * v0 + w1v1);
    out.tail(nq_) = eta_ * (v0 * w1 + v1 + (w1v1 / (1.0 + w0)) * w1);
    return out;
  }

  Vector w_inv_mul(const Vector& v) const {
    Vector out(nz_);
    out.head(nl_) = v.head(nl_).cwiseQuotient(d_);
    const double w0 = w_[0];
    const auto w1 = w_.tail(nq_);
    const double v0 = v[nl_];
    const auto v1 = v.tail(nq_);
    const double w1v1 = w1.dot(v1);
    out[nl_] = (w0 * v0 - w1v1) / eta_;
    out.tail(nq_) = (-v0 * w1 + v1 + (w1v1 / (1.0 + w0)) * w1) / eta_;
    return out;
  }

  Vector w2_mul(const Vector& v) const { return w_mul(w_mul(v)); }
  Vector w2_inv_mul(const Vector& v) const { return w_inv_mul(w_inv_mul(v)); }

  // --- KKT system ---------------------------------------------------------
  //   [ 0  A'  G'  ] [dx]   [bx]
  //   [ A  0   0   ] [dy] = [by]
  //   [ G  0  -W^2 ] [dz]   [bz]

  bool factor() {
    Vector diag(nb_);
    for (Eigen::Index i = 0; i < nb_; ++i) {
      diag[i] = 1.0 / (d_[i] * d_[i]) + 1.0 / (d_[nb_ + i] * d_[nb_ + i]);
    }
    const double inv_eta2 = 1.0 / (eta_ * eta_);
    const SparseMatrix scaled = diag.asDiagonal() * p_.box;
    SparseMatrix s = box_t_ * scaled + inv_eta2 * ctc_;
    chol_.compute(s);
    if (chol_.info() != Eigen::Success) {
      return false;
    }
    rank1_ = 2.0 * inv_eta2;
    v_ = cone_t_ * w_.tail(nq_);
    sinv_v_ = chol_.solve(v_);
    rank1_den_ = 1.0 + rank1_ * v_.dot(sinv_v_);

    if (m_ > 0) {
      u_.resize(nx_, m_);
      for (Eigen::Index j = 0; j < m_; ++j) {
        u_.col(j) = h_solve(Vector(aeq_t_.col(j)));
      }
      const Matrix schur = p_.aeq * u_;
      schur_.compute(0.5 * (schur + schur.transpose()));
      if (schur_.info() != Eigen::Success) {
        return false;
      }
    }
    return true;
  }

  Vector h_solve(const Vector& r) const {
    Vector t = chol_.solve(r);
    t -= (rank1_ * v_.dot(t) / rank1_den_) * sinv_v_;
    return t;
  }

  struct Direction {
    Vector x;
    Vector y;
    Vector z;
  };

  Direction kkt_solve_once(const Vector& bx, const Vector& by, const Vector& bz) const {
    Direction d;
    const Vector rt = bx + gt_mul(w2_inv_mul(bz));
    const Vector t = h_solve(rt);
    if (m_ > 0) {
      d.y = schur_.solve(p_.aeq * t - by);
      d.x = t - u_ * d.y;
    } else {
      d.y = Vector::Zero(0);
      d.x = t;
    }
    d.z = w2_inv_mul(g_mul(d.x) - bz);
    return d;
  }

  Direction kkt_solve(const Vector& bx, const Vector& by, const Vector& bz) const {
    Direction d = kkt_solve_once(bx, by, bz);
    for (int k = 0; k < opt_.refine; ++k) {
      const Vector r1 = bx - (aeq_t_ * d.y + gt_mul(d.z));
      const Vector r2 = by - p_.aeq * d.x;
      const Vector r3 = bz - (g_mul(d.x) - w2_mul(d.z));
      const double scale = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(),
                                           by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                           bz.lpNorm<Eigen::Infinity>()});
      const double err = std::max({r1.lpNorm<Eigen::Infinity>(),
                                   r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0,
                                   r3.lpNorm<Eigen::Infinity>()});
      if (err <= 1e-15 * scale) {
        break;
      }
      const Direction c = kkt_solve_once(r1, r2, r3);
      d.x += c.x;
      d.y += c.y;
      d.z += c.z;
    }
    return d;
  }

  const BoxConeProblem& p_;
  ConicOptions opt_;
  Eigen::Index nx_, m_, nb_, nq_, nl_, nz_;
  SparseMatrix box_t_, cone_t_, aeq_t_, ctc_;
  Vector h_;

  Vector d_;
  double eta_ = 1.0;
  Vector w_;
  Vector lambda_;

  Eigen::SimplicialLLT<SparseMatrix> chol_;
  double rank1_ = 0.0;
  Vector v_;
  Vector sinv_v_;
  double rank1_den_ = 1.0;
  Matrix u_;
  Eigen::LLT<Matrix> schur_;
};

ConicSolution BoxConeIpm::run() {
  const Vector& c = p_.c;
  const Vector& b = p_.beq;
  const Vector& h = h_;
  const double deg = static_cast<double>(nl_ + 1);
  const Vector e = identity();

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.size() ? b.norm() : 0.0);
  const double resz0 = std::max(1.0, h.norm());

  // Starting point: least-squares primal and least-norm dual with W = I,
  // shifted into the cone interior.
  if (!factor()) {
    throw SolverFailure("SOCP: initial KKT factorization failed");
  }
  Direction primal = kkt_solve(Vector::Zero(nx_), b, h);
  Vector x = primal.x;
  Vector s = -primal.z;
  Direction dual = kkt_solve(-c, Vector::Zero(m_), Vector::Zero(nz_));
  Vector y = dual.y;
  Vector z = dual.z;
  {
    const double ts = max_neg_eig(s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) {
      s += (1.0 + ts) * e;
    }
    const double tz = max_neg_eig(z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) {
      z += (1.0 + tz) * e;
    }
  }
  double tau = 1.0;
  double kappa = 1.0;

  ConicSolution sol;
  sol.status = ConicStatus::MaxIterations;

  double best_pres = kInf, best_dres = kInf, best_gap = kInf;
  const auto record = [&](double pres, double dres, double relgap) {
    sol.x = x / tau;
    sol.y = y / tau;
    sol.z_lower = z.head(nb_) / tau;
    sol.z_upper = z.segment(nb_, nb_) / tau;
    sol.z_cone = z.tail(1 + nq_) / tau;
    sol.primal_objective = c.dot(x) / tau;
    sol.dual_objective = -(b.dot(y) + h.dot(z)) / tau;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.gap = relgap;
  };

  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    sol.iterations = iter;
    if (!update_scaling(s, z)) {
      sol.status = ConicStatus::Stalled;
      break;
    }

    const Vector hrx = aeq_t_ * y + gt_mul(z);
    const Vector hry = p_.aeq * x;
    const Vector hrz = g_mul(x) + s;
    const Vector rx = hrx + tau * c;
    const Vector ry = hry - tau * b;
    const Vector rz = hrz - tau * h;
    const double cx = c.dot(x);
    const double by = b.dot(y);
    const double hz = h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (deg + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(ry.size() ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double absgap = sz / (tau * tau);
    const double relgap = absgap / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

    if (pres <= opt_.tol && dres <= opt_.tol && (relgap <= opt_.tol || absgap <= opt_.tol)) {
      record(pres, dres, relgap);
      sol.status = ConicStatus::Optimal;
      return sol;
    }
    if (pres <= best_pres * 10.0 && dres <= best_dres * 10.0) {
      best_pres = std::min(best_pres, pres);
      best_dres = std::min(best_dres, dres);
      best_gap = std::min(best_gap, relgap);
      record(pres, dres, relgap);
    }
    if (by + hz < 0.0) {
      const double pinf = hrx.norm() / resx0 / -(by + hz);
      if (pinf <= opt_.tol) {
        sol.status = ConicStatus::PrimalInfeasible;
        return sol;
      }
    }
    if (cx < 0.0) {
      const double dinf =
          std::max(hry.size() ? hry.norm() / resy0 : 0.0, hrz.norm() / resz0) / -cx;
      if (dinf <= opt_.tol) {
        sol.status = ConicStatus::DualInfeasible;
        return sol;
      }
    }
    if (iter == opt_.max_iter) {
      break;
    }

    if (!factor()) {
      sol.status = ConicStatus::Stalled;
      break;
    }
    const Direction up = kkt_solve(-c, b, h);
    const double up_dot = c.dot(up.x) + b.dot(up.y) + h.dot(up.z);

    struct Step {
      Direction d;
      Vector ds;
      double dtau;
      double dkappa;
    };
    const auto direction = [&](double sigma, const Vector& corr, double corr_tau) {
      const Vector rs = jordan_div(lambda_, sigma * mu * e - jordan(lambda_, lambda_) - corr);
      const Vector wrs = w_mul(rs);
      const double keep = 1.0 - sigma;
      const Direction uq = kkt_solve(-keep * rx, -keep * ry, -keep * rz - wrs);
      const double comp_tau = sigma * mu - tau * kappa - corr_tau;
      const double rhs_tau = -keep * rt - comp_tau / tau;
      const double uq_dot = c.dot(uq.x) + b.dot(uq.y) + h.dot(uq.z);
      Step st;
      st.dtau = (rhs_tau - uq_dot) / (up_dot - kappa / tau);
      st.d.x = uq.x + st.dtau * up.x;
      st.d.y = uq.y + st.dtau * up.y;
      st.d.z = uq.z + st.dtau * up.z;
      st.ds = wrs - w2_mul(st.d.z);
      st.dkappa = (comp_tau - kappa * st.dtau) / tau;
      return st;
    };
    const auto step_length = [&](const Step& st, Vector& ds_scaled, Vector& dz_scaled) {
      ds_scaled = w_inv_mul(st.ds);
      dz_scaled = w_mul(st.d.z);
      double amax = std::min(max_step(lambda_, ds_scaled), max_step(lambda_, dz_scaled));
      if (st.dtau < 0.0) {
        amax = std::min(amax, -tau / st.dtau);
      }
      if (st.dkappa < 0.0) {
        amax = std::min(amax, -kappa / st.dkappa);
      }
      return amax;
    };

    Vector ds_aff, dz_aff;
    const Step aff = direction(0.0, Vector::Zero(nz_), 0.0);
    const double alpha_aff = std::min(1.0, step_length(aff, ds_aff, dz_aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    Vector ds_sc, dz_sc;
    const Step full =
        direction(sigma, jordan(ds_aff, dz_aff), aff.dtau * aff.dkappa);
    const double alpha = std::min(1.0, 0.99 * step_length(full, ds_sc, dz_sc));
    if (!(alpha > 1e-12)) {
      sol.status = ConicStatus::Stalled;
      break;
    }

    x += alpha * full.d.x;
    y += alpha * full.d.y;
    z += alpha * full.d.z;
    s += alpha * full.ds;
    tau += alpha * full.dtau;
    kappa += alpha * full.dkappa;
  }

  if (best_pres <= std::sqrt(opt_.tol) * 1e-2 && best_dres <= std::sqrt(opt_.tol) * 1e-2 &&
      best_gap <= std::sqrt(opt_.tol) * 1e-2) {
    sol.status = ConicStatus::NearOptimal;
  }
  return sol;
}

}  // namespace

ConicSolution solve_box_cone(const BoxConeProblem& problem, const ConicOptions& options) {
  if (!(options.tol > 0.0)) {
    throw InputError("solver tolerance must be positive");
  }
  BoxConeIpm ipm(problem, options);
  return ipm.run();
}

}  // namespace eqd
