#include "eqd/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "eqd/error.hpp"

namespace eqd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest a with X + a dX psd, for X positive definite.
double psd_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) {
    return 0.0;
  }
  const Matrix& l = llt.matrixL();
  Matrix t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym(t), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()[0];
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double lp_step(const Vector& v, const Vector& dv) {
  double a = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) {
      a = std::min(a, -v[i] / dv[i]);
    }
  }
  return a;
}

class HkmSolver {
 public:
  HkmSolver(const DenseSdpProblem& p, const SdpOptions& opt) : opt_(opt) {
    n_ = p.C.rows();
    nlp_ = p.c_lp.size();
    m_ = static_cast<Eigen::Index>(p.rows.size());
    if (p.C.cols() != n_) {
      throw InputError("SDP objective must be square");
    }
    rows_ = p.rows;
    b_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      auto& r = rows_[i];
      if (r.lp.size() == 0) {
        r.lp = Vector::Zero(nlp_);
      }
      const bool rank_one = r.u.size() > 0;
      if (r.lp.size() != nlp_ || (rank_one && r.u.size() != n_) ||
          (!rank_one && (r.dense.rows() != n_ || r.dense.cols() != n_))) {
        throw InputError("SDP constraint has inconsistent dimensions");
      }
      const double nrm2 =
          (rank_one ? std::pow(r.u.squaredNorm(), 2) : r.dense.squaredNorm()) + r.lp.squaredNorm();
      const double nrm = nrm2 > 0.0 ? std::sqrt(nrm2) : 1.0;
      if (rank_one) {
        r.u /= std::sqrt(nrm);
      } else {
        r.dense /= nrm;
      }
      r.lp /= nrm;
      b_[i] = r.rhs / nrm;
      (rank_one ? low_rows_ : dense_rows_).push_back(i);
      row_scale_.push_back(nrm);
    }
    U_.resize(static_cast<Eigen::Index>(low_rows_.size()), n_);
    for (std::size_t k = 0; k < low_rows_.size(); ++k) {
      U_.row(static_cast<Eigen::Index>(k)) = rows_[low_rows_[k]].u.transpose();
    }
    const double cn = std::sqrt(p.C.squaredNorm() + p.c_lp.squaredNorm());
    obj_scale_ = cn > 0.0 ? cn : 1.0;
    C_ = p.C / obj_scale_;
    c_lp_ = p.c_lp / obj_scale_;
    a_lp_.resize(m_, nlp_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      a_lp_.row(i) = rows_[i].lp.transpose();
    }
  }

  DenseSdpSolution run();

 private:
  Vector op(const Matrix& x, const Vector& xl) const {
    Vector out = a_lp_ * xl;
    for (const auto i : dense_rows_) {
      out[i] += rows_[i].dense.cwiseProduct(x).sum();
    }
    if (!low_rows_.empty()) {
      const Vector q = (U_ * x).cwiseProduct(U_).rowwise().sum();
      for (std::size_t k = 0; k < low_rows_.size(); ++k) {
        out[low_rows_[k]] += q[static_cast<Eigen::Index>(k)];
      }
    }
    return out;
  }

  Matrix adj(const Vector& y) const {
    Matrix out = Matrix::Zero(n_, n_);
    for (const auto i : dense_rows_) {
      out += y[i] * rows_[i].dense;
    }
    if (!low_rows_.empty()) {
      Vector yl(static_cast<Eigen::Index>(low_rows_.size()));
      for (std::size_t k = 0; k < low_rows_.size(); ++k) {
        yl[static_cast<Eigen::Index>(k)] = y[low_rows_[k]];
      }
      out += U_.transpose() * yl.asDiagonal() * U_;
    }
    return out;
  }

  const SdpOptions opt_;
  Eigen::Index n_ = 0, nlp_ = 0, m_ = 0;
  std::vector<SdpConstraint> rows_;
  std::vector<double> row_scale_;
  std::vector<Eigen::Index> dense_rows_;
  std::vector<Eigen::Index> low_rows_;
  Matrix U_;
  Vector b_;
  Matrix C_;
  Vector c_lp_;
  Matrix a_lp_;
  double obj_scale_ = 1.0;
};

DenseSdpSolution HkmSolver::run() {
  const double dim = static_cast<double>(n_ + nlp_);
  const double bnorm = b_.norm();
  const double cnorm = std::sqrt(C_.squaredNorm() + c_lp_.squaredNorm());

  double xi = std::max(10.0, std::sqrt(static_cast<double>(n_)));
  for (Eigen::Index i = 0; i < m_; ++i) {
    xi = std::max(xi, static_cast<double>(n_) * (1.0 + std::abs(b_[i])) / 2.0);
  }
  const double eta = std::max({10.0, std::sqrt(static_cast<double>(n_)), 1.0 + cnorm});

  Matrix X = xi * Matrix::Identity(n_, n_);
  Matrix S = eta * Matrix::Identity(n_, n_);
  Vector xl = Vector::Constant(nlp_, xi);
  Vector zl = Vector::Constant(nlp_, eta);
  Vector y = Vector::Zero(m_);

  DenseSdpSolution best;
  double best_err = kInf;
  const auto unscale = [&](DenseSdpSolution& out, double pinf, double dinf, double gap,
                           int iter) {
    out.X = X;
    out.x_lp = xl;
    out.y = Vector(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      out.y[i] = y[i] * obj_scale_ / row_scale_[i];
    }
    out.S = S * obj_scale_;
    out.primal_objective = (C_.cwiseProduct(X).sum() + c_lp_.dot(xl)) * obj_scale_;
    out.dual_objective = b_.dot(y) * obj_scale_;
    out.primal_infeasibility = pinf;
    out.dual_infeasibility = dinf;
    out.relative_gap = gap;
    out.iterations = iter;
  };

  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    const Vector rp = b_ - op(X, xl);
    const Matrix rd = C_ - adj(y) - S;
    const Vector rdl = c_lp_ - a_lp_.transpose() * y - zl;
    const double pobj = C_.cwiseProduct(X).sum() + c_lp_.dot(xl);
    const double dobj = b_.dot(y);
    const double pinf = rp.norm() / (1.0 + bnorm);
    const double dinf = std::sqrt(rd.squaredNorm() + rdl.squaredNorm()) / (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double err = std::max({pinf, dinf, gap});
    if (err < best_err) {
      best_err = err;
      unscale(best, pinf, dinf, gap, iter);
    }
    if (err <= opt_.tol) {
      best.status = SdpStatus::Optimal;
      return best;
    }
    if (iter == opt_.max_iter) {
      break;
    }

    const double mu = (X.cwiseProduct(S).sum() + xl.dot(zl)) / dim;
    Eigen::LLT<Matrix> sllt(S);
    if (sllt.info() != Eigen::Success) {
      break;
    }
    const Matrix sinv = sym(sllt.solve(Matrix::Identity(n_, n_)));

    // Schur complement M_ij = A_i . (X A_j S^-1) + LP part.
    Matrix M(m_, m_);
    std::vector<Matrix> g(static_cast<std::size_t>(m_));
    for (const auto i : dense_rows_) {
      g[i] = X * rows_[i].dense * sinv;
    }
    const Matrix ux = U_ * X;
    const Matrix us = U_ * sinv;
    for (std::size_t a = 0; a < dense_rows_.size(); ++a) {
      const auto i = dense_rows_[a];
      for (std::size_t b = a; b < dense_rows_.size(); ++b) {
        const auto j = dense_rows_[b];
        M(i, j) = M(j, i) = g[i].cwiseProduct(rows_[j].dense).sum();
      }
      if (!low_rows_.empty()) {
        const Vector q = (U_ * g[i]).cwiseProduct(U_).rowwise().sum();
        for (std::size_t k = 0; k < low_rows_.size(); ++k) {
          M(i, low_rows_[k]) = M(low_rows_[k], i) = q[static_cast<Eigen::Index>(k)];
        }
      }
    }
    if (!low_rows_.empty()) {
      const Matrix block = (ux * U_.transpose()).cwiseProduct(us * U_.transpose());
      for (std::size_t k = 0; k < low_rows_.size(); ++k) {
        for (std::size_t l = 0; l < low_rows_.size(); ++l) {
          M(low_rows_[k], low_rows_[l]) =
              block(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
        }
      }
    }
    if (nlp_ > 0) {
      M += a_lp_ * (xl.cwiseQuotient(zl)).asDiagonal() * a_lp_.transpose();
    }
    Eigen::LDLT<Matrix> mfac(sym(M));
    if (mfac.info() != Eigen::Success) {
      break;
    }

    const Matrix x_rd_sinv = sym(X * rd * sinv);
    struct Dir {
      Matrix dX, dS;
      Vector dxl, dzl, dy;
    };
    const auto direction = [&](const Matrix& rc, const Vector& rcl) {
      Dir d;
      const Matrix rc_sinv = sym(rc * sinv);
      Vector rhs = rp - op(rc_sinv, rcl.cwiseQuotient(zl)) + op(x_rd_sinv, xl.cwiseProduct(rdl).cwiseQuotient(zl));
      d.dy = mfac.solve(rhs);
      d.dS = rd - adj(d.dy);
      d.dzl = rdl - a_lp_.transpose() * d.dy;
      d.dX = sym((rc - X * d.dS) * sinv);
      d.dxl = (rcl - xl.cwiseProduct(d.dzl)).cwiseQuotient(zl);
      return d;
    };

    const Matrix I = Matrix::Identity(n_, n_);
    const Dir aff = direction(-X * S, -xl.cwiseProduct(zl));
    const double ap_aff = std::min(1.0, std::min(psd_step(X, aff.dX), lp_step(xl, aff.dxl)));
    const double ad_aff = std::min(1.0, std::min(psd_step(S, aff.dS), lp_step(zl, aff.dzl)));
    const double mu_aff = ((X + ap_aff * aff.dX).cwiseProduct(S + ad_aff * aff.dS).sum() +
                           (xl + ap_aff * aff.dxl).dot(zl + ad_aff * aff.dzl)) /
                          dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3), 0.0, 1.0);

    const Dir cor = direction(sigma * mu * I - X * S - aff.dX * aff.dS,
                              Vector::Constant(nlp_, sigma * mu) - xl.cwiseProduct(zl) -
                                  aff.dxl.cwiseProduct(aff.dzl));
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    const double ap = std::min(1.0, gamma * std::min(psd_step(X, cor.dX), lp_step(xl, cor.dxl)));
    const double ad = std::min(1.0, gamma * std::min(psd_step(S, cor.dS), lp_step(zl, cor.dzl)));
    if (!(ap > 1e-14) && !(ad > 1e-14)) {
      break;
    }
    X = sym(X + ap * cor.dX);
    xl += ap * cor.dxl;
    S = sym(S + ad * cor.dS);
    zl += ad * cor.dzl;
    y += ad * cor.dy;
  }

  best.status = best_err <= opt_.near_tol ? SdpStatus::NearOptimal : SdpStatus::Failed;
  return best;
}

}  // namespace

DenseSdpSolution solve_dense_sdp(const DenseSdpProblem& problem, const SdpOptions& options) {
  if (!(options.tol > 0.0)) {
    throw InputError("SDP tolerance must be positive");
  }
  HkmSolver solver(problem, options);
  return solver.run();
}

}  // namespace eqd
