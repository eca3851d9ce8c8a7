#include "eqd/kinship.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "eqd/error.hpp"

namespace eqd {

namespace {

constexpr double kMendelianFloor = 1e-12;

double mendelian_variance(int sire, int dam, const Vector& diag) {
  double d = 1.0;
  if (sire != Pedigree::kNone) {
    d -= 0.25 * diag[sire];
  }
  if (dam != Pedigree::kNone) {
    d -= 0.25 * diag[dam];
  }
  return d;
}

}  // namespace

KinshipSystem KinshipSystem::build(const Pedigree& pedigree, std::size_t dense_limit) {
  if (dense_limit > kMaxDenseLimit) {
    throw CapExceededError("dense numerator storage is capped at Z <= " +
                           std::to_string(kMaxDenseLimit));
  }
  const auto z = static_cast<int>(pedigree.size());

  KinshipSystem sys;
  sys.sire_.resize(z);
  sys.dam_.resize(z);
  for (int i = 0; i < z; ++i) {
    sys.sire_[i] = pedigree.sire_position(i);
    sys.dam_[i] = pedigree.dam_position(i);
  }
  sys.d_.resize(z);
  sys.diag_.resize(z);

  const auto check_d = [&](int i) {
    if (!(sys.d_[i] >= kMendelianFloor)) {
      throw SingularityError("Mendelian sampling variance of id " +
                             std::to_string(pedigree[i].id) + " is " +
                             std::to_string(sys.d_[i]));
    }
  };

  if (static_cast<std::size_t>(z) <= dense_limit) {
    // Tabular method.
    Matrix a = Matrix::Zero(z, z);
    for (int i = 0; i < z; ++i) {
      const int s = sys.sire_[i];
      const int d = sys.dam_[i];
      for (int j = 0; j < i; ++j) {
        double v = 0.0;
        if (s != Pedigree::kNone) {
          v += 0.5 * a(j, s);
        }
        if (d != Pedigree::kNone) {
          v += 0.5 * a(j, d);
        }
        a(i, j) = v;
        a(j, i) = v;
      }
      a(i, i) = 1.0 + ((s != Pedigree::kNone && d != Pedigree::kNone) ? 0.5 * a(s, d) : 0.0);
      sys.d_[i] = mendelian_variance(s, d, a.diagonal());
      check_d(i);
    }
    sys.diag_ = a.diagonal();
    sys.dense_ = std::move(a);
  } else {
    // A_ii = sum_k T_ik^2 d_k over the ancestors k of i; row i of T is
    // accumulated by a descending sweep over the ancestor set.
    Vector t = Vector::Zero(z);
    std::vector<char> queued(z, 0);
    std::vector<int> touched;
    std::priority_queue<int> pending;
    for (int i = 0; i < z; ++i) {
      sys.d_[i] = mendelian_variance(sys.sire_[i], sys.dam_[i], sys.diag_);
      check_d(i);
      double acc = 0.0;
      t[i] = 1.0;
      queued[i] = 1;
      touched.push_back(i);
      pending.push(i);
      while (!pending.empty()) {
        const int k = pending.top();
        pending.pop();
        acc += t[k] * t[k] * sys.d_[k];
        for (const int p : {sys.sire_[k], sys.dam_[k]}) {
          if (p == Pedigree::kNone) {
            continue;
          }
          t[p] += 0.5 * t[k];
          if (!queued[p]) {
            queued[p] = 1;
            touched.push_back(p);
            pending.push(p);
          }
        }
      }
      sys.diag_[i] = acc;
      for (const int k : touched) {
        t[k] = 0.0;
        queued[k] = 0;
      }
      touched.clear();
    }
  }

  // Henderson's rules for A^-1, and B = D^-1/2 (I - Q).
  std::vector<Eigen::Triplet<double>> inv;
  std::vector<Eigen::Triplet<double>> fac;
  inv.reserve(9 * static_cast<std::size_t>(z));
  fac.reserve(3 * static_cast<std::size_t>(z));
  for (int i = 0; i < z; ++i) {
    const double alpha = 1.0 / sys.d_[i];
    const double root = 1.0 / std::sqrt(sys.d_[i]);
    inv.emplace_back(i, i, alpha);
    fac.emplace_back(i, i, root);
    int parents[2];
    int np = 0;
    for (const int p : {sys.sire_[i], sys.dam_[i]}) {
      if (p != Pedigree::kNone) {
        parents[np++] = p;
      }
    }
    for (int a = 0; a < np; ++a) {
      inv.emplace_back(i, parents[a], -0.5 * alpha);
      inv.emplace_back(parents[a], i, -0.5 * alpha);
      fac.emplace_back(i, parents[a], -0.5 * root);
      for (int b = 0; b < np; ++b) {
        inv.emplace_back(parents[a], parents[b], 0.25 * alpha);
      }
    }
  }
  sys.inverse_.resize(z, z);
  sys.inverse_.setFromTriplets(inv.begin(), inv.end());
  sys.inverse_.makeCompressed();
  sys.factor_.resize(z, z);
  sys.factor_.setFromTriplets(fac.begin(), fac.end());
  sys.factor_.makeCompressed();
  return sys;
}

const Matrix& KinshipSystem::dense() const {
  if (!dense_) {
    throw InputError("numerator matrix was not stored densely (Z = " +
                     std::to_string(size()) + ")");
  }
  return *dense_;
}

void KinshipSystem::solve_upper(Vector& u) const {
  for (auto k = static_cast<int>(size()) - 1; k >= 0; --k) {
    const double half = 0.5 * u[k];
    if (sire_[k] != Pedigree::kNone) {
      u[sire_[k]] += half;
    }
    if (dam_[k] != Pedigree::kNone) {
      u[dam_[k]] += half;
    }
  }
}

void KinshipSystem::solve_lower(Vector& w) const {
  for (std::size_t i = 0; i < size(); ++i) {
    double v = w[i];
    if (sire_[i] != Pedigree::kNone) {
      v += 0.5 * w[sire_[i]];
    }
    if (dam_[i] != Pedigree::kNone) {
      v += 0.5 * w[dam_[i]];
    }
    w[i] = v;
  }
}

Vector KinshipSystem::apply(const Vector& x) const {
  if (dense_) {
    return (*dense_) * x;
  }
  Vector u = x;
  solve_upper(u);
  u.array() *= d_.array();
  solve_lower(u);
  return u;
}

Vector KinshipSystem::apply_inverse(const Vector& x) const { return inverse_ * x; }

double KinshipSystem::quadratic(const Vector& x) const {
  if (dense_) {
    return x.dot((*dense_) * x);
  }
  Vector u = x;
  solve_upper(u);
  return (u.array().square() * d_.array()).sum();
}

double KinshipSystem::entry(std::size_t i, std::size_t j) const {
  if (dense_) {
    return (*dense_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return column(j)[static_cast<Eigen::Index>(i)];
}

Vector KinshipSystem::column(std::size_t j) const {
  if (dense_) {
    return dense_->col(static_cast<Eigen::Index>(j));
  }
  Vector e = Vector::Zero(static_cast<Eigen::Index>(size()));
  e[static_cast<Eigen::Index>(j)] = 1.0;
  return apply(e);
}

Matrix KinshipSystem::principal_block(std::span<const int> idx) const {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  if (dense_) {
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        out(r, c) = (*dense_)(idx[r], idx[c]);
      }
    }
    return out;
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    const Vector col = column(static_cast<std::size_t>(idx[c]));
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, c) = col[idx[r]];
    }
  }
  return out;
}

}  // namespace eqd
