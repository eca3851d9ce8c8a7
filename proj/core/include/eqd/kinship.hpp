#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "eqd/pedigree.hpp"

namespace eqd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Above this size the numerator matrix is not stored densely; products
/// with it go through the sparse A = T D T' factors instead.
inline constexpr std::size_t kDefaultDenseLimit = 2048;

/// Hard ceiling for dense storage of the numerator matrix.
inline constexpr std::size_t kMaxDenseLimit = 20000;

/// Wright numerator matrix A of a pedigree together with its sparse
/// inverse and a sparse factor B with B'B = A^-1.
///
/// Uses the decomposition A = T D T' where T^-1 = I - Q, Q holding 0.5 in
/// the sire and dam columns of each row, and D = diag(d) the Mendelian
/// sampling variances. Immutable once built.
class KinshipSystem {
 public:
  /// Builds A (dense when Z <= dense_limit), A^-1 and B.
  /// Throws SingularityError when some d_i < 1e-12, CapExceededError when
  /// dense_limit exceeds kMaxDenseLimit.
  static KinshipSystem build(const Pedigree& pedigree,
                             std::size_t dense_limit = kDefaultDenseLimit);

  std::size_t size() const noexcept { return static_cast<std::size_t>(d_.size()); }

  bool has_dense() const noexcept { return dense_.has_value(); }
  /// Throws InputError when A was not stored densely.
  const Matrix& dense() const;

  const SparseMatrix& inverse() const noexcept { return inverse_; }
  const SparseMatrix& factor() const noexcept { return factor_; }
  const Vector& mendelian() const noexcept { return d_; }
  const Vector& diagonal() const noexcept { return diag_; }

  /// A x.
  Vector apply(const Vector& x) const;
  /// A^-1 x.
  Vector apply_inverse(const Vector& x) const;
  /// x' A x.
  double quadratic(const Vector& x) const;

  double entry(std::size_t i, std::size_t j) const;
  Vector column(std::size_t j) const;

  /// Dense principal submatrix A[idx, idx].
  Matrix principal_block(std::span<const int> idx) const;

 private:
  KinshipSystem() = default;

  // Solves (I - Q)' u = x in place (descending sweep).
  void solve_upper(Vector& u) const;
  // Solves (I - Q) w = v in place (ascending sweep).
  void solve_lower(Vector& w) const;

  std::vector<int> sire_;
  std::vector<int> dam_;
  Vector d_;
  Vector diag_;
  std::optional<Matrix> dense_;
  SparseMatrix inverse_;
  SparseMatrix factor_;
};

inline KinshipSystem build_numerator(const Pedigree& pedigree,
                                     std::size_t dense_limit = kDefaultDenseLimit) {
  return KinshipSystem::build(pedigree, dense_limit);
}

}  // namespace eqd
