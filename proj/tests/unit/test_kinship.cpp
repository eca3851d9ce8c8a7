#include <random>

#include <gtest/gtest.h>

#include "eqd/error.hpp"
#include "eqd/kinship.hpp"
#include "instances.hpp"

using namespace eqd;
using eqd::testing::t1_pedigree;
using eqd::testing::tabular_numerator;

TEST(Kinship, TwoFoundersAreIdentity) {
  const auto kin = KinshipSystem::build(Pedigree({{1, 0, 0}, {2, 0, 0}}));
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_EQ(kin.dense(), eye);
  EXPECT_EQ(Matrix(kin.inverse()), eye);
  EXPECT_EQ(Matrix(kin.factor()), eye);
}

TEST(Kinship, FixtureT1Entries) {
  const auto kin = KinshipSystem::build(t1_pedigree());
  const auto& a = kin.dense();
  EXPECT_DOUBLE_EQ(a(2, 3), 0.5);
  EXPECT_DOUBLE_EQ(a(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(a(0, 2), 0.5);
  EXPECT_TRUE(a.isApprox(tabular_numerator(t1_pedigree())));
}

TEST(Kinship, FixtureT1FactorRow) {
  const auto kin = KinshipSystem::build(t1_pedigree());
  const Matrix b = kin.factor();
  const double s = 1.0 / std::sqrt(0.5);
  EXPECT_NEAR(b(2, 0), -0.5 * s, 1e-15);
  EXPECT_NEAR(b(2, 1), -0.5 * s, 1e-15);
  EXPECT_NEAR(b(2, 2), s, 1e-15);
  EXPECT_EQ(b(2, 3), 0.0);
  const Matrix r = b.transpose() * b * kin.dense() - Matrix::Identity(4, 4);
  EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Kinship, InvariantsOnGeneratedPedigrees) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto ped = generate_pedigree(5 + static_cast<int>(seed), 4, 2, seed);
    const auto kin = KinshipSystem::build(ped);
    const Matrix& a = kin.dense();
    const auto z = a.rows();
    EXPECT_TRUE(a.isApprox(a.transpose(), 0.0));
    EXPECT_GE(a.diagonal().minCoeff(), 1.0);
    EXPECT_TRUE(a.isApprox(tabular_numerator(ped), 1e-14));
    const Matrix ainv = kin.inverse();
    EXPECT_LE((a * ainv - Matrix::Identity(z, z)).cwiseAbs().maxCoeff(), 1e-8);
    const Matrix b = kin.factor();
    EXPECT_LE((b.transpose() * b - ainv).cwiseAbs().maxCoeff(), 1e-10);
    for (Eigen::Index i = 0; i < z; ++i) {
      int nnz = 0;
      for (Eigen::Index j = 0; j < z; ++j) nnz += b(i, j) != 0.0;
      EXPECT_LE(nnz, 3);
    }
    Eigen::LLT<Matrix> llt(a);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Kinship, FactorOnlyPathMatchesDense) {
  const auto ped = generate_pedigree(12, 4, 2, 99);
  const auto dense = KinshipSystem::build(ped);
  const auto sparse = KinshipSystem::build(ped, 0);
  ASSERT_TRUE(dense.has_dense());
  ASSERT_FALSE(sparse.has_dense());
  EXPECT_THROW(sparse.dense(), InputError);
  const auto z = static_cast<Eigen::Index>(ped.size());
  EXPECT_LE((dense.diagonal() - sparse.diagonal()).cwiseAbs().maxCoeff(), 1e-14);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Vector x(z);
  for (auto& v : x) v = normal(rng);
  EXPECT_LE((sparse.apply(x) - dense.dense() * x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(sparse.quadratic(x), x.dot(dense.dense() * x), 1e-10);
  EXPECT_LE((sparse.apply_inverse(sparse.apply(x)) - x).cwiseAbs().maxCoeff(), 1e-10);
  for (std::size_t j : {0ul, 5ul, static_cast<std::size_t>(z - 1)}) {
    EXPECT_LE((sparse.column(j) - dense.dense().col(static_cast<Eigen::Index>(j))).cwiseAbs().maxCoeff(),
              1e-14);
    EXPECT_NEAR(sparse.entry(j, 3), dense.dense()(static_cast<Eigen::Index>(j), 3), 1e-14);
  }
  const std::vector<int> idx = {7, 2, 11};
  const Matrix block = sparse.principal_block(idx);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(block(r, c), dense.dense()(idx[r], idx[c]), 1e-14);
    }
  }
}

TEST(Kinship, DenseLimitAboveCeilingIsRejected) {
  EXPECT_THROW(KinshipSystem::build(t1_pedigree(), kMaxDenseLimit + 1), CapExceededError);
}

TEST(Kinship, FounderOnlyPedigreeIsExactlyIdentity) {
  std::vector<PedigreeRecord> records;
  for (IndividualId i = 1; i <= 7; ++i) records.push_back({i, 0, 0});
  const auto kin = KinshipSystem::build(Pedigree(records));
  EXPECT_EQ(kin.dense(), Matrix::Identity(7, 7));
}
