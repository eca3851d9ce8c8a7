#include <random>

#include <gtest/gtest.h>

#include "eqd/error.hpp"
#include "eqd/relax_lp.hpp"
#include "instances.hpp"

using namespace eqd;

TEST(SumSmallest, Basics) {
  const std::vector<double> v = {3, 1, 2};
  EXPECT_DOUBLE_EQ(sum_smallest(v, 2), 3.0);
  EXPECT_DOUBLE_EQ(sum_smallest(v, 0), 0.0);
  EXPECT_DOUBLE_EQ(sum_smallest(v, 3), 6.0);
  EXPECT_THROW(sum_smallest(v, 4), InputError);
}

TEST(SumSmallest, MonotoneForNonnegative) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(30);
  for (auto& x : v) x = u(rng);
  for (std::size_t m = 1; m <= v.size(); ++m) EXPECT_LE(sum_smallest(v, m - 1), sum_smallest(v, m));
}

TEST(RelaxLp, IdentityPicksTopTwo) {
  Vector g(4);
  g << 4, 3, 2, 1;
  const auto pp = preprocess_free(eqd::testing::identity_instance(g, 1.0, 2));
  const auto r = solve_lp_by_sorting(pp);
  EXPECT_EQ(r.kind, RelaxationKind::LP);
  EXPECT_DOUBLE_EQ(r.objective, 3.5);
  EXPECT_DOUBLE_EQ(r.x[0], 0.5);
  EXPECT_DOUBLE_EQ(r.x[1], 0.5);
  EXPECT_DOUBLE_EQ(r.x[2], 0.0);
  EXPECT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(r.yV, pp.y_hat());
}

TEST(RelaxLp, EqualGains) {
  const auto pp = preprocess_free(eqd::testing::identity_instance(Vector::Constant(5, 2.5), 1.0, 3));
  EXPECT_DOUBLE_EQ(solve_lp_by_sorting(pp).objective, 2.5);
}

TEST(RelaxLp, FlagsAssumption1Failure) {
  // On T1, rhs = (16 (2 theta) - 6)/4 falls below lhs = 0.5 when 2 theta < 0.5.
  const auto pp = preprocess_free(eqd::testing::t1_instance(2, 0.45));
  const auto r = solve_lp_by_sorting(pp);
  EXPECT_FALSE(check_assumption1(pp).holds);
  EXPECT_EQ(r.status, SolveStatus::NearOptimal);
  EXPECT_EQ(r.residuals.at("assumption1"), 0.0);
}

TEST(RelaxLp, CardinalityIsN) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rc = eqd::testing::random_oracle_case(rng);
    const auto pp = preprocess_free(rc.inst);
    const auto r = solve_lp_by_sorting(pp);
    int count = 0;
    for (Eigen::Index i = 0; i < r.x.size(); ++i) count += r.x[i] > 0.0;
    EXPECT_EQ(count, rc.inst.n);
    EXPECT_NEAR(r.x.sum(), 1.0, 1e-12);
  }
}

TEST(RhoLp, IdentityKinship) {
  Vector g(4);
  g << 4, 3, 2, 1;
  const auto pp = preprocess_free(eqd::testing::identity_instance(g, 1.0, 2));
  EXPECT_DOUBLE_EQ(rho_lp(pp), 4.0);
}

TEST(RhoLp, FixtureT1MatchesVertexEnumeration) {
  const auto pp = preprocess_free(eqd::testing::t1_instance(2, 0.8));
  const Matrix a = pp.a_vv();
  // 0/1 vertices of  4 sum A_ij Xbar_ij - 2 sum A_ij + Trace  over i < j
  // with exactly Nhat ones.
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j < 4; ++j) {
    for (int i = 0; i < j; ++i) pairs.push_back({i, j});
  }
  double best = INFINITY;
  const auto nhat = static_cast<int>(pp.Nhat());
  for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
    if (__builtin_popcount(mask) != nhat) continue;
    double v = a.trace();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double xbar = (mask >> k & 1u) ? 1.0 : 0.0;
      v += (4.0 * xbar - 2.0) * a(pairs[k].first, pairs[k].second);
    }
    best = std::min(best, v);
  }
  EXPECT_NEAR(rho_lp(pp), best, 1e-12);
}

TEST(RhoLp, Homogeneous) {
  const auto pp = preprocess_free(eqd::testing::t1_instance(2, 0.8));
  // Scaling A by 2 scales every term.
  const Matrix a = pp.a_vv();
  const double base = rho_lp(pp);
  std::vector<double> upper;
  for (int j = 1; j < 4; ++j) {
    for (int i = 0; i < j; ++i) upper.push_back(2.0 * a(i, j));
  }
  const double scaled = 4.0 * sum_smallest(upper, static_cast<std::size_t>(pp.Nhat())) -
                        2.0 * a.sum() + 2.0 * 2.0 * a.trace();
  EXPECT_NEAR(scaled, 2.0 * base, 1e-12);
}
