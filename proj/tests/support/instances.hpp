#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "eqd/pedigree.hpp"
#include "eqd/problem.hpp"

namespace eqd::testing {

/// Fixture T1: founders 1, 2 and two full sibs 3, 4 of (1, 2).
Pedigree t1_pedigree();

/// T1 with g = (4, 3, 2, 1) and free bounds.
EdInstance t1_instance(int n, double theta2);

std::shared_ptr<const KinshipSystem> kinship_of(const Pedigree& ped,
                                                std::size_t dense_limit = kDefaultDenseLimit);

/// A by the tabular method, straight from the records.
Matrix tabular_numerator(const Pedigree& ped);

/// Identity kinship on `z` founders.
EdInstance identity_instance(const Vector& g, double theta2, int n);

struct BruteForce {
  double opt = 0.0;
  bool feasible = false;
  std::vector<int> chosen;
  double xAx = 0.0;
  std::int64_t feasible_count = 0;
};

/// Enumerates every size-N subset by bitmask (free bounds only), dense A.
BruteForce brute_force(const Matrix& a, const Vector& g, double theta2, int n);

struct RandomCase {
  Pedigree pedigree;
  EdInstance inst;
  /// Fraction of size-N subsets satisfying the cap.
  double feasible_fraction = 0.0;
};

/// Founders 4-10, generations 0-3, Z <= 16, N <= 6, g uniform on [0, 1),
/// 2 theta between two consecutive distinct subset values so that 30-90%
/// of the subsets are feasible.
RandomCase random_oracle_case(std::mt19937_64& rng);

}  // namespace eqd::testing
