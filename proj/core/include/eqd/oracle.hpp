#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "eqd/problem.hpp"

namespace eqd {

/// Largest number of subsets the exhaustive routines will visit.
inline constexpr std::int64_t kMaxEnumeration = 10'000'000;

/// Largest |V| for which the oracles hold A_VV densely.
inline constexpr int kMaxOracleFree = 4096;

struct OracleResult {
  /// OPT_ED, or -infinity when no subset is feasible.
  double opt = -std::numeric_limits<double>::infinity();
  /// Chosen original indices (fixed ones included), ascending.
  std::vector<int> argmax;
  Vector x;
  double xAx = 0.0;
  std::int64_t enumerated = 0;
  std::int64_t feasible_count = 0;
  /// Proven upper bound on OPT_ED (equals opt when solved exactly).
  double bound = -std::numeric_limits<double>::infinity();
  bool timed_out = false;
  bool feasible() const noexcept { return opt > -std::numeric_limits<double>::infinity(); }
};

/// C(n, k), saturated at limit + 1.
std::int64_t binomial_capped(std::int64_t n, std::int64_t k, std::int64_t limit = kMaxEnumeration);

/// Lattice walk shared by the exhaustive routines: visits every size-(N-p)
/// subset of V in lexicographic order of positions in V and reports g'x and
/// x'Ax of the induced point. Throws CapExceededError past kMaxEnumeration.
class LatticeWalker {
 public:
  explicit LatticeWalker(const PreprocessedInstance& pp);

  std::int64_t size() const noexcept { return count_; }

  /// f(positions, gx, xAx); positions index into pp.V.
  void walk(const std::function<void(const std::vector<int>&, double, double)>& f) const;

 private:
  const PreprocessedInstance& pp_;
  std::int64_t count_ = 0;
  Matrix avv_;
  // A (c_F on F) restricted to V, and c_F'A c_F, g'c_F.
  Vector cross_;
  double fixed_quad_ = 0.0;
  double fixed_gain_ = 0.0;
};

/// Exhaustive OPT_ED. Ties within 1e-12 (relative) keep the subset that is
/// lexicographically smallest in original indices.
OracleResult enumerate_ed(const PreprocessedInstance& pp);

/// Best-first search over y_i in {-1, +1}, V in order, bounded by the
/// sorting value of the remaining free part. Stops when the relative gap
/// between the incumbent and the best open bound is at most `gap`, or at
/// `time_cap` seconds with timed_out set.
OracleResult branch_and_bound_ed(const PreprocessedInstance& pp, double gap = 0.0,
                                 double time_cap = 60.0);

struct PenaltyMaximizer {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  double gx = 0.0;
  double xAx = 0.0;
};

/// Exhaustive maximizer of g'x - lambda max(x'Ax - 2 theta, 0) over the lattice.
PenaltyMaximizer enumerate_penalty_maximizer(const PreprocessedInstance& pp, double lambda);

}  // namespace eqd
