#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eqd/problem.hpp"
#include "eqd/relaxation.hpp"
#include "eqd/selection.hpp"

namespace eqd {

enum class StartKind { LP, SOCP, SDP, Rounded, Custom };

std::string_view to_string(StartKind kind);

struct SwapRecord {
  int out = 0;
  int in = 0;
  /// f_lambda after the swap.
  double value = 0.0;
};

struct AscentTrace {
  int iterations = 0;
  std::vector<SwapRecord> swaps;
  StartKind start_kind = StartKind::Custom;
  double lambda = 0.0;
  /// f_lambda at the rounded start (after Step 2).
  double f_start = 0.0;
  bool hit_iteration_cap = false;
  /// Times lambda was raised by ascent_until_feasible; f values increase
  /// strictly between raises.
  int escalations = 0;
};

struct AscentResult {
  Selection selection;
  AscentTrace trace;
};

/// sqrt(((g'A^-1 g)(e'A^-1 e) - (g'A^-1 e)^2) / (4 (2 theta)(e'A^-1 e) - 4)).
/// Throws DomainError when the denominator is not positive.
double lambda0(const EdInstance& inst);

/// 2 lambda0, the default penalty weight.
double default_lambda(const EdInstance& inst);

/// Ax and x'Ax of an equal-deployment point, kept current across swaps.
class QuadraticCache {
 public:
  QuadraticCache(const PreprocessedInstance& pp, const Vector& x);

  const Vector& x() const noexcept { return x_; }
  const Vector& ax() const noexcept { return ax_; }
  double xax() const noexcept { return xax_; }

  /// x'Ax at x - e_i/N + e_j/N. i is chosen, j is not.
  double swap_delta(int i, int j);

  void apply_swap(int i, int j);

 private:
  double entry(int i, int j);
  const Vector& column(int i);

  const PreprocessedInstance& pp_;
  Vector x_;
  Vector ax_;
  double xax_ = 0.0;
  std::unordered_map<int, Vector> columns_;
};

/// Algorithm: round the start over V to its N - p largest entries (ties by
/// index), then take the best single swap of a chosen and an unchosen free
/// index until no swap strictly increases f_lambda. max_iter <= 0 means
/// 10 |V|. Reaching max_iter returns the current point with
/// hit_iteration_cap set.
AscentResult steepest_ascent(const PreprocessedInstance& pp, const Vector& start,
                             StartKind kind, double lambda, int max_iter = 0);

AscentResult steepest_ascent(const PreprocessedInstance& pp, const RelaxationResult& start,
                             double lambda, int max_iter = 0);

AscentResult steepest_ascent(const PreprocessedInstance& pp, const Selection& start,
                             double lambda, int max_iter = 0,
                             StartKind kind = StartKind::Custom);

/// steepest_ascent, then while the selection violates the cap: multiply
/// lambda by `growth` (0 becomes 1) and continue from the current
/// selection, at most `max_escalations` times.
AscentResult ascent_until_feasible(const PreprocessedInstance& pp, const Vector& start,
                                   StartKind kind, double lambda, int max_iter = 0,
                                   double growth = 2.0, int max_escalations = 40);

AscentResult ascent_until_feasible(const PreprocessedInstance& pp, const RelaxationResult& start,
                                   double lambda, int max_iter = 0);

/// Largest Z for lambda_hat.
inline constexpr std::size_t kMaxLambdaHatSize = 20;

struct LambdaHat {
  double lambda = 0.0;
  /// Smallest positive violation max{x'Ax - 2 theta, 0} over the lattice.
  double phi = 0.0;
  /// Minimum of max{x'Ax - 2 theta, 0} over the whole lattice.
  double phi_literal = 0.0;
  /// Every lattice point is feasible, so any lambda >= 0 works.
  bool any_lambda_works = false;
  std::int64_t lattice_points = 0;
  std::int64_t feasible_points = 0;
};

/// (max g - min g + 1) / phi. Throws CapExceededError when Z > 20.
LambdaHat lambda_hat(const PreprocessedInstance& pp);

}  // namespace eqd
