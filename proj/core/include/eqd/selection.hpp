#pragma once

#include <span>
#include <vector>

#include "eqd/problem.hpp"

namespace eqd {

/// An equal-deployment point: 1/N on `chosen`, 0 elsewhere.
struct Selection {
  /// Original indices with x_i = 1/N (fixed ones included), ascending.
  std::vector<int> chosen;
  Vector x;
  double gx = 0.0;
  double xAx = 0.0;
  double penalty_value = 0.0;
  bool feasible = false;
};

/// g'x - lambda max(x'Ax - 2 theta, 0).
double penalty_value(const EdInstance& inst, const Vector& x, double lambda);

/// Selection from the chosen members of V; indices fixed at 1/N are added.
Selection make_selection(const PreprocessedInstance& pp, std::span<const int> chosen_free,
                         double lambda = 0.0);

}  // namespace eqd
