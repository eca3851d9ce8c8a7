#pragma once

#include <span>

#include "eqd/problem.hpp"
#include "eqd/relaxation.hpp"

namespace eqd {

/// Sum of the m smallest entries of v. Requires m <= v.size().
double sum_smallest(std::span<const double> v, std::size_t m);

/// LP relaxation solved by sorting: +1 on the N - p best entries of V.
/// Optimal when Assumption 1 holds; otherwise NearOptimal, and the value
/// is only the bound of the further relaxation.
RelaxationResult solve_lp_by_sorting(const PreprocessedInstance& pp);

/// 4 S_Nhat - e'A_VV e + 2 Trace(A_VV).
double rho_lp(const PreprocessedInstance& pp);

}  // namespace eqd
