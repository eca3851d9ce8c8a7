#include "eqd/relax_lp.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <vector>

#include "eqd/error.hpp"

namespace eqd {

std::string_view to_string(RelaxationKind kind) {
  switch (kind) {
    case RelaxationKind::LP:
      return "LP";
    case RelaxationKind::SOCP:
      return "SOCP";
    case RelaxationKind::SDP:
      return "SDP";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::NearOptimal:
      return "near_optimal";
    case SolveStatus::Failed:
      return "failed";
  }
  return "?";
}

double sum_smallest(std::span<const double> v, std::size_t m) {
  if (m > v.size()) {
    throw InputError("sum_smallest: m exceeds the vector length");
  }
  if (m == 0) {
    return 0.0;
  }
  std::vector<double> work(v.begin(), v.end());
  const auto mid = work.begin() + static_cast<std::ptrdiff_t>(m);
  if (mid != work.end()) {
    std::nth_element(work.begin(), mid - 1, work.end());
  }
  // Ascending order keeps the summation independent of the input order.
  std::sort(work.begin(), mid);
  return std::accumulate(work.begin(), mid, 0.0);
}

RelaxationResult solve_lp_by_sorting(const PreprocessedInstance& pp) {
  const auto start = std::chrono::steady_clock::now();
  RelaxationResult out;
  out.kind = RelaxationKind::LP;
  out.yV = pp.y_hat();
  out.x = pp.x_from_y(out.yV);
  out.objective = pp.transformed_objective(out.yV);

  const auto a1 = check_assumption1(pp);
  out.status = a1.holds ? SolveStatus::Optimal : SolveStatus::NearOptimal;
  out.residuals["assumption1_lhs"] = a1.lhs;
  out.residuals["assumption1_rhs"] = a1.rhs;
  out.residuals["assumption1"] = a1.holds ? 1.0 : 0.0;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double rho_lp(const PreprocessedInstance& pp) {
  return 4.0 * upper_triangle_sum_smallest(pp, pp.Nhat()) - pp.sumVV + 2.0 * pp.traceVV;
}

}  // namespace eqd
