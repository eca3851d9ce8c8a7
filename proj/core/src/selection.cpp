#include "eqd/selection.hpp"

#include <algorithm>

#include "eqd/error.hpp"

namespace eqd {

double penalty_value(const EdInstance& inst, const Vector& x, double lambda) {
  if (lambda < 0.0) {
    throw InputError("penalty weight must be nonnegative");
  }
  const auto v = objective_of(inst, x);
  return v.gx - lambda * std::max(v.xAx - inst.theta2, 0.0);
}

Selection make_selection(const PreprocessedInstance& pp, std::span<const int> chosen_free,
                         double lambda) {
  if (static_cast<int>(chosen_free.size()) != pp.picks()) {
    throw InputError("selection must contain exactly N - p free indices");
  }
  Selection sel;
  sel.chosen.assign(chosen_free.begin(), chosen_free.end());
  for (std::size_t k = 0; k < pp.F.size(); ++k) {
    if (pp.cF[static_cast<Eigen::Index>(k)] > 0.0) {
      sel.chosen.push_back(pp.F[k]);
    }
  }
  std::sort(sel.chosen.begin(), sel.chosen.end());
  if (std::adjacent_find(sel.chosen.begin(), sel.chosen.end()) != sel.chosen.end()) {
    throw InputError("selection repeats an index");
  }
  sel.x = Vector::Zero(static_cast<Eigen::Index>(pp.inst.size()));
  for (const int i : sel.chosen) {
    sel.x[i] = pp.inv_n();
  }
  const auto v = objective_of(pp.inst, sel.x);
  sel.gx = v.gx;
  sel.xAx = v.xAx;
  sel.penalty_value = v.gx - lambda * std::max(v.xAx - pp.inst.theta2, 0.0);
  sel.feasible = within_cap(v.xAx, pp.inst.theta2);
  return sel;
}

}  // namespace eqd
