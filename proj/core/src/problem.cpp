#include "eqd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

#include "eqd/error.hpp"
#include "eqd/relax_lp.hpp"

namespace eqd {

namespace {

constexpr double kBoundSlack = 1e-12;

// Calls f(i, j, A_{V[i] V[j]}) for every i < j.
void for_each_upper(const PreprocessedInstance& pp,
                    const std::function<void(double)>& f) {
  const auto& kin = *pp.inst.kin;
  const auto n = pp.V.size();
  if (kin.has_dense()) {
    const auto& a = kin.dense();
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        f(a(pp.V[i], pp.V[j]));
      }
    }
    return;
  }
  for (std::size_t j = 1; j < n; ++j) {
    const Vector col = kin.column(static_cast<std::size_t>(pp.V[j]));
    for (std::size_t i = 0; i < j; ++i) {
      f(col[pp.V[i]]);
    }
  }
}

}  // namespace

void validate(const EdInstance& inst) {
  if (!inst.kin) {
    throw InputError("instance has no kinship system");
  }
  const auto z = inst.kin->size();
  if (inst.size() != z || static_cast<std::size_t>(inst.lower.size()) != z ||
      static_cast<std::size_t>(inst.upper.size()) != z) {
    throw InputError("g, lower and upper must have length Z = " + std::to_string(z));
  }
  if (!(inst.theta2 > 0.0) || !std::isfinite(inst.theta2)) {
    throw InputError("theta2 must be positive");
  }
  if (inst.n < 1 || static_cast<std::size_t>(inst.n) > z) {
    throw InputError("N must lie in [1, Z]");
  }
  if (!inst.g.allFinite() || !inst.lower.allFinite() || !inst.upper.allFinite()) {
    throw InputError("g and bounds must be finite");
  }
}

EdInstance make_instance(std::shared_ptr<const KinshipSystem> kin, Vector g,
                         double theta2, int n) {
  EdInstance inst;
  const auto z = static_cast<Eigen::Index>(kin ? kin->size() : 0);
  inst.kin = std::move(kin);
  inst.g = std::move(g);
  inst.theta2 = theta2;
  inst.n = n;
  inst.lower = Vector::Zero(z);
  inst.upper = Vector::Ones(z);
  validate(inst);
  return inst;
}

bool within_cap(double xax, double theta2) {
  return xax <= theta2 + 1e-12 * std::max(1.0, theta2);
}

std::int64_t PreprocessedInstance::Nhat() const {
  const auto v = static_cast<std::int64_t>(V.size());
  return (Nbar * Nbar + v * v - 2 * v) / 4;
}

Matrix PreprocessedInstance::a_vv() const { return inst.kin->principal_block(V); }

Vector PreprocessedInstance::x_from_y(const Vector& yV) const {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(inst.size()));
  const double scale = 0.5 / inst.n;
  for (std::size_t k = 0; k < V.size(); ++k) {
    x[V[k]] = (yV[static_cast<Eigen::Index>(k)] + 1.0) * scale;
  }
  for (std::size_t k = 0; k < F.size(); ++k) {
    x[F[k]] = cF[static_cast<Eigen::Index>(k)];
  }
  return x;
}

Vector PreprocessedInstance::y_from_x(const Vector& x) const {
  Vector y(static_cast<Eigen::Index>(V.size()));
  for (std::size_t k = 0; k < V.size(); ++k) {
    y[static_cast<Eigen::Index>(k)] = 2.0 * inst.n * x[V[k]] - 1.0;
  }
  return y;
}

double PreprocessedInstance::transformed_objective(const Vector& yV) const {
  return 2.0 * gbarV.dot(yV) + gbar;
}

Vector PreprocessedInstance::y_hat() const {
  Vector y = -Vector::Ones(static_cast<Eigen::Index>(V.size()));
  y.head(picks()).setOnes();
  return y;
}

PreprocessResult preprocess(const EdInstance& inst) {
  validate(inst);
  const auto z = static_cast<int>(inst.size());
  const double inv_n = 1.0 / inst.n;

  std::vector<int> free;
  std::vector<int> fixed;
  std::vector<double> fixed_values;
  int p = 0;
  for (int i = 0; i < z; ++i) {
    const double l = inst.lower[i];
    const double u = inst.upper[i];
    const auto where = " at index " + std::to_string(i);
    if (l > inv_n + kBoundSlack) {
      throw InfeasibleError("lower bound exceeds 1/N" + where);
    }
    if (u < 0.0) {
      throw InfeasibleError("negative upper bound" + where);
    }
    if (l > u) {
      throw InfeasibleError("lower bound exceeds upper bound" + where);
    }
    if (l > 0.0) {
      if (u < inv_n - kBoundSlack) {
        throw InfeasibleError("bounds exclude both 0 and 1/N" + where);
      }
      fixed.push_back(i);
      fixed_values.push_back(inv_n);
      ++p;
    } else if (u < inv_n - kBoundSlack) {
      fixed.push_back(i);
      fixed_values.push_back(0.0);
    } else {
      free.push_back(i);
    }
  }
  if (p > inst.n) {
    throw InfeasibleError(std::to_string(p) + " individuals are forced in but N = " +
                          std::to_string(inst.n));
  }
  if (inst.n - p > static_cast<int>(free.size())) {
    throw InfeasibleError("too few selectable individuals for N = " +
                          std::to_string(inst.n));
  }

  if (free.size() <= 1) {
    ForcedSolution forced;
    forced.x = Vector::Zero(z);
    for (std::size_t k = 0; k < fixed.size(); ++k) {
      forced.x[fixed[k]] = fixed_values[k];
    }
    if (!free.empty() && inst.n - p == 1) {
      forced.x[free.front()] = inv_n;
    }
    const auto value = objective_of(inst, forced.x);
    forced.gx = value.gx;
    forced.xAx = value.xAx;
    forced.feasible = within_cap(value.xAx, inst.theta2);
    return forced;
  }

  PreprocessedInstance pp;
  pp.inst = inst;
  pp.V = std::move(free);
  std::stable_sort(pp.V.begin(), pp.V.end(),
                   [&](int a, int b) { return inst.g[a] > inst.g[b]; });
  pp.F = std::move(fixed);
  pp.cF = Eigen::Map<const Vector>(fixed_values.data(),
                                   static_cast<Eigen::Index>(fixed_values.size()));
  pp.p = p;
  pp.perm = pp.V;
  pp.perm.insert(pp.perm.end(), pp.F.begin(), pp.F.end());

  const auto nv = static_cast<Eigen::Index>(pp.V.size());
  const double n = inst.n;
  pp.gmin = inst.g.minCoeff();

  pp.gbarV.resize(nv);
  double gv_shift = 0.0;
  for (Eigen::Index k = 0; k < nv; ++k) {
    const double shifted = inst.g[pp.V[k]] - pp.gmin;
    pp.gbarV[k] = shifted / (4.0 * n);
    gv_shift += shifted;
  }
  double gf_shift = 0.0;
  for (std::size_t k = 0; k < pp.F.size(); ++k) {
    gf_shift += (inst.g[pp.F[k]] - pp.gmin) * pp.cF[static_cast<Eigen::Index>(k)];
  }
  pp.gbar = gv_shift / (2.0 * n) + gf_shift + pp.gmin;

  // u = A (c_F on F), v = A (e on V).
  Vector cf_full = Vector::Zero(z);
  Vector ev_full = Vector::Zero(z);
  for (std::size_t k = 0; k < pp.F.size(); ++k) {
    cf_full[pp.F[k]] = pp.cF[static_cast<Eigen::Index>(k)];
  }
  for (const int i : pp.V) {
    ev_full[i] = 1.0;
  }
  const auto& kin = *inst.kin;
  const Vector u = kin.apply(cf_full);
  const Vector v = kin.apply(ev_full);

  pp.cbarF.resize(nv);
  for (Eigen::Index k = 0; k < nv; ++k) {
    pp.cbarF[k] = v[pp.V[k]] + 2.0 * n * u[pp.V[k]];
  }
  const double cAc = cf_full.dot(u);
  const double eAe = ev_full.dot(v);
  const double cAe = cf_full.dot(v);
  pp.thetabar = 2.0 * n * n * (inst.theta2 - cAc) - 0.5 * eAe - 2.0 * n * cAe;
  pp.Nbar = 2 * static_cast<std::int64_t>(inst.n - p) - nv;

  pp.sumVV = eAe;
  pp.traceVV = 0.0;
  for (const int i : pp.V) {
    pp.traceVV += kin.diagonal()[i];
  }
  return pp;
}

PreprocessedInstance preprocess_free(const EdInstance& inst) {
  auto result = preprocess(inst);
  if (auto* pp = std::get_if<PreprocessedInstance>(&result)) {
    return std::move(*pp);
  }
  throw InputError("bounds leave at most one free variable");
}

double upper_triangle_sum_smallest(const PreprocessedInstance& pp, std::int64_t m) {
  const auto n = static_cast<std::int64_t>(pp.V.size());
  const std::int64_t total_count = n * (n - 1) / 2;
  if (m <= 0) {
    return 0.0;
  }
  m = std::min(m, total_count);

  constexpr std::int64_t kGatherLimit = 4'000'000;
  if (total_count <= kGatherLimit) {
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(total_count));
    for_each_upper(pp, [&](double a) { entries.push_back(a); });
    return sum_smallest(entries, static_cast<std::size_t>(m));
  }

  // Bounded heap over whichever side is shorter.
  const std::int64_t k = total_count - m;
  double total = 0.0;
  if (m <= k) {
    std::priority_queue<double> smallest;
    for_each_upper(pp, [&](double a) {
      if (static_cast<std::int64_t>(smallest.size()) < m) {
        smallest.push(a);
      } else if (a < smallest.top()) {
        smallest.pop();
        smallest.push(a);
      }
    });
    while (!smallest.empty()) {
      total += smallest.top();
      smallest.pop();
    }
    return total;
  }
  std::priority_queue<double, std::vector<double>, std::greater<>> largest;
  for_each_upper(pp, [&](double a) {
    total += a;
    if (k == 0) {
      return;
    }
    if (static_cast<std::int64_t>(largest.size()) < k) {
      largest.push(a);
    } else if (a > largest.top()) {
      largest.pop();
      largest.push(a);
    }
  });
  while (!largest.empty()) {
    total -= largest.top();
    largest.pop();
  }
  return total;
}

Assumption1Check check_assumption1(const PreprocessedInstance& pp) {
  Assumption1Check out;
  out.lhs = upper_triangle_sum_smallest(pp, pp.Nhat());
  out.rhs = (2.0 * pp.thetabar - 2.0 * pp.traceVV + pp.sumVV -
             2.0 * pp.cbarF.dot(pp.y_hat())) /
            4.0;
  out.holds = out.lhs <= out.rhs + 1e-12 * std::max(1.0, std::abs(out.rhs));
  return out;
}

ObjectiveValue objective_of(const EdInstance& inst, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != inst.size()) {
    throw InputError("contribution vector has the wrong length");
  }
  return {inst.g.dot(x), inst.kin->quadratic(x)};
}

}  // namespace eqd
