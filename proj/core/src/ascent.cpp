#include "eqd/ascent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "eqd/error.hpp"
#include "eqd/oracle.hpp"

namespace eqd {

std::string_view to_string(StartKind kind) {
  switch (kind) {
    case StartKind::LP:
      return "LP";
    case StartKind::SOCP:
      return "SOCP";
    case StartKind::SDP:
      return "SDP";
    case StartKind::Rounded:
      return "ROUNDED";
    case StartKind::Custom:
      return "CUSTOM";
  }
  return "?";
}

double lambda0(const EdInstance& inst) {
  validate(inst);
  const auto& kin = *inst.kin;
  const Vector e = Vector::Ones(static_cast<Eigen::Index>(inst.size()));
  const Vector ainv_e = kin.apply_inverse(e);
  const Vector ainv_g = kin.apply_inverse(inst.g);
  const double ee = e.dot(ainv_e);
  const double gg = inst.g.dot(ainv_g);
  const double ge = inst.g.dot(ainv_e);
  const double den = 4.0 * inst.theta2 * ee - 4.0;
  if (!(den > 0.0)) {
    throw DomainError("lambda0 needs 2 theta > 1/(e'A^-1 e) = " + std::to_string(1.0 / ee));
  }
  // Nonnegative by Cauchy-Schwarz up to round-off.
  const double num = std::max(gg * ee - ge * ge, 0.0);
  return std::sqrt(num / den);
}

double default_lambda(const EdInstance& inst) { return 2.0 * lambda0(inst); }

QuadraticCache::QuadraticCache(const PreprocessedInstance& pp, const Vector& x) : pp_(pp), x_(x) {
  if (static_cast<std::size_t>(x.size()) != pp.inst.size()) {
    throw InputError("contribution vector has the wrong length");
  }
  ax_ = pp.inst.kin->apply(x_);
  xax_ = x_.dot(ax_);
}

const Vector& QuadraticCache::column(int i) {
  auto it = columns_.find(i);
  if (it == columns_.end()) {
    it = columns_.emplace(i, pp_.inst.kin->column(static_cast<std::size_t>(i))).first;
  }
  return it->second;
}

double QuadraticCache::entry(int i, int j) {
  const auto& kin = *pp_.inst.kin;
  if (kin.has_dense()) {
    return kin.dense()(i, j);
  }
  return column(i)[j];
}

double QuadraticCache::swap_delta(int i, int j) {
  const double h = pp_.inv_n();
  const auto& diag = pp_.inst.kin->diagonal();
  return xax_ + 2.0 * h * (ax_[j] - ax_[i]) + h * h * (diag[i] + diag[j] - 2.0 * entry(i, j));
}

void QuadraticCache::apply_swap(int i, int j) {
  const double h = pp_.inv_n();
  const auto& kin = *pp_.inst.kin;
  if (kin.has_dense()) {
    ax_ += h * (kin.dense().col(j) - kin.dense().col(i));
  } else {
    ax_ += h * (column(j) - column(i));
    columns_.erase(i);
  }
  x_[i] -= h;
  x_[j] += h;
  xax_ = x_.dot(ax_);
}

AscentResult steepest_ascent(const PreprocessedInstance& pp, const Vector& start,
                             StartKind kind, double lambda, int max_iter) {
  if (lambda < 0.0) {
    throw InputError("penalty weight must be nonnegative");
  }
  if (static_cast<std::size_t>(start.size()) != pp.inst.size()) {
    throw InputError("start vector has the wrong length");
  }
  if (max_iter <= 0) {
    max_iter = 10 * pp.free_count();
  }
  const auto& g = pp.inst.g;
  const double h = pp.inv_n();
  const double theta2 = pp.inst.theta2;

  // Step 2.
  std::vector<int> order = pp.V;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (start[a] != start[b]) {
      return start[a] > start[b];
    }
    return a < b;
  });
  std::vector<int> in(order.begin(), order.begin() + pp.picks());
  std::vector<int> out(order.begin() + pp.picks(), order.end());
  std::sort(in.begin(), in.end());
  std::sort(out.begin(), out.end());

  Vector x = pp.x_from_y(-Vector::Ones(pp.free_count()));
  for (const int i : in) {
    x[i] = h;
  }
  QuadraticCache cache(pp, x);
  double gx = g.dot(x);
  const auto f_of = [&](double gain, double quad) {
    return gain - lambda * std::max(quad - theta2, 0.0);
  };

  AscentResult result;
  auto& trace = result.trace;
  trace.start_kind = kind;
  trace.lambda = lambda;
  double f = f_of(gx, cache.xax());
  trace.f_start = f;

  // Steps 3-5.
  while (true) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    for (std::size_t a = 0; a < in.size(); ++a) {
      const int i = in[a];
      for (std::size_t b = 0; b < out.size(); ++b) {
        const int j = out[b];
        const double value = f_of(gx + h * (g[j] - g[i]), cache.swap_delta(i, j));
        if (value > best) {
          best = value;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (!(best > f + 1e-12 * std::max(1.0, std::abs(f)))) {
      break;
    }
    if (trace.iterations >= max_iter) {
      trace.hit_iteration_cap = true;
      break;
    }
    const int i = in[best_a];
    const int j = out[best_b];
    cache.apply_swap(i, j);
    gx += h * (g[j] - g[i]);
    f = f_of(gx, cache.xax());
    trace.swaps.push_back({i, j, f});
    ++trace.iterations;
    in.erase(in.begin() + static_cast<std::ptrdiff_t>(best_a));
    in.insert(std::lower_bound(in.begin(), in.end(), j), j);
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(best_b));
    out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  }

  result.selection = make_selection(pp, in, lambda);
  return result;
}

namespace {

StartKind kind_of(const RelaxationResult& start) {
  StartKind kind = StartKind::Custom;
  switch (start.kind) {
    case RelaxationKind::LP:
      kind = StartKind::LP;
      break;
    case RelaxationKind::SOCP:
      kind = StartKind::SOCP;
      break;
    case RelaxationKind::SDP:
      kind = StartKind::SDP;
      break;
  }
  return kind;
}

Vector start_point(const PreprocessedInstance& pp, const RelaxationResult& start) {
  if (start.kind != RelaxationKind::SOCP && start.yV.size() == pp.free_count()) {
    return pp.x_from_y(start.yV);
  }
  return start.x;
}

}  // namespace

AscentResult steepest_ascent(const PreprocessedInstance& pp, const RelaxationResult& start,
                             double lambda, int max_iter) {
  return steepest_ascent(pp, start_point(pp, start), kind_of(start), lambda, max_iter);
}

AscentResult ascent_until_feasible(const PreprocessedInstance& pp, const Vector& start,
                                   StartKind kind, double lambda, int max_iter, double growth,
                                   int max_escalations) {
  if (!(growth > 1.0)) {
    throw InputError("growth must exceed 1");
  }
  auto result = steepest_ascent(pp, start, kind, lambda, max_iter);
  auto& trace = result.trace;
  while (!result.selection.feasible && trace.escalations < max_escalations) {
    const double raised = lambda > 0.0 ? lambda * growth : 1.0;
    lambda = raised;
    auto next = steepest_ascent(pp, result.selection.x, kind, lambda, max_iter);
    trace.iterations += next.trace.iterations;
    trace.swaps.insert(trace.swaps.end(), next.trace.swaps.begin(), next.trace.swaps.end());
    trace.lambda = lambda;
    trace.hit_iteration_cap = trace.hit_iteration_cap || next.trace.hit_iteration_cap;
    ++trace.escalations;
    result.selection = std::move(next.selection);
  }
  return result;
}

AscentResult ascent_until_feasible(const PreprocessedInstance& pp, const RelaxationResult& start,
                                   double lambda, int max_iter) {
  return ascent_until_feasible(pp, start_point(pp, start), kind_of(start), lambda, max_iter);
}

AscentResult steepest_ascent(const PreprocessedInstance& pp, const Selection& start,
                             double lambda, int max_iter, StartKind kind) {
  return steepest_ascent(pp, start.x, kind, lambda, max_iter);
}

LambdaHat lambda_hat(const PreprocessedInstance& pp) {
  if (pp.inst.size() > kMaxLambdaHatSize) {
    throw CapExceededError("lambda_hat needs Z <= " + std::to_string(kMaxLambdaHatSize));
  }
  const LatticeWalker walker(pp);
  LambdaHat out;
  double phi = std::numeric_limits<double>::infinity();
  double phi_literal = std::numeric_limits<double>::infinity();
  walker.walk([&](const std::vector<int>&, double, double xax) {
    ++out.lattice_points;
    const double violation = within_cap(xax, pp.inst.theta2) ? 0.0 : xax - pp.inst.theta2;
    phi_literal = std::min(phi_literal, violation);
    if (violation > 0.0) {
      phi = std::min(phi, violation);
    } else {
      ++out.feasible_points;
    }
  });
  out.phi_literal = phi_literal;
  if (out.feasible_points == out.lattice_points) {
    out.any_lambda_works = true;
    return out;
  }
  out.phi = phi;
  out.lambda = (pp.inst.g.maxCoeff() - pp.inst.g.minCoeff() + 1.0) / phi;
  return out;
}

}  // namespace eqd
