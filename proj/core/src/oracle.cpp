#include "eqd/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>

#include "eqd/error.hpp"

namespace eqd {

namespace {

bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::vector<int> to_original(const PreprocessedInstance& pp, const std::vector<int>& positions) {
  std::vector<int> out;
  out.reserve(positions.size() + pp.F.size());
  for (const int k : positions) {
    out.push_back(pp.V[k]);
  }
  for (std::size_t k = 0; k < pp.F.size(); ++k) {
    if (pp.cF[static_cast<Eigen::Index>(k)] > 0.0) {
      out.push_back(pp.F[k]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void finish(OracleResult& r, const PreprocessedInstance& pp) {
  r.x = Vector::Zero(static_cast<Eigen::Index>(pp.inst.size()));
  if (!r.feasible()) {
    r.argmax.clear();
    return;
  }
  for (const int i : r.argmax) {
    r.x[i] = pp.inv_n();
  }
}

Matrix oracle_block(const PreprocessedInstance& pp) {
  if (pp.free_count() > kMaxOracleFree) {
    throw CapExceededError("oracle needs |V| <= " + std::to_string(kMaxOracleFree));
  }
  return pp.a_vv();
}

// A c_F over V, c_F'A c_F and g'c_F.
void fixed_terms(const PreprocessedInstance& pp, Vector& cross, double& quad, double& gain) {
  const auto z = static_cast<Eigen::Index>(pp.inst.size());
  Vector c = Vector::Zero(z);
  for (std::size_t k = 0; k < pp.F.size(); ++k) {
    c[pp.F[k]] = pp.cF[static_cast<Eigen::Index>(k)];
  }
  const Vector ac = pp.inst.kin->apply(c);
  cross.resize(pp.free_count());
  for (int k = 0; k < pp.free_count(); ++k) {
    cross[k] = ac[pp.V[k]];
  }
  quad = c.dot(ac);
  gain = pp.inst.g.dot(c);
}

}  // namespace

std::int64_t binomial_capped(std::int64_t n, std::int64_t k, std::int64_t limit) {
  if (k < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  // C(n, i) = C(n, i-1) (n-i+1) / i stays integral; c <= limit before each product.
  std::int64_t c = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c = c * (n - i + 1) / i;
    if (c > limit) {
      return limit + 1;
    }
  }
  return c;
}

LatticeWalker::LatticeWalker(const PreprocessedInstance& pp) : pp_(pp) {
  count_ = binomial_capped(pp.free_count(), pp.picks());
  if (count_ > kMaxEnumeration) {
    throw CapExceededError("C(|V|, N - p) exceeds " + std::to_string(kMaxEnumeration));
  }
  avv_ = oracle_block(pp);
  fixed_terms(pp, cross_, fixed_quad_, fixed_gain_);
}

void LatticeWalker::walk(
    const std::function<void(const std::vector<int>&, double, double)>& f) const {
  const int nv = pp_.free_count();
  const int k = pp_.picks();
  const double n = pp_.inst.n;
  std::vector<int> pos;
  pos.reserve(static_cast<std::size_t>(k));
  // Partial sums along the current prefix.
  std::vector<double> quad(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> lin(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> gain(static_cast<std::size_t>(k) + 1, 0.0);

  const std::function<void(int)> rec = [&](int start) {
    const auto depth = pos.size();
    if (static_cast<int>(depth) == k) {
      const double xax = quad[depth] / (n * n) + 2.0 * lin[depth] / n + fixed_quad_;
      const double gx = gain[depth] / n + fixed_gain_;
      f(pos, gx, xax);
      return;
    }
    for (int t = start; t <= nv - (k - static_cast<int>(depth)); ++t) {
      double add = avv_(t, t);
      for (const int a : pos) {
        add += 2.0 * avv_(a, t);
      }
      quad[depth + 1] = quad[depth] + add;
      lin[depth + 1] = lin[depth] + cross_[t];
      gain[depth + 1] = gain[depth] + pp_.inst.g[pp_.V[t]];
      pos.push_back(t);
      rec(t + 1);
      pos.pop_back();
    }
  };
  rec(0);
}

OracleResult enumerate_ed(const PreprocessedInstance& pp) {
  const LatticeWalker walker(pp);
  OracleResult r;
  walker.walk([&](const std::vector<int>& pos, double gx, double xax) {
    ++r.enumerated;
    if (!within_cap(xax, pp.inst.theta2)) {
      return;
    }
    ++r.feasible_count;
    if (r.feasible() && ties(gx, r.opt)) {
      auto candidate = to_original(pp, pos);
      if (candidate < r.argmax) {
        r.argmax = std::move(candidate);
        r.xAx = xax;
      }
      return;
    }
    if (gx > r.opt) {
      r.opt = gx;
      r.xAx = xax;
      r.argmax = to_original(pp, pos);
    }
  });
  r.bound = r.opt;
  finish(r, pp);
  return r;
}

OracleResult branch_and_bound_ed(const PreprocessedInstance& pp, double gap, double time_cap) {
  if (!(gap >= 0.0)) {
    throw InputError("gap must be nonnegative");
  }
  const auto start_time = std::chrono::steady_clock::now();
  const Matrix avv = oracle_block(pp);
  Vector cross;
  double fixed_quad = 0.0;
  double fixed_gain = 0.0;
  fixed_terms(pp, cross, fixed_quad, fixed_gain);

  const int nv = pp.free_count();
  const int k = pp.picks();
  const double n = pp.inst.n;
  const double theta2 = pp.inst.theta2;
  Vector gv(nv);
  for (int t = 0; t < nv; ++t) {
    gv[t] = pp.inst.g[pp.V[t]];
  }
  // Numerator matrices are entrywise nonnegative, which makes a partial
  // quadratic a lower bound on every completion.
  const bool nonneg = (avv.array() >= 0.0).all() && (cross.array() >= 0.0).all();

  struct Node {
    int depth;
    std::vector<int> chosen;
    double quad;  // sum of A over chosen x chosen
    double lin;   // sum of cross over chosen
    double gain;  // sum of g over chosen
    double bound;
    std::int64_t seq;
  };
  const auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) {
      return a.bound < b.bound;
    }
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::int64_t seq = 0;

  const auto completion_bound = [&](const Node& node) {
    const int need = k - static_cast<int>(node.chosen.size());
    double s = node.gain;
    for (int t = node.depth; t < node.depth + need; ++t) {
      s += gv[t];
    }
    return s / n + fixed_gain;
  };
  const auto xax_of = [&](double quad, double lin) {
    return quad / (n * n) + 2.0 * lin / n + fixed_quad;
  };
  const auto extend = [&](double& quad, double& lin, double& gain,
                          const std::vector<int>& chosen, int t) {
    double add = avv(t, t);
    for (const int a : chosen) {
      add += 2.0 * avv(a, t);
    }
    quad += add;
    lin += cross[t];
    gain += gv[t];
  };

  OracleResult r;
  std::vector<int> best_pos;
  const auto offer = [&](const std::vector<int>& pos, double gx, double xax) {
    ++r.feasible_count;
    if (gx > r.opt && !(r.feasible() && ties(gx, r.opt))) {
      r.opt = gx;
      r.xAx = xax;
      best_pos = pos;
    }
  };

  {
    Node root{0, {}, 0.0, 0.0, 0.0, 0.0, seq++};
    root.bound = completion_bound(root);
    open.push(std::move(root));
  }

  while (!open.empty()) {
    const double top = open.top().bound;
    if (r.feasible() && top - r.opt <= gap * std::max(1.0, std::abs(r.opt))) {
      break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
    if (elapsed.count() > time_cap) {
      r.timed_out = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++r.enumerated;
    const int need = k - static_cast<int>(node.chosen.size());

    // The top completion is the best point of this subtree when feasible.
    {
      std::vector<int> pos = node.chosen;
      double quad = node.quad;
      double lin = node.lin;
      double gain = node.gain;
      for (int t = node.depth; t < node.depth + need; ++t) {
        extend(quad, lin, gain, pos, t);
        pos.push_back(t);
      }
      const double xax = xax_of(quad, lin);
      if (within_cap(xax, theta2)) {
        offer(pos, gain / n + fixed_gain, xax);
        continue;
      }
      if (need == 0 || node.depth == nv) {
        continue;
      }
    }

    const int t = node.depth;
    // Include t.
    {
      Node child{t + 1, node.chosen, node.quad, node.lin, node.gain, 0.0, seq++};
      extend(child.quad, child.lin, child.gain, node.chosen, t);
      child.chosen.push_back(t);
      bool keep = true;
      if (nonneg) {
        // Remaining picks add at least their smallest diagonals.
        const int rest = need - 1;
        double lower = child.quad;
        if (rest > 0) {
          std::vector<double> diag;
          for (int s = t + 1; s < nv; ++s) {
            diag.push_back(avv(s, s));
          }
          std::partial_sort(diag.begin(), diag.begin() + rest, diag.end());
          for (int s = 0; s < rest; ++s) {
            lower += diag[static_cast<std::size_t>(s)];
          }
        }
        keep = within_cap(xax_of(lower, child.lin), theta2);
      }
      if (keep) {
        child.bound = completion_bound(child);
        open.push(std::move(child));
      }
    }
    // Exclude t.
    if (nv - (t + 1) >= need) {
      Node child{t + 1, std::move(node.chosen), node.quad, node.lin, node.gain, 0.0, seq++};
      child.bound = completion_bound(child);
      open.push(std::move(child));
    }
  }

  if (r.feasible()) {
    r.argmax = to_original(pp, best_pos);
  }
  if (open.empty()) {
    r.bound = r.opt;
  } else {
    r.bound = std::max(r.opt, open.top().bound);
  }
  finish(r, pp);
  return r;
}

PenaltyMaximizer enumerate_penalty_maximizer(const PreprocessedInstance& pp, double lambda) {
  if (lambda < 0.0) {
    throw InputError("penalty weight must be nonnegative");
  }
  const LatticeWalker walker(pp);
  PenaltyMaximizer best;
  walker.walk([&](const std::vector<int>& pos, double gx, double xax) {
    const double f = gx - lambda * std::max(xax - pp.inst.theta2, 0.0);
    if (f > best.value && !(best.value > -std::numeric_limits<double>::infinity() &&
                            ties(f, best.value))) {
      best.value = f;
      best.gx = gx;
      best.xAx = xax;
      best.chosen = to_original(pp, pos);
    }
  });
  return best;
}

}  // namespace eqd
