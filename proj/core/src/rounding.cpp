#include "eqd/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "eqd/error.hpp"

namespace eqd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sign(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace

double gw_alpha() {
  const auto f = [](double t) { return (2.0 / std::numbers::pi) * t / (1.0 - std::cos(t)); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 1e-3;
  double b = std::numbers::pi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

Rounder::Rounder(const Matrix& Y) {
  if (Y.rows() != Y.cols() || Y.rows() < 1) {
    throw InputError("rounding needs a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (Y + Y.transpose()));
  const Vector& lam = eig.eigenvalues();
  const double floor = 1e-14 * std::max(1.0, lam.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam[k] > floor) {
      keep.push_back(k);
    }
  }
  if (keep.empty()) {
    throw InputError("rounding needs a nonzero positive semidefinite matrix");
  }
  factor_.resize(static_cast<Eigen::Index>(keep.size()), Y.rows());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    factor_.row(static_cast<Eigen::Index>(r)) =
        std::sqrt(lam[keep[r]]) * eig.eigenvectors().col(keep[r]).transpose();
  }
}

Vector Rounder::sample(std::uint64_t seed, std::uint64_t index) const {
  std::mt19937_64 gen(splitmix64(seed ^ splitmix64(index)));
  std::normal_distribution<double> normal;
  Vector v(factor_.rows());
  for (auto& c : v) {
    c = normal(gen);
  }
  v.normalize();
  const Vector proj = factor_.transpose() * v;
  const double anchor = sign(proj[0]);
  Vector y(proj.size() - 1);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = anchor * sign(proj[i + 1]);
  }
  return y;
}

Vector round_once(const SdpSolution& sol, std::uint64_t seed) {
  return Rounder(sol.Y).sample(seed, 0);
}

BoundsReport estimate_expectation(const SdpSolution& sol, const PreprocessedInstance& pp,
                                  int samples, std::uint64_t seed) {
  if (samples < 1) {
    throw InputError("samples must be positive");
  }
  const Rounder rounder(sol.Y);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double value = pp.transformed_objective(rounder.sample(seed, static_cast<std::uint64_t>(k)));
    sum += value;
    sum_sq += value * value;
  }
  BoundsReport out;
  out.samples = samples;
  out.expected = sum / samples;
  const double var =
      samples > 1 ? std::max(0.0, (sum_sq - samples * out.expected * out.expected) / (samples - 1))
                  : 0.0;
  out.std_error = std::sqrt(var / samples);
  out.opt_sdp = sol.objective;
  out.alpha = gw_alpha();
  const double two_over_pi = 2.0 / std::numbers::pi;
  const double spread = 2.0 * pp.gbarV.sum();
  out.lower = two_over_pi * sol.objective + (1.0 - two_over_pi) * (pp.gbar - spread);
  out.upper = out.alpha * sol.objective + (1.0 - out.alpha) * (pp.gbar + spread);
  return out;
}

Selection repair_to_selection(const Vector& y, const PreprocessedInstance& pp, double lambda) {
  const auto nv = static_cast<Eigen::Index>(pp.V.size());
  if (y.size() != nv) {
    throw InputError("signed vector must have length |V|");
  }
  std::vector<char> plus(static_cast<std::size_t>(nv));
  int count = 0;
  for (Eigen::Index k = 0; k < nv; ++k) {
    plus[k] = y[k] > 0.0;
    count += plus[k];
  }
  // V is ordered by descending g, so gbar_V is non-increasing along V:
  // drop positives from the back, add negatives from the front.
  for (Eigen::Index k = nv - 1; k >= 0 && count > pp.picks(); --k) {
    if (plus[k]) {
      plus[k] = 0;
      --count;
    }
  }
  for (Eigen::Index k = 0; k < nv && count < pp.picks(); ++k) {
    if (!plus[k]) {
      plus[k] = 1;
      ++count;
    }
  }
  std::vector<int> chosen;
  for (Eigen::Index k = 0; k < nv; ++k) {
    if (plus[k]) {
      chosen.push_back(pp.V[k]);
    }
  }
  return make_selection(pp, chosen, lambda);
}

}  // namespace eqd
