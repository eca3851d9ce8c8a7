#pragma once

#include <cstdint>

#include "eqd/relax_sdp.hpp"
#include "eqd/selection.hpp"

namespace eqd {

/// min over theta in (0, pi] of (2/pi) theta / (1 - cos theta), by golden
/// section. About 0.87856.
double gw_alpha();

/// Random-hyperplane rounding against a factorization Y = V'V of an SDP
/// solution (negative eigenvalues clipped to 0).
class Rounder {
 public:
  explicit Rounder(const Matrix& Y);

  /// Signs y_i = sign(v'v0) sign(v'vi), i = 1..|V|, for the sample drawn
  /// from (seed, index). Each sample has its own generator, so results do
  /// not depend on how samples are partitioned.
  Vector sample(std::uint64_t seed, std::uint64_t index) const;

  /// Rank of the clipped factorization.
  Eigen::Index rank() const noexcept { return factor_.rows(); }

 private:
  // Columns are the vectors v0, v1, ..., v|V|.
  Matrix factor_;
};

/// One rounded vector in {-1, +1}^|V|.
Vector round_once(const SdpSolution& sol, std::uint64_t seed);

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  /// Mean of 2 gbar_V'y + gbar over the samples.
  double expected = 0.0;
  /// Standard error of `expected`.
  double std_error = 0.0;
  int samples = 0;
  double opt_sdp = 0.0;
  double alpha = 0.0;
};

/// lower = (2/pi) OPT_SDP + (1 - 2/pi)(-2 gbar_V'e + gbar)
/// upper = alpha OPT_SDP + (1 - alpha)(2 gbar_V'e + gbar)
BoundsReport estimate_expectation(const SdpSolution& sol, const PreprocessedInstance& pp,
                                  int samples = 1000, std::uint64_t seed = 0);

/// Flips the smallest-gbar positives (or largest-gbar negatives) until
/// exactly N - p entries are +1.
Selection repair_to_selection(const Vector& y, const PreprocessedInstance& pp,
                              double lambda = 0.0);

}  // namespace eqd
