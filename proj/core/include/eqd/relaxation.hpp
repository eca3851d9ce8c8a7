#pragma once

#include <map>
#include <string>
#include <string_view>

#include "eqd/kinship.hpp"

namespace eqd {

enum class RelaxationKind { LP, SOCP, SDP };
enum class SolveStatus { Optimal, NearOptimal, Failed };

std::string_view to_string(RelaxationKind kind);
std::string_view to_string(SolveStatus status);

/// Outcome of one continuous relaxation.
struct RelaxationResult {
  RelaxationKind kind = RelaxationKind::LP;
  /// Relaxed contribution vector over all Z indices.
  Vector x;
  /// Signed variables y_V (LP and SDP only).
  Vector yV;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Failed;
  std::map<std::string, double> residuals;
  int iterations = 0;
  double wall_time = 0.0;
};

}  // namespace eqd
