#pragma once

// Bridge encoding of the parking state.
//
// b_i(x) = -x + sum_{j<=i} p_j 1{x >= s_j}. With V the first location where
// b_m(x-) reaches its infimum, the blocks of A_i are the constancy
// intervals of x -> inf_{u in [V, V+x]} b_i(u), the running infimum being
// started from the left limit b_i(V-).

#include <cstddef>
#include <vector>

#include "caravan/model.hpp"

namespace caravan {

JumpDriftPath build_bridge(const CaravanInstance& instance, std::size_t i);

struct PathArgmin {
  double location = 0.0;  // V in [0, 1]; 1 only when the minimum is value(1-) alone
  double infimum = 0.0;   // value(V-)
};

/// Candidates are value(0-) = 0, the left limits at jump locations and
/// value(1-); ties go to the smallest location.
PathArgmin path_argmin(const JumpDriftPath& path);

/// Constancy interval of a running infimum, in sweep coordinates: the
/// interval [origin + start, origin + start + length) of the periodic path.
struct ConstancyInterval {
  double start = 0.0;
  double length = 0.0;
};

/// Single forward sweep over [origin, origin + 1) of the periodic extension,
/// starting the running infimum at value(origin-). A block opens when a jump
/// lifts the path above the running minimum and closes where the drift
/// brings it back. Throws std::invalid_argument ("supercritical mass") when
/// the jump mass exceeds |slope|.
std::vector<ConstancyInterval> constancy_intervals(const JumpDriftPath& path, double origin);

RankedMassPartition constancy_blocks(const JumpDriftPath& path, double origin);

/// output(x) = value(V + x) - infimum. The left limit at 0 is 0; a jump
/// located at V becomes a jump at 0.
JumpDriftPath vervaat(const JumpDriftPath& path);

struct LambReport {
  bool pass = true;
  double max_discrepancy = 0.0;
  std::size_t steps_checked = 0;
  std::vector<std::size_t> failing_steps;
};

/// Compares Λ(i) from the direct simulation with the bridge constancy
/// masses for every step of a complete instance (tolerance 1e-9).
LambReport lamb_check(const CaravanInstance& instance, double tol = 1e-9);

}  // namespace caravan
