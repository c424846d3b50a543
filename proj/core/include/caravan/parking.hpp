#pragma once

// Exact simulation of the sequential covering process A_0 ⊂ A_1 ⊂ ... ⊂ A_m.
//
// Caravan i+1 arrives at s, skips the occupied blocks of A_i clockwise and
// fills free space until its mass p is used up; its last car parks at the
// landing point t. The scan is event driven over block boundaries, so
// there is no grid and no root finding.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "caravan/model.hpp"

namespace caravan {

struct ParkStep {
  ArcSet occupied;      // A_{i+1}
  CirclePoint landing;  // t_{i+1}
  Profile piece;        // h_{i+1}: cars of this caravan trying each point
};

/// Parks one caravan on a copy of `occupied`. Throws std::invalid_argument
/// ("capacity exceeded") when p exceeds the free length.
ParkStep park_caravan(const ArcSet& occupied, CirclePoint s, double p);

/// In-place engine used for long runs; park_caravan wraps it.
class ParkingLot {
 public:
  ParkingLot() = default;
  explicit ParkingLot(ArcSet occupied) : occupied_(std::move(occupied)) {}

  /// Parks a caravan and returns its landing point. When `piece` is not
  /// null it receives h for this caravan.
  CirclePoint park(CirclePoint s, double p, Profile* piece = nullptr);

  const ArcSet& occupied() const noexcept { return occupied_; }

 private:
  ArcSet occupied_;
};

struct ParkingTrajectory {
  std::vector<ArcSet> occupied;              // A_0 .. A_m
  std::vector<CirclePoint> landings;         // t_1 .. t_m
  std::vector<RankedMassPartition> ranked;   // Λ(0) .. Λ(m)
  std::vector<Profile> pieces;               // h_1 .. h_m

  std::size_t steps() const noexcept { return landings.size(); }
};

/// Full trajectory with one arc-set snapshot per step; memory is O(m^2),
/// meant for instances of a few thousand caravans at most.
ParkingTrajectory run_parking(const CaravanInstance& instance);

/// Λ(i) without storing the trajectory.
RankedMassPartition ranked_at(const CaravanInstance& instance, std::size_t i);

/// Λ at several steps in one pass; `steps` may be in any order.
std::vector<RankedMassPartition> ranked_at_steps(const CaravanInstance& instance,
                                                 const std::vector<std::size_t>& steps);

/// H_i = h_1 + ... + h_i.
Profile profile(const CaravanInstance& instance, std::size_t i);

/// H_0 .. H_m from a trajectory.
std::vector<Profile> cumulative_profiles(const ParkingTrajectory& trajectory);

/// T - floor(t * eps^(-1/alpha)); throws std::out_of_range
/// ("time beyond process start") when negative.
std::size_t backward_index(std::size_t steps, double eps, double alpha, double t);

/// X^(eps)(t) = Λ(T_eps - floor(t eps^(-1/alpha))) for an instance built
/// with budget 1/eps (T_eps = instance.size()).
RankedMassPartition backward_marginal(const CaravanInstance& instance, double eps,
                                      double alpha, double t);

/// CSV with header `step,block_rank,block_start,block_length`; one row
/// per block per step, blocks ranked by decreasing length (ties by start).
void write_trajectory_csv(std::ostream& out, const ParkingTrajectory& trajectory);

}  // namespace caravan
