#pragma once

// Caravan parking on Z/nZ and its embedding in the continuous model with
// eps = 1/n and arrivals at the left ends of lattice cells.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "caravan/parking.hpp"
#include "caravan/samplers.hpp"

namespace caravan {

struct DiscreteCaravan {
  std::size_t size = 1;  // number of cars, >= 1
  std::size_t spot = 0;  // chosen spot in [0, n)
};

struct DiscreteTrajectory {
  std::size_t n = 0;
  /// Spot taken by each car, in parking order.
  std::vector<std::size_t> car_spots;
  /// cars_after[i] = cars parked after i caravans (cars_after[0] = 0).
  std::vector<std::size_t> cars_after;
  /// ranked[i] = circular block sizes after i caravans, nonincreasing.
  std::vector<std::vector<std::size_t>> ranked;

  std::size_t steps() const noexcept { return cars_after.size() - 1; }
  /// Occupancy after `step` caravans.
  std::vector<bool> occupied_at(std::size_t step) const;
};

/// Union-find over next-free-spot pointers. Throws std::invalid_argument
/// ("capacity exceeded") when the sizes add up to more than n.
DiscreteTrajectory knuth_park(std::size_t n, const std::vector<DiscreteCaravan>& caravans);
/// O(n) scan per car and per snapshot; reference engine for small n.
DiscreteTrajectory knuth_park_naive(std::size_t n, const std::vector<DiscreteCaravan>& caravans);

/// Ranked circular runs of occupied spots.
std::vector<std::size_t> circular_blocks(const std::vector<bool>& occupied);

/// Caravans with integer lengths truncated to the budget n and spots
/// floor(n U_i).
std::vector<DiscreteCaravan> sample_discrete_caravans(std::size_t n, const CaravanLaw& law, std::uint64_t seed);

/// Continuous instance with p_i = size_i / n and s_i = spot_i / n.
CaravanInstance embed_discrete(std::size_t n, const std::vector<DiscreteCaravan>& caravans);

struct EquivalenceReport {
  bool pass = true;
  std::size_t steps_checked = 0;
  double max_discrepancy = 0.0;
  std::vector<std::size_t> failing_steps;
};

/// Discrete block sizes / n against the continuous Λ at every step.
EquivalenceReport discrete_continuous_equiv(std::size_t n, const std::vector<DiscreteCaravan>& caravans,
                                            double tol = 1e-12);
EquivalenceReport discrete_continuous_equiv(std::size_t n, const CaravanLaw& law, std::uint64_t seed,
                                            double tol = 1e-12);

/// Rows `step,block_rank,block_size`.
void write_discrete_csv(std::ostream& out, const DiscreteTrajectory& trajectory);

}  // namespace caravan
