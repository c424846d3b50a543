#pragma once

// Limiting objects: stable loops, scaled Brownian bridges, excursions with
// drift, the fragmentation they encode, extreme θ-bridges and a small
// rate-based merge oracle for the additive coalescent.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "caravan/bridge.hpp"
#include "caravan/model.hpp"
#include "caravan/samplers.hpp"

namespace caravan {

inline constexpr std::size_t kDefaultGrid = std::size_t{1} << 20;

using LimitPath = std::variant<GridPath, JumpDriftPath>;

/// Compensated jump sum sum Δ_i (1{x >= U_i} - x) with the given atoms and
/// locations. Throws std::invalid_argument when there are no atoms.
JumpDriftPath compensated_jump_path(std::span<const double> atoms, std::span<const double> locations);

/// Atoms of intensity α c μ₁^-1 x^{-1-α} dx above delta (0 picks
/// default_atom_threshold) at iid uniform locations.
JumpDriftPath stable_loop_path(double alpha, double c, double mu1, double delta, std::uint64_t seed);

/// Atoms and locations used by stable_loop_path for the same arguments.
struct StableLoopDraw {
  std::vector<double> atoms;
  std::vector<double> locations;
};
StableLoopDraw stable_loop_draw(double alpha, double c, double mu1, double delta, std::uint64_t seed);

/// Scale of the limit bridge: sqrt(μ₂/μ₁) for index 2, or
/// (Γ(2-α) c / ((α-1) μ₁))^{1/α} below 2.
double limit_scale(const CaravanLaw& law);
double limit_scale(double alpha, double mu1, double mu2_or_c);

/// Time shift such that the caravan fragmentation at e^{-t} matches the
/// standard coalescent at t + shift.
double time_shift(const CaravanLaw& law);
double time_shift(double alpha, double mu1, double mu2_or_c);

/// Index 2: scale * brownian_bridge on `grid` points. Below 2: the exact
/// stable loop (scaling carried by the atom intensity). Throws
/// std::invalid_argument for index 2 with infinite μ₂.
LimitPath scaled_limit_bridge(const CaravanLaw& law, std::size_t grid, double delta, std::uint64_t seed);

/// Vervaat transform followed by the drift -t x.
JumpDriftPath excursion_with_drift(const JumpDriftPath& path, double t);
GridPath excursion_with_drift(const GridPath& path, double t);
LimitPath excursion_with_drift(const LimitPath& path, double t);

/// Constancy intervals of the running infimum (from 0) of the drifted
/// excursion, in excursion coordinates and in sweep order.
std::vector<ConstancyInterval> fragment_intervals(const JumpDriftPath& path, double t);
std::vector<ConstancyInterval> fragment_intervals(const GridPath& path, double t);

RankedMassPartition fragmentation(const JumpDriftPath& path, double t);
RankedMassPartition fragmentation(const GridPath& path, double t);
RankedMassPartition fragmentation(const LimitPath& path, double t);

/// Every grid point k*factor of the input; a bridge on G*factor points
/// subsampled this way is a bridge on G points.
GridPath subsample(const GridPath& path, std::size_t factor);

/// B(x) = θ₀ β(x) + sum θ_i (1{x >= U_i} - x) on the grid k/G.
GridPath extreme_bridge(const ThetaSequence& theta, std::span<const double> locations, std::size_t grid,
                        std::uint64_t seed);
/// Locations drawn from the seed.
GridPath extreme_bridge(const ThetaSequence& theta, std::size_t grid, std::uint64_t seed);

struct MergeStep {
  RankedMassPartition partition;
  double waiting_time = 0.0;
  std::pair<std::size_t, std::size_t> pair{0, 0};  // ranks merged, i < j
};

/// One jump of the additive coalescent: every pair (i, j) merges at rate
/// s_i + s_j. Throws std::invalid_argument ("nothing to merge") with fewer
/// than two masses.
MergeStep merge_dynamics_step(const RankedMassPartition& partition, Rng& rng);
double merge_total_rate(const RankedMassPartition& partition);

/// Rows `replica,t,rank,mass`; the header is written when requested.
void write_fragments_csv(std::ostream& out, std::size_t replica, double t,
                         const RankedMassPartition& masses, bool header);

}  // namespace caravan
