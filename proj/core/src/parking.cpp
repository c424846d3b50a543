#include "caravan/parking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace caravan {

CirclePoint ParkingLot::park(CirclePoint arrival, double p, Profile* piece) {
  if (!(p > 0.0)) throw std::invalid_argument("caravan mass must be positive");
  if (p > 1.0 - occupied_.total_length() + kCircleTol) {
    throw std::invalid_argument("capacity exceeded");
  }

  const double s = arrival.position();
  double block_start = s;  // start of the merged block, unwrapped
  double start_key = s;    // the same, wrapped exactly
  double cursor = s;       // first point not yet examined
  double remaining = p;
  std::vector<ProfileKnot> knots;
  std::vector<double> exact;  // wrapped position of each knot when known exactly, else NaN
  const double unknown = std::numeric_limits<double>::quiet_NaN();
  auto add = [&](ProfileKnot knot, double w) {
    knots.push_back(knot);
    exact.push_back(w);
  };

  if (auto pred = occupied_.block_at_or_before(s); pred && pred->end() >= s - kCircleTol) {
    // Arrival inside (or touching the end of) a block: cars drive through it.
    block_start = pred->start;
    start_key = occupied_.stored_start(pred->start);
    if (pred->end() > s) {
      add({s, p, 0.0}, s);
      cursor = pred->end();
    }
    occupied_.erase_block(pred->start);
  }

  double landing = 0.0;
  double landing_key = unknown;
  double block_end = 0.0;
  for (;;) {
    auto next = occupied_.block_at_or_after(cursor);
    const double gap = next ? next->start - cursor : std::numeric_limits<double>::infinity();
    if (gap > remaining + kCircleTol) {
      add({cursor, remaining, -1.0}, cursor == s ? s : unknown);
      landing = cursor + remaining;
      block_end = landing;
      break;
    }
    if (gap > 0.0) add({cursor, remaining, -1.0}, cursor == s ? s : unknown);
    remaining = std::max(0.0, remaining - gap);
    const double key = occupied_.stored_start(next->start);
    occupied_.erase_block(next->start);
    cursor = next->end();
    if (remaining <= kCircleTol) {
      // The last car parks right at the start of the next block.
      landing = next->start;
      landing_key = key;
      block_end = cursor;
      break;
    }
    add({next->start, remaining, 0.0}, key);
  }

  if (block_end - block_start >= 1.0 - kCircleTol) {
    // Full circle: the last car lands back at the block start.
    landing = std::round(landing - block_start) + block_start;
    landing_key = start_key;
  }
  if (landing < s + 1.0 - kCircleTol) add({landing, 0.0, 0.0}, landing_key);
  if (piece != nullptr) *piece = Profile::from_period(std::move(knots), exact);

  const double length = std::min(block_end - block_start, 1.0);
  occupied_.insert(Arc{start_key, length >= 1.0 - kCircleTol ? 1.0 : length});
  return std::isnan(landing_key) ? CirclePoint::wrap(landing) : CirclePoint::wrap(landing_key);
}

ParkStep park_caravan(const ArcSet& occupied, CirclePoint s, double p) {
  ParkingLot lot(occupied);
  Profile piece;
  const CirclePoint landing = lot.park(s, p, &piece);
  return ParkStep{lot.occupied(), landing, std::move(piece)};
}

ParkingTrajectory run_parking(const CaravanInstance& instance) {
  instance.validate();
  ParkingTrajectory traj;
  const std::size_t m = instance.size();
  traj.occupied.reserve(m + 1);
  traj.ranked.reserve(m + 1);
  traj.landings.reserve(m);
  traj.pieces.reserve(m);

  ParkingLot lot;
  traj.occupied.push_back(lot.occupied());
  traj.ranked.emplace_back();
  for (std::size_t i = 0; i < m; ++i) {
    Profile piece;
    traj.landings.push_back(lot.park(instance.arrivals[i], instance.masses[i], &piece));
    traj.pieces.push_back(std::move(piece));
    traj.occupied.push_back(lot.occupied());
    traj.ranked.push_back(ranked_lengths(lot.occupied()));
  }
  return traj;
}

std::vector<RankedMassPartition> ranked_at_steps(const CaravanInstance& instance,
                                                 const std::vector<std::size_t>& steps) {
  instance.validate();
  std::vector<std::size_t> order(steps.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return steps[a] < steps[b]; });

  std::vector<RankedMassPartition> out(steps.size());
  ParkingLot lot;
  std::size_t done = 0;
  for (std::size_t k : order) {
    if (steps[k] > instance.size()) throw std::out_of_range("step index beyond the last caravan");
    for (; done < steps[k]; ++done) lot.park(instance.arrivals[done], instance.masses[done]);
    out[k] = ranked_lengths(lot.occupied());
  }
  return out;
}

RankedMassPartition ranked_at(const CaravanInstance& instance, std::size_t i) {
  return ranked_at_steps(instance, {i}).front();
}

Profile profile(const CaravanInstance& instance, std::size_t i) {
  instance.validate();
  if (i > instance.size()) throw std::out_of_range("step index beyond the last caravan");
  ParkingLot lot;
  Profile total;
  for (std::size_t j = 0; j < i; ++j) {
    Profile piece;
    lot.park(instance.arrivals[j], instance.masses[j], &piece);
    total = total + piece;
  }
  return total;
}

std::vector<Profile> cumulative_profiles(const ParkingTrajectory& trajectory) {
  std::vector<Profile> out;
  out.reserve(trajectory.pieces.size() + 1);
  out.emplace_back();
  for (const Profile& piece : trajectory.pieces) out.push_back(out.back() + piece);
  return out;
}

std::size_t backward_index(std::size_t steps, double eps, double alpha, double t) {
  if (!(eps > 0.0) || !(alpha > 1.0 && alpha <= 2.0) || !(t >= 0.0)) {
    throw std::invalid_argument("backward_index: need eps > 0, alpha in (1,2], t >= 0");
  }
  // The relative nudge keeps exact integers (e.g. 100 for eps = 1e-4,
  // alpha = 2) from rounding down to their predecessor.
  const double shift = std::floor(t * std::pow(eps, -1.0 / alpha) * (1.0 + 1e-12));
  if (shift > static_cast<double>(steps)) throw std::out_of_range("time beyond process start");
  return steps - static_cast<std::size_t>(shift);
}

RankedMassPartition backward_marginal(const CaravanInstance& instance, double eps, double alpha,
                                      double t) {
  return ranked_at(instance, backward_index(instance.size(), eps, alpha, t));
}

void write_trajectory_csv(std::ostream& out, const ParkingTrajectory& trajectory) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "step,block_rank,block_start,block_length\n";
  for (std::size_t step = 0; step < trajectory.occupied.size(); ++step) {
    auto blocks = trajectory.occupied[step].blocks();
    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const Arc& a, const Arc& b) { return a.length > b.length; });
    for (std::size_t r = 0; r < blocks.size(); ++r) {
      out << step << ',' << (r + 1) << ',' << blocks[r].start << ',' << blocks[r].length << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace caravan
