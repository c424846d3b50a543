#include "caravan/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace caravan {

namespace {

void check_input(std::size_t n, const std::vector<DiscreteCaravan>& caravans) {
  if (n == 0) throw std::invalid_argument("lot size must be positive");
  std::size_t total = 0;
  for (const DiscreteCaravan& c : caravans) {
    if (c.size == 0) throw std::invalid_argument("caravan size must be positive");
    if (c.spot >= n) throw std::invalid_argument("spot outside the lot");
    total += c.size;
    if (total > n) throw std::invalid_argument("capacity exceeded");
  }
}

std::vector<std::size_t> ranked_sizes(const std::multiset<std::size_t, std::greater<>>& sizes) {
  return {sizes.begin(), sizes.end()};
}

// Disjoint sets with path halving.
struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

}  // namespace

std::vector<bool> DiscreteTrajectory::occupied_at(std::size_t step) const {
  if (step > steps()) throw std::out_of_range("step beyond the last caravan");
  std::vector<bool> occ(n, false);
  for (std::size_t k = 0; k < cars_after[step]; ++k) occ[car_spots[k]] = true;
  return occ;
}

DiscreteTrajectory knuth_park(std::size_t n, const std::vector<DiscreteCaravan>& caravans) {
  check_input(n, caravans);
  DiscreteTrajectory traj;
  traj.n = n;
  traj.cars_after.push_back(0);
  traj.ranked.emplace_back();

  // next_free: a free spot is its own root; an occupied spot points clockwise.
  Dsu next_free(n);
  // blocks: union of adjacent occupied spots, with run sizes.
  Dsu blocks(n);
  std::vector<std::size_t> block_size(n, 0);
  std::vector<bool> occ(n, false);
  std::multiset<std::size_t, std::greater<>> sizes;
  std::size_t parked = 0;

  auto join = [&](std::size_t a, std::size_t b) {
    a = blocks.find(a);
    b = blocks.find(b);
    if (a == b) return;
    sizes.erase(sizes.find(block_size[a]));
    sizes.erase(sizes.find(block_size[b]));
    blocks.parent[b] = a;
    block_size[a] += block_size[b];
    sizes.insert(block_size[a]);
  };

  for (const DiscreteCaravan& c : caravans) {
    for (std::size_t k = 0; k < c.size; ++k) {
      const std::size_t x = next_free.find(c.spot);
      occ[x] = true;
      ++parked;
      traj.car_spots.push_back(x);
      if (parked < n) next_free.parent[x] = (x + 1) % n;
      block_size[x] = 1;
      sizes.insert(1);
      const std::size_t left = (x + n - 1) % n;
      const std::size_t right = (x + 1) % n;
      if (occ[left]) join(left, x);
      if (occ[right]) join(x, right);
    }
    traj.cars_after.push_back(parked);
    traj.ranked.push_back(ranked_sizes(sizes));
  }
  return traj;
}

std::vector<std::size_t> circular_blocks(const std::vector<bool>& occupied) {
  const std::size_t n = occupied.size();
  const auto free_it = std::find(occupied.begin(), occupied.end(), false);
  if (free_it == occupied.end()) return n == 0 ? std::vector<std::size_t>{} : std::vector<std::size_t>{n};
  const auto start = static_cast<std::size_t>(free_it - occupied.begin());
  std::vector<std::size_t> out;
  std::size_t run = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (occupied[(start + k) % n]) {
      ++run;
    } else if (run > 0) {
      out.push_back(run);
      run = 0;
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

DiscreteTrajectory knuth_park_naive(std::size_t n, const std::vector<DiscreteCaravan>& caravans) {
  check_input(n, caravans);
  DiscreteTrajectory traj;
  traj.n = n;
  traj.cars_after.push_back(0);
  traj.ranked.emplace_back();
  std::vector<bool> occ(n, false);
  std::size_t parked = 0;
  for (const DiscreteCaravan& c : caravans) {
    for (std::size_t k = 0; k < c.size; ++k) {
      std::size_t x = c.spot;
      while (occ[x]) x = (x + 1) % n;
      occ[x] = true;
      ++parked;
      traj.car_spots.push_back(x);
    }
    traj.cars_after.push_back(parked);
    traj.ranked.push_back(circular_blocks(occ));
  }
  return traj;
}

std::vector<DiscreteCaravan> sample_discrete_caravans(std::size_t n, const CaravanLaw& law, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("lot size must be positive");
  law.validate();
  if (!law.integer_valued()) throw std::invalid_argument("discrete parking needs an integer-valued law");
  Rng length_rng(derive_seed(seed, 0));
  Rng spot_rng(derive_seed(seed, 1));
  const TruncatedLengths lt =
      truncate_to_budget_stream([&] { return law.sample(length_rng); }, static_cast<double>(n));
  std::vector<DiscreteCaravan> out;
  out.reserve(lt.count);
  const double nd = static_cast<double>(n);
  for (double l : lt.lengths) {
    const double u = std::generate_canonical<double, 53>(spot_rng);
    const auto spot = std::min(static_cast<std::size_t>(std::floor(nd * u)), n - 1);
    out.push_back(DiscreteCaravan{static_cast<std::size_t>(std::llround(l)), spot});
  }
  return out;
}

CaravanInstance embed_discrete(std::size_t n, const std::vector<DiscreteCaravan>& caravans) {
  check_input(n, caravans);
  CaravanInstance inst;
  const double nd = static_cast<double>(n);
  for (const DiscreteCaravan& c : caravans) {
    inst.masses.push_back(static_cast<double>(c.size) / nd);
    inst.arrivals.push_back(CirclePoint(static_cast<double>(c.spot) / nd));
  }
  return inst;
}

EquivalenceReport discrete_continuous_equiv(std::size_t n, const std::vector<DiscreteCaravan>& caravans,
                                            double tol) {
  const DiscreteTrajectory disc = knuth_park(n, caravans);
  const ParkingTrajectory cont = run_parking(embed_discrete(n, caravans));
  const double nd = static_cast<double>(n);
  EquivalenceReport report;
  for (std::size_t i = 1; i <= disc.steps(); ++i) {
    std::vector<double> scaled;
    scaled.reserve(disc.ranked[i].size());
    for (std::size_t b : disc.ranked[i]) scaled.push_back(static_cast<double>(b) / nd);
    const double d = RankedMassPartition::max_abs_difference(RankedMassPartition(std::move(scaled)), cont.ranked[i]);
    report.max_discrepancy = std::max(report.max_discrepancy, d);
    ++report.steps_checked;
    if (!(d <= tol)) {
      report.pass = false;
      report.failing_steps.push_back(i);
    }
  }
  return report;
}

EquivalenceReport discrete_continuous_equiv(std::size_t n, const CaravanLaw& law, std::uint64_t seed, double tol) {
  return discrete_continuous_equiv(n, sample_discrete_caravans(n, law, seed), tol);
}

void write_discrete_csv(std::ostream& out, const DiscreteTrajectory& trajectory) {
  out << "step,block_rank,block_size\n";
  for (std::size_t step = 0; step < trajectory.ranked.size(); ++step) {
    const auto& blocks = trajectory.ranked[step];
    for (std::size_t r = 0; r < blocks.size(); ++r) out << step << ',' << (r + 1) << ',' << blocks[r] << '\n';
  }
}

}  // namespace caravan
