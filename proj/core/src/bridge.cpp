#include "caravan/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "caravan/parking.hpp"

namespace caravan {

JumpDriftPath build_bridge(const CaravanInstance& instance, std::size_t i) {
  if (i == 0 || i > instance.size()) throw std::out_of_range("bridge step must lie in 1..m");
  std::vector<Jump> jumps;
  jumps.reserve(i);
  for (std::size_t j = 0; j < i; ++j) {
    jumps.push_back(Jump{instance.arrivals[j].position(), instance.masses[j]});
  }
  return JumpDriftPath(-1.0, std::move(jumps));
}

PathArgmin path_argmin(const JumpDriftPath& path) {
  // Ties within this margin count as equal so the first location wins.
  constexpr double kTie = 1e-13;
  PathArgmin best{0.0, 0.0};
  const auto& jumps = path.jumps();
  double before = 0.0;  // jump mass strictly left of the current location
  double running = 0.0;
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (k > 0 && jumps[k].location != jumps[k - 1].location) before = running;
    running += jumps[k].size;
    const double v = path.slope() * jumps[k].location + before;
    if (v < best.infimum - kTie) best = PathArgmin{jumps[k].location, v};
  }
  if (path.end_value() < best.infimum - kTie) best = PathArgmin{1.0, path.end_value()};
  return best;
}

std::vector<ConstancyInterval> constancy_intervals(const JumpDriftPath& path, double origin) {
  const double drift = -path.slope();
  if (path.total_jump_mass() > drift + kCircleTol) throw std::invalid_argument("supercritical mass");

  std::vector<Jump> rel;
  rel.reserve(path.jumps().size());
  const auto& src = path.jumps();
  const double w = wrap_unit(origin);
  const auto first = std::lower_bound(src.begin(), src.end(), w,
                                      [](const Jump& j, double v) { return j.location < v; });
  for (auto it = first; it != src.end(); ++it) rel.push_back(Jump{wrap_unit(it->location - origin), it->size});
  for (auto it = src.begin(); it != first; ++it) rel.push_back(Jump{wrap_unit(it->location - origin), it->size});
  auto by_location = [](const Jump& a, const Jump& b) { return a.location < b.location; };
  if (!std::is_sorted(rel.begin(), rel.end(), by_location)) std::stable_sort(rel.begin(), rel.end(), by_location);

  std::vector<ConstancyInterval> out;
  double cur = 0.0;     // value relative to value(origin-)
  double runmin = 0.0;  // running infimum
  double x_prev = 0.0;
  bool open = false;
  double open_start = 0.0;

  // Advances the path to x- and settles the running minimum there.
  auto advance = [&](double x) {
    const double v = cur - drift * (x - x_prev);
    if (open) {
      const double x_cross = x_prev + (cur - runmin) / drift;
      if (x_cross < x - kCircleTol) {
        out.push_back(ConstancyInterval{open_start, x_cross - open_start});
        open = false;
        runmin = v;
      } else {
        runmin = std::min(runmin, v);
      }
    } else {
      runmin = v;
    }
    cur = v;
    x_prev = x;
  };

  for (const Jump& j : rel) {
    advance(j.location);
    cur += j.size;
    if (!open) {
      open = true;
      open_start = j.location;
    }
  }
  advance(1.0);
  if (open) out.push_back(ConstancyInterval{open_start, 1.0 - open_start});
  return out;
}

RankedMassPartition constancy_blocks(const JumpDriftPath& path, double origin) {
  std::vector<double> lengths;
  for (const ConstancyInterval& c : constancy_intervals(path, origin)) lengths.push_back(c.length);
  return RankedMassPartition(std::move(lengths));
}

JumpDriftPath vervaat(const JumpDriftPath& path) {
  const PathArgmin am = path_argmin(path);
  std::vector<Jump> jumps;
  jumps.reserve(path.jumps().size());
  // Start at the first jump at or after V so the shifted list is already sorted.
  const auto& src = path.jumps();
  const auto first = std::lower_bound(src.begin(), src.end(), am.location,
                                      [](const Jump& j, double v) { return j.location < v; });
  for (auto it = first; it != src.end(); ++it) jumps.push_back(Jump{wrap_unit(it->location - am.location), it->size});
  for (auto it = src.begin(); it != first; ++it) jumps.push_back(Jump{wrap_unit(it->location - am.location), it->size});
  return JumpDriftPath(path.slope(), std::move(jumps));
}

LambReport lamb_check(const CaravanInstance& instance, double tol) {
  if (!instance.is_complete()) throw std::invalid_argument("lamb_check needs a complete instance");
  const ParkingTrajectory traj = run_parking(instance);
  const std::size_t m = instance.size();
  const double v = path_argmin(build_bridge(instance, m)).location;

  LambReport report;
  for (std::size_t i = 1; i <= m; ++i) {
    const RankedMassPartition bridge_masses = constancy_blocks(build_bridge(instance, i), v);
    const double d = RankedMassPartition::max_abs_difference(traj.ranked[i], bridge_masses);
    report.max_discrepancy = std::max(report.max_discrepancy, d);
    ++report.steps_checked;
    if (!(d <= tol)) {
      report.pass = false;
      report.failing_steps.push_back(i);
    }
  }
  return report;
}

}  // namespace caravan
