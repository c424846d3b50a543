#include "caravan/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace caravan {

namespace {

// Smallest k with k / G >= u, matching the comparison in JumpDriftPath::value.
std::size_t first_grid_index_at_or_after(double u, std::size_t grid) {
  const double g = static_cast<double>(grid);
  auto k = static_cast<std::size_t>(std::ceil(u * g));
  while (k > 0 && static_cast<double>(k - 1) / g >= u) --k;
  while (k <= grid && static_cast<double>(k) / g < u) ++k;
  return k;
}

void require_grid(const GridPath& path) {
  if (path.grid_size() < 1) throw std::invalid_argument("grid path needs at least two points");
}

}  // namespace

JumpDriftPath compensated_jump_path(std::span<const double> atoms, std::span<const double> locations) {
  if (atoms.size() != locations.size()) throw std::invalid_argument("atoms and locations differ in length");
  if (atoms.empty()) throw std::invalid_argument("no atoms above threshold");
  std::vector<Jump> jumps;
  jumps.reserve(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) jumps.push_back(Jump{locations[k], atoms[k]});
  // The slope must be minus the total as the path sums it, so value(1-) is 0.
  JumpDriftPath probe(-1.0, std::move(jumps));
  return JumpDriftPath(-probe.total_jump_mass(), probe.jumps());
}

StableLoopDraw stable_loop_draw(double alpha, double c, double mu1, double delta, std::uint64_t seed) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("stable loop index must lie in (1, 2)");
  if (!(c > 0.0) || !(mu1 > 0.0)) throw std::invalid_argument("need c > 0 and mu1 > 0");
  if (delta <= 0.0) delta = default_atom_threshold(alpha, c / mu1);
  StableLoopDraw draw;
  draw.atoms = poisson_atoms(alpha, c, mu1, delta, derive_seed(seed, 0));
  Rng loc_rng(derive_seed(seed, 1));
  draw.locations.resize(draw.atoms.size());
  for (double& u : draw.locations) u = CirclePoint::wrap(std::generate_canonical<double, 53>(loc_rng)).position();
  return draw;
}

JumpDriftPath stable_loop_path(double alpha, double c, double mu1, double delta, std::uint64_t seed) {
  const StableLoopDraw draw = stable_loop_draw(alpha, c, mu1, delta, seed);
  return compensated_jump_path(draw.atoms, draw.locations);
}

double limit_scale(double alpha, double mu1, double mu2_or_c) {
  if (!(mu1 > 0.0) || !(mu2_or_c > 0.0) || !std::isfinite(mu2_or_c)) {
    throw std::invalid_argument("limit constants must be finite and positive");
  }
  if (alpha == 2.0) return std::sqrt(mu2_or_c / mu1);
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("index must lie in (1, 2]");
  return std::pow(std::tgamma(2.0 - alpha) * mu2_or_c / ((alpha - 1.0) * mu1), 1.0 / alpha);
}

double limit_scale(const CaravanLaw& law) {
  const double a = law.index();
  return limit_scale(a, law.mean(), a == 2.0 ? law.second_moment() : law.tail_constant());
}

double time_shift(double alpha, double mu1, double mu2_or_c) {
  return std::log(limit_scale(alpha, mu1, mu2_or_c)) - std::log(mu1);
}

double time_shift(const CaravanLaw& law) {
  const double a = law.index();
  return time_shift(a, law.mean(), a == 2.0 ? law.second_moment() : law.tail_constant());
}

LimitPath scaled_limit_bridge(const CaravanLaw& law, std::size_t grid, double delta, std::uint64_t seed) {
  law.validate();
  if (law.index() == 2.0) {
    if (!std::isfinite(law.second_moment())) throw std::invalid_argument("index 2 needs finite mu2");
    GridPath path = brownian_bridge(grid, seed);
    const double scale = limit_scale(law);
    for (double& v : path.values) v *= scale;
    return path;
  }
  return stable_loop_path(law.index(), law.tail_constant(), law.mean(), delta, seed);
}

JumpDriftPath excursion_with_drift(const JumpDriftPath& path, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("drift must be nonnegative");
  const JumpDriftPath exc = vervaat(path);
  return JumpDriftPath(exc.slope() - t, exc.jumps());
}

GridPath excursion_with_drift(const GridPath& path, double t) {
  require_grid(path);
  if (!(t >= 0.0)) throw std::invalid_argument("drift must be nonnegative");
  const std::size_t g = path.grid_size();
  std::size_t argmin = 0;
  for (std::size_t k = 1; k < g; ++k) {
    if (path.values[k] < path.values[argmin]) argmin = k;
  }
  const double low = path.values[argmin];
  GridPath out;
  out.values.resize(g + 1);
  const double gd = static_cast<double>(g);
  for (std::size_t j = 0; j <= g; ++j) {
    const std::size_t k = (argmin + j) % g;
    out.values[j] = path.values[k] - low - t * (static_cast<double>(j) / gd);
  }
  return out;
}

LimitPath excursion_with_drift(const LimitPath& path, double t) {
  return std::visit([t](const auto& p) -> LimitPath { return excursion_with_drift(p, t); }, path);
}

std::vector<ConstancyInterval> fragment_intervals(const JumpDriftPath& path, double t) {
  return constancy_intervals(excursion_with_drift(path, t), 0.0);
}

std::vector<ConstancyInterval> fragment_intervals(const GridPath& path, double t) {
  const GridPath exc = excursion_with_drift(path, t);
  const std::size_t g = exc.grid_size();
  const double gd = static_cast<double>(g);
  std::vector<ConstancyInterval> out;
  double runmin = exc.values[0];
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  for (std::size_t j = 0; j < g; ++j) {
    const double next = exc.values[j + 1];
    if (next < runmin) {
      runmin = next;
      if (run_len > 0) out.push_back({static_cast<double>(run_start) / gd, static_cast<double>(run_len) / gd});
      run_len = 0;
    } else {
      if (run_len == 0) run_start = j;
      ++run_len;
    }
  }
  if (run_len > 0) out.push_back({static_cast<double>(run_start) / gd, static_cast<double>(run_len) / gd});
  return out;
}

namespace {

RankedMassPartition ranked_from(const std::vector<ConstancyInterval>& intervals) {
  std::vector<double> lengths;
  lengths.reserve(intervals.size());
  for (const ConstancyInterval& c : intervals) lengths.push_back(c.length);
  return RankedMassPartition(std::move(lengths));
}

}  // namespace

RankedMassPartition fragmentation(const JumpDriftPath& path, double t) {
  return ranked_from(fragment_intervals(path, t));
}

RankedMassPartition fragmentation(const GridPath& path, double t) {
  return ranked_from(fragment_intervals(path, t));
}

RankedMassPartition fragmentation(const LimitPath& path, double t) {
  return std::visit([t](const auto& p) { return fragmentation(p, t); }, path);
}

GridPath subsample(const GridPath& path, std::size_t factor) {
  require_grid(path);
  if (factor == 0 || path.grid_size() % factor != 0) {
    throw std::invalid_argument("subsample factor must divide the grid size");
  }
  GridPath out;
  out.values.reserve(path.grid_size() / factor + 1);
  for (std::size_t k = 0; k <= path.grid_size(); k += factor) out.values.push_back(path.values[k]);
  return out;
}

GridPath extreme_bridge(const ThetaSequence& theta, std::span<const double> locations, std::size_t grid,
                        std::uint64_t seed) {
  theta.validate();
  if (locations.size() != theta.atoms.size()) throw std::invalid_argument("one location per atom required");
  if (grid < 2) throw std::invalid_argument("extreme_bridge needs G >= 2");

  GridPath path;
  if (theta.theta0 > 0.0) {
    path = brownian_bridge(grid, derive_seed(seed, 2));
    for (double& v : path.values) v *= theta.theta0;
  } else {
    path.values.assign(grid + 1, 0.0);
  }
  if (theta.atoms.empty()) return path;

  // Jump sum by difference array, then the compensator.
  std::vector<double> steps(grid + 2, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < theta.atoms.size(); ++i) {
    steps[first_grid_index_at_or_after(locations[i], grid)] += theta.atoms[i];
    total += theta.atoms[i];
  }
  const double gd = static_cast<double>(grid);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    acc += steps[k];
    path.values[k] += acc - total * (static_cast<double>(k) / gd);
  }
  path.values[0] = 0.0;
  path.values[grid] = 0.0;
  return path;
}

GridPath extreme_bridge(const ThetaSequence& theta, std::size_t grid, std::uint64_t seed) {
  Rng loc_rng(derive_seed(seed, 1));
  std::vector<double> locations(theta.atoms.size());
  for (double& u : locations) u = CirclePoint::wrap(std::generate_canonical<double, 53>(loc_rng)).position();
  return extreme_bridge(theta, locations, grid, seed);
}

double merge_total_rate(const RankedMassPartition& partition) {
  const std::size_t k = partition.size();
  if (k < 2) throw std::invalid_argument("nothing to merge");
  return static_cast<double>(k - 1) * partition.sum();
}

MergeStep merge_dynamics_step(const RankedMassPartition& partition, Rng& rng) {
  const std::vector<double>& s = partition.masses();
  const std::size_t k = s.size();
  const double rate = merge_total_rate(partition);

  MergeStep step;
  step.waiting_time = -std::log(open_uniform(rng)) / rate;
  double target = open_uniform(rng) * rate;
  step.pair = {k - 2, k - 1};
  bool chosen = false;
  for (std::size_t i = 0; i < k && !chosen; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      target -= s[i] + s[j];
      if (target < 0.0) {
        step.pair = {i, j};
        chosen = true;
        break;
      }
    }
  }
  std::vector<double> next;
  next.reserve(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    if (i != step.pair.first && i != step.pair.second) next.push_back(s[i]);
  }
  next.push_back(s[step.pair.first] + s[step.pair.second]);
  step.partition = RankedMassPartition(std::move(next));
  return step;
}

void write_fragments_csv(std::ostream& out, std::size_t replica, double t,
                         const RankedMassPartition& masses, bool header) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  if (header) out << "replica,t,rank,mass\n";
  for (std::size_t r = 0; r < masses.size(); ++r) {
    out << replica << ',' << t << ',' << (r + 1) << ',' << masses[r] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace caravan
