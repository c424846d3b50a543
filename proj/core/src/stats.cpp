#include "caravan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "caravan/limit.hpp"
#include "caravan/parallel.hpp"
#include "caravan/parking.hpp"

namespace caravan {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    // Step past every copy of the smaller value in both samples.
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

MeanSe mc_mean_se(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("mc_mean_se needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return MeanSe{mean, std::sqrt(ss / (n - 1.0) / n)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

namespace {

// A heavy draw can fill the lot with fewer caravans than the time shift asks
// for; the window then starts at the first caravan.
std::size_t clamped_backward_index(std::size_t steps, double eps, double alpha, double t) {
  try {
    return backward_index(steps, eps, alpha, t);
  } catch (const std::out_of_range&) {
    return 0;
  }
}

}  // namespace

double drift_deviation(const CaravanInstance& instance, double eps, double alpha, double t, double mu1) {
  const std::size_t m = instance.size();
  const std::size_t first = clamped_backward_index(m, eps, alpha, t);
  const double scale = std::pow(eps, 1.0 / alpha - 1.0);  // p_j -> eps^{1/α} ℓ*_j

  std::vector<Jump> jumps;
  jumps.reserve(m - first);
  for (std::size_t j = first; j < m; ++j) {
    jumps.push_back(Jump{instance.arrivals[j].position(), scale * instance.masses[j]});
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.location < b.location; });

  // D - t μ₁ x decreases between steps, so the sup sits at step points.
  const double drift = t * mu1;
  double level = 0.0;
  double sup = 0.0;
  for (const Jump& j : jumps) {
    sup = std::max(sup, std::abs(level - drift * j.location));
    level += j.size;
    sup = std::max(sup, std::abs(level - drift * j.location));
  }
  return std::max(sup, std::abs(level - drift));
}

DriftReport drift_check(const CaravanLaw& law, double alpha, double t, double eps, std::size_t replicas,
                        std::uint64_t seed, unsigned threads) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  DriftReport report;
  report.eps = eps;
  report.t = t;
  report.deviations.resize(replicas);
  const double mu1 = law.mean();
  parallel_for(replicas, threads, [&](std::size_t r) {
    const CaravanInstance inst = make_instance(law, eps, derive_seed(seed, r));
    report.deviations[r] = drift_deviation(inst, eps, alpha, t, mu1);
  });
  report.median = median(report.deviations);
  return report;
}

namespace {

MarginalSample empty_sample(const std::vector<double>& ts, std::size_t replicas) {
  MarginalSample s;
  s.t = ts;
  s.first.assign(ts.size(), std::vector<double>(replicas));
  s.second.assign(ts.size(), std::vector<double>(replicas));
  s.top_two.assign(ts.size(), std::vector<double>(replicas));
  return s;
}

void record(MarginalSample& s, std::size_t k, std::size_t r, const RankedMassPartition& p) {
  s.first[k][r] = p[0];
  s.second[k][r] = p[1];
  s.top_two[k][r] = p[0] + p[1];
}

void check_times(const std::vector<double>& ts) {
  if (ts.empty()) throw std::invalid_argument("need at least one time");
  for (double t : ts) {
    if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");
  }
}

}  // namespace

MarginalSample caravan_marginals(const ConvergenceConfig& cfg) {
  check_times(cfg.t);
  MarginalSample s = empty_sample(cfg.t, cfg.replicas);
  parallel_for(cfg.replicas, cfg.threads, [&](std::size_t r) {
    const CaravanInstance inst = make_instance(cfg.law, cfg.eps, derive_seed(cfg.seed, 2 * r));
    std::vector<std::size_t> steps;
    for (double t : cfg.t) steps.push_back(clamped_backward_index(inst.size(), cfg.eps, cfg.alpha, t));
    const std::vector<RankedMassPartition> parts = ranked_at_steps(inst, steps);
    for (std::size_t k = 0; k < parts.size(); ++k) record(s, k, r, parts[k]);
  });
  return s;
}

MarginalSample limit_marginals(const ConvergenceConfig& cfg) {
  check_times(cfg.t);
  MarginalSample s = empty_sample(cfg.t, cfg.replicas);
  const double mu1 = cfg.law.mean();
  parallel_for(cfg.replicas, cfg.threads, [&](std::size_t r) {
    const LimitPath path = scaled_limit_bridge(cfg.law, cfg.grid, cfg.delta, derive_seed(cfg.seed, 2 * r + 1));
    for (std::size_t k = 0; k < cfg.t.size(); ++k) record(s, k, r, fragmentation(path, mu1 * cfg.t[k]));
  });
  return s;
}

std::vector<double> ConvergenceReport::largest_ks() const {
  std::vector<double> out;
  for (const KsEntry& e : ks) {
    if (e.rank == 1) out.push_back(e.value);
  }
  return out;
}

std::string ConvergenceReport::to_json(const std::string& params_json) const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(params_json);
  j["ks"] = nlohmann::json::array();
  for (const KsEntry& e : ks) j["ks"].push_back({{"t", e.t}, {"rank", e.rank}, {"value", e.value}});
  j["pass"] = pass;
  return j.dump(2);
}

ConvergenceReport compare_marginals(const MarginalSample& caravans, const MarginalSample& limit, double threshold,
                                    std::string experiment) {
  if (caravans.t != limit.t) throw std::invalid_argument("samples cover different times");
  ConvergenceReport report;
  report.experiment = std::move(experiment);
  report.pass = true;
  for (std::size_t k = 0; k < caravans.t.size(); ++k) {
    const double t = caravans.t[k];
    const double d1 = ks_statistic(caravans.first[k], limit.first[k]);
    report.ks.push_back({t, 1, d1});
    report.ks.push_back({t, 2, ks_statistic(caravans.second[k], limit.second[k])});
    report.ks.push_back({t, 0, ks_statistic(caravans.top_two[k], limit.top_two[k])});
    if (!(d1 <= threshold)) report.pass = false;
  }
  return report;
}

ConvergenceReport convergence_experiment(const ConvergenceConfig& cfg) {
  return compare_marginals(caravan_marginals(cfg), limit_marginals(cfg), cfg.threshold, "converge");
}

double sigma_of(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

std::size_t extreme_index(std::span<const double> ordered_masses, double t, double sigma) {
  if (!(t >= 0.0) || !(sigma > 0.0)) throw std::invalid_argument("need t >= 0 and sigma > 0");
  // relative slack so equal masses are not split by rounding in the tail sum
  const double budget = t * sigma * (1.0 + 1e-12);
  double tail = 0.0;
  // tail = sum_{j > i}; walk i down from m while the tail stays within budget
  std::size_t i = ordered_masses.size();
  while (i > 0 && tail + ordered_masses[i - 1] <= budget) {
    tail += ordered_masses[i - 1];
    --i;
  }
  return i;
}

ConvergenceReport extreme_convergence_experiment(const ExtremeConfig& cfg) {
  check_times(cfg.t);
  if (cfg.masses.empty()) throw std::invalid_argument("need at least one mass");
  const double sigma = sigma_of(cfg.masses);
  MarginalSample car = empty_sample(cfg.t, cfg.replicas);
  MarginalSample lim = empty_sample(cfg.t, cfg.replicas);

  parallel_for(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, 2 * r));
    std::vector<double> order = cfg.masses;
    std::shuffle(order.begin(), order.end(), rng);
    CaravanInstance inst;
    inst.masses = order;
    inst.arrivals.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      inst.arrivals.push_back(CirclePoint::wrap(std::generate_canonical<double, 53>(rng)));
    }
    std::vector<std::size_t> steps;
    for (double t : cfg.t) steps.push_back(extreme_index(order, t, sigma));
    const std::vector<RankedMassPartition> parts = ranked_at_steps(inst, steps);
    for (std::size_t k = 0; k < parts.size(); ++k) record(car, k, r, parts[k]);

    const GridPath path = extreme_bridge(cfg.theta, cfg.grid, derive_seed(cfg.seed, 2 * r + 1));
    for (std::size_t k = 0; k < cfg.t.size(); ++k) record(lim, k, r, fragmentation(path, cfg.t[k]));
  });
  return compare_marginals(car, lim, cfg.threshold, "extreme");
}

}  // namespace caravan
