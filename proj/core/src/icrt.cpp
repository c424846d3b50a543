#include "caravan/icrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "caravan/parallel.hpp"
#include "caravan/stats.hpp"

namespace caravan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_index(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (1, 2)");
}

// 1 - (1 + y) e^{-y}, with the series near 0 where the difference cancels.
double gamma2_cdf(double y) {
  if (y < 1e-3) {
    const double y2 = y * y;
    return y2 * (0.5 - y / 3.0 + y2 / 8.0 - y2 * y / 30.0 + y2 * y2 / 144.0);
  }
  return -std::expm1(-y) - y * std::exp(-y);
}

// gamma2_cdf(y) y^{-1-α}; the y^2 is divided out near 0 so tiny nodes stay finite.
double small_atom_integrand(double alpha, double y) {
  if (y <= 0.0) return 0.0;
  if (y < 1e-3) {
    const double y2 = y * y;
    return (0.5 - y / 3.0 + y2 / 8.0 - y2 * y / 30.0 + y2 * y2 / 144.0) * std::pow(y, 1.0 - alpha);
  }
  return gamma2_cdf(y) * std::pow(y, -1.0 - alpha);
}

// ∫_0^z gamma2_cdf(y) y^{-1-α} dy from the leading series terms.
double g_series(double alpha, double z) {
  return std::pow(z, 2.0 - alpha) / (2.0 * (2.0 - alpha)) - std::pow(z, 3.0 - alpha) / (3.0 * (3.0 - alpha)) +
         std::pow(z, 4.0 - alpha) / (8.0 * (4.0 - alpha));
}

constexpr double kTableZ0 = 1e-8;
constexpr double kTableZ1 = 1e6;
constexpr std::size_t kNodesPerDecade = 2000;

McEstimate to_estimate(std::span<const double> values) {
  const MeanSe m = mc_mean_se(values);
  return McEstimate{m.mean, m.se, values.size()};
}

}  // namespace

IcrtEventSet sample_events(const ThetaSequence& theta, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (theta.theta0 < 0.0) throw std::invalid_argument("theta0 must be nonnegative");
  Rng rng(seed);
  IcrtEventSet ev;
  ev.horizon = horizon;

  if (theta.theta0 > 0.0) {
    std::poisson_distribution<long long> count(theta.theta0 * theta.theta0 * horizon * horizon / 2.0);
    const long long n = count(rng);
    ev.brownian.reserve(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) {
      // density proportional to x on (0, L]
      const double u = horizon * std::sqrt(open_uniform(rng));
      ev.brownian.push_back(CutJoinPair{u, u * open_uniform(rng)});
    }
    std::sort(ev.brownian.begin(), ev.brownian.end(),
              [](const CutJoinPair& a, const CutJoinPair& b) { return a.cut < b.cut; });
  }

  ev.atom_points.resize(theta.atoms.size());
  for (std::size_t i = 0; i < theta.atoms.size(); ++i) {
    if (!(theta.atoms[i] > 0.0)) throw std::invalid_argument("theta atoms must be positive");
    std::poisson_distribution<long long> count(theta.atoms[i] * horizon);
    const long long n = count(rng);
    auto& pts = ev.atom_points[i];
    pts.resize(static_cast<std::size_t>(n));
    for (double& x : pts) x = horizon * open_uniform(rng);
    std::sort(pts.begin(), pts.end());
  }
  return ev;
}

std::vector<Cutpoint> cutpoints(const IcrtEventSet& events) {
  std::vector<Cutpoint> out;
  for (const CutJoinPair& p : events.brownian) out.push_back(Cutpoint{p.cut, p.join});
  for (const auto& pts : events.atom_points) {
    for (std::size_t j = 1; j < pts.size(); ++j) out.push_back(Cutpoint{pts[j], pts[0]});
  }
  std::sort(out.begin(), out.end(), [](const Cutpoint& a, const Cutpoint& b) { return a.position < b.position; });
  return out;
}

double eta_k(const IcrtEventSet& events, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const std::vector<Cutpoint> cuts = cutpoints(events);
  if (cuts.size() < k) throw std::out_of_range("horizon too short");
  return cuts[k - 1].position;
}

IcrtReducedTree::IcrtReducedTree(std::vector<double> eta, std::vector<double> joins)
    : eta_(std::move(eta)), joins_(std::move(joins)) {
  if (eta_.empty()) throw std::invalid_argument("a reduced tree needs at least one branch");
  if (joins_.size() + 1 != eta_.size()) throw std::invalid_argument("need one joinpoint per added branch");
  for (std::size_t j = 0; j < eta_.size(); ++j) {
    if (!(eta_[j] > (j == 0 ? 0.0 : eta_[j - 1]))) throw std::invalid_argument("eta must increase");
  }
  for (std::size_t j = 0; j < joins_.size(); ++j) {
    if (!(joins_[j] >= 0.0 && joins_[j] < eta_[j])) {
      throw std::invalid_argument("a joinpoint must lie on the tree built so far");
    }
  }
}

std::size_t IcrtReducedTree::branch_of(double x) const {
  if (!(x >= 0.0 && x <= eta_.back())) throw std::out_of_range("point outside the reduced tree");
  return static_cast<std::size_t>(std::lower_bound(eta_.begin(), eta_.end(), x) - eta_.begin()) + 1;
}

double IcrtReducedTree::distance(double x, double y) const {
  std::size_t bx = branch_of(x);
  std::size_t by = branch_of(y);
  double acc = 0.0;
  // Climb the later branch to its attachment until both points share one.
  while (bx != by) {
    if (bx > by) {
      acc += x - eta_[bx - 2];
      x = joins_[bx - 2];
      bx = branch_of(x);
    } else {
      acc += y - eta_[by - 2];
      y = joins_[by - 2];
      by = branch_of(y);
    }
  }
  return acc + std::abs(x - y);
}

IcrtReducedTree build_reduced_tree(const IcrtEventSet& events, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const std::vector<Cutpoint> cuts = cutpoints(events);
  if (cuts.size() < k) throw std::out_of_range("horizon too short");
  std::vector<double> eta(k);
  std::vector<double> joins(k - 1);
  for (std::size_t j = 0; j < k; ++j) eta[j] = cuts[j].position;
  for (std::size_t j = 0; j + 1 < k; ++j) joins[j] = cuts[j].joinpoint;
  return IcrtReducedTree(std::move(eta), std::move(joins));
}

double eta1_survival(const ThetaSequence& theta, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  double log_s = -theta.theta0 * theta.theta0 * r * r / 2.0;
  for (double a : theta.atoms) log_s += std::log1p(a * r) - a * r;
  return std::exp(log_s);
}

double first_cut_from_rates(std::span<const double> rates, Rng& rng) {
  double best = kInf;
  for (double rate : rates) {
    // second point of a rate-θ Poisson process: Gamma(2, θ)
    const double x = -(std::log(open_uniform(rng)) + std::log(open_uniform(rng))) / rate;
    best = std::min(best, x);
  }
  return best;
}

double eta1_sample(const ThetaSequence& theta, Rng& rng) {
  double best = kInf;
  if (theta.theta0 > 0.0) best = std::sqrt(-2.0 * std::log(open_uniform(rng))) / theta.theta0;
  return std::min(best, first_cut_from_rates(theta.atoms, rng));
}

double weibull_survival(double alpha, double r) {
  require_index(alpha);
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  return std::exp(-(alpha - 1.0) * std::pow(r, alpha));
}

double size_biased_moment_quadrature(double alpha, double t) {
  require_index(alpha);
  if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
  // The integrand is the Weibull density at t = 0.
  if (t == 0.0) return 1.0;
  const double inv_alpha = 1.0 / alpha;
  auto f = [&](double u) { return (alpha - 1.0) * std::exp(-t * std::pow(u, inv_alpha) - (alpha - 1.0) * u); };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-13);
}

double weibull_tail_constant(double alpha) {
  require_index(alpha);
  return (alpha - 1.0) / std::tgamma(2.0 - alpha);
}

SmallAtomCuts::SmallAtomCuts(double alpha, double tail_constant, double delta)
    : alpha_(alpha), tail_(tail_constant), delta_(delta) {
  require_index(alpha);
  if (!(tail_constant > 0.0) || !(delta > 0.0)) throw std::invalid_argument("need tail constant and delta > 0");

  log_z0_ = std::log(kTableZ0);
  const double decades = std::log10(kTableZ1 / kTableZ0);
  const auto nodes = static_cast<std::size_t>(decades * static_cast<double>(kNodesPerDecade)) + 1;
  dlog_ = (std::log(kTableZ1) - log_z0_) / static_cast<double>(nodes - 1);
  log_g_.resize(nodes);

  auto integrand = [alpha](double y) { return small_atom_integrand(alpha, y); };
  double g = g_series(alpha, kTableZ0);
  double prev = kTableZ0;
  log_g_[0] = std::log(g);
  for (std::size_t k = 1; k < nodes; ++k) {
    const double z = std::exp(log_z0_ + dlog_ * static_cast<double>(k));
    g += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, prev, z, 0);
    log_g_[k] = std::log(g);
    prev = z;
  }
}

double SmallAtomCuts::g_table(double z) const {
  if (z <= 0.0) return 0.0;
  if (z <= kTableZ0) return g_series(alpha_, z);
  const double pos = (std::log(z) - log_z0_) / dlog_;
  const auto last = log_g_.size() - 1;
  if (pos >= static_cast<double>(last)) {
    // beyond the table the integrand is y^{-1-α} up to e^{-y} terms
    return std::exp(log_g_[last]) + (std::pow(kTableZ1, -alpha_) - std::pow(z, -alpha_)) / alpha_;
  }
  const auto k = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(k);
  return std::exp((1.0 - w) * log_g_[k] + w * log_g_[k + 1]);
}

double SmallAtomCuts::intensity(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  if (r == 0.0) return 0.0;
  const double z = r * delta_;
  auto integrand = [this](double y) { return small_atom_integrand(alpha_, y); };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double g = integrator.integrate(integrand, 0.0, z, 1e-13);
  return alpha_ * tail_ * std::pow(r, alpha_) * g;
}

double SmallAtomCuts::intensity_tabulated(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  return alpha_ * tail_ * std::pow(r, alpha_) * g_table(r * delta_);
}

double SmallAtomCuts::square_mass() const {
  return alpha_ * tail_ * std::pow(delta_, 2.0 - alpha_) / (2.0 - alpha_);
}

double SmallAtomCuts::sample(Rng& rng) const {
  const double e = -std::log(open_uniform(rng));
  double hi = 1.0;
  while (intensity_tabulated(hi) < e) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (intensity_tabulated(mid) < e) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WeibullProductReport weibull_product_mc(double alpha, double r, std::size_t draws, std::uint64_t seed,
                                        double delta, unsigned threads) {
  require_index(alpha);
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  if (draws < 2) throw std::invalid_argument("need at least two draws");
  const double tail = weibull_tail_constant(alpha);
  const SmallAtomCuts small(alpha, tail, delta);

  WeibullProductReport report;
  report.closed_form = weibull_survival(alpha, r);
  report.small_atom_factor = std::exp(-small.intensity(r));
  report.bracket_width = -std::expm1(-small.square_mass() * r * r / 2.0);

  std::vector<double> values(draws);
  parallel_for(draws, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::vector<double> atoms = poisson_atoms_tail(alpha, tail, delta, rng);
    double log_p = 0.0;
    for (double d : atoms) log_p += std::log1p(r * d) - r * d;
    values[i] = std::exp(log_p) * report.small_atom_factor;
  });
  report.estimate = to_estimate(values);
  return report;
}

std::vector<McEstimate> size_biased_moment_mc(double alpha, std::span<const double> ts, std::size_t replicas,
                                              std::uint64_t seed, double delta, unsigned threads) {
  require_index(alpha);
  if (replicas < 2) throw std::invalid_argument("need at least two replicas");
  for (double t : ts) {
    if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
  }
  const double tail = weibull_tail_constant(alpha);
  const SmallAtomCuts small(alpha, tail, delta);

  std::vector<double> eta(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::vector<double> atoms = poisson_atoms_tail(alpha, tail, delta, rng);
    eta[i] = std::min(first_cut_from_rates(atoms, rng), small.sample(rng));
  });

  std::vector<McEstimate> out;
  out.reserve(ts.size());
  std::vector<double> values(replicas);
  for (double t : ts) {
    for (std::size_t i = 0; i < replicas; ++i) values[i] = std::exp(-t * eta[i]);
    out.push_back(to_estimate(values));
  }
  return out;
}

McEstimate size_biased_moment_mc(double alpha, double t, std::size_t replicas, std::uint64_t seed, double delta,
                                 unsigned threads) {
  const double ts[] = {t};
  return size_biased_moment_mc(alpha, ts, replicas, seed, delta, threads).front();
}

}  // namespace caravan
