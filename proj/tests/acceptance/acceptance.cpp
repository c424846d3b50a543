// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "caravan/discrete.hpp"
#include "caravan/icrt.hpp"
#include "caravan/limit.hpp"
#include "caravan/samplers.hpp"
#include "caravan/stats.hpp"
#include "caravan/verify.hpp"

namespace {

using namespace caravan;

const unsigned kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Verdict {
  bool pass = true;
  std::string detail;
};

bool within_3se(double est, double se, double target) { return std::abs(est - target) <= 3.0 * se; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Verdict suite(const SuiteReport& r) {
  Verdict v{r.pass(), "cases=" + std::to_string(r.cases) + " checks=" + std::to_string(r.checks) +
                          " max_discrepancy=" + fmt(r.max_discrepancy)};
  if (!r.failures.empty()) v.detail += " first_failure=\"" + r.failures.front() + "\"";
  return v;
}

Verdict c1() { return suite(lamb_suite(1000, 7, kThreads, 1e-9)); }
Verdict c2() { return suite(profile_suite(1000, 7, kThreads, 1e-12)); }
Verdict c3() { return suite(discrete_suite(100, {10, 100, 1000}, 11, kThreads)); }

Verdict c4() {
  Verdict v;
  double worst = 0.0;
  std::uint64_t seed = 401;
  for (double alpha : {1.2, 1.5, 1.8}) {
    const std::vector<double> draws = stable_spectrally_positive(alpha, 100000, seed++);
    for (double lam : {0.5, 1.0}) {
      std::vector<double> e(draws.size());
      for (std::size_t k = 0; k < draws.size(); ++k) e[k] = std::exp(-lam * draws[k]);
      const MeanSe m = mc_mean_se(e);
      const double exact = std::exp(std::pow(lam, alpha));
      worst = std::max(worst, std::abs(m.mean - exact) / m.se);
      if (!within_3se(m.mean, m.se, exact)) {
        v.pass = false;
        v.detail += " miss(alpha=" + fmt(alpha) + ",lambda=" + fmt(lam) + ")";
      }
    }
  }
  v.detail = "max_z=" + fmt(worst) + v.detail;
  return v;
}

Verdict c5() {
  Verdict v;
  double worst = 0.0, bracket = 0.0;
  std::uint64_t seed = 501;
  for (double alpha : {1.2, 1.5, 1.8}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const WeibullProductReport w = weibull_product_mc(alpha, r, 10000, seed++, kDefaultIcrtDelta, kThreads);
      bracket = std::max(bracket, w.bracket_width);
      worst = std::max(worst, std::abs(w.estimate.mean - w.closed_form) / w.estimate.se);
      if (!within_3se(w.estimate.mean, w.estimate.se, w.closed_form)) {
        v.pass = false;
        v.detail += " miss(alpha=" + fmt(alpha) + ",r=" + fmt(r) + ")";
      }
    }
  }
  v.detail = "max_z=" + fmt(worst) + " small_atom_factor=exact bracket_width_replaced=" + fmt(bracket) + v.detail;
  return v;
}

ThetaSequence truncated_theta_star() {
  const std::vector<double> atoms = poisson_atoms(1.5, 1.0, 1.0, 1e-3, 601);
  std::vector<double> top(atoms.begin(), atoms.begin() + std::min<std::size_t>(20, atoms.size()));
  double sq = 0.0;
  for (double a : top) sq += a * a;
  ThetaSequence theta;
  for (double a : top) theta.atoms.push_back(a / std::sqrt(sq));
  theta.truncated = true;
  return theta;
}

Verdict c6() {
  const std::vector<ThetaSequence> thetas{ThetaSequence{1.0, {}, false}, ThetaSequence{0.0, {0.8, 0.6}, false},
                                          truncated_theta_star()};
  const std::vector<double> radii{0.25, 0.5, 1.0, 2.0};
  const std::size_t n = 100000;
  Verdict v;
  double worst = 0.0;
  for (std::size_t q = 0; q < thetas.size(); ++q) {
    thetas[q].validate();
    // long enough that missing the first cut has probability below 1e-15
    double horizon = 4.0;
    while (eta1_survival(thetas[q], horizon) > 1e-15) horizon *= 2.0;
    std::vector<double> eta(n);
    for (std::size_t k = 0; k < n; ++k) {
      const IcrtEventSet ev = sample_events(thetas[q], horizon, derive_seed(602 + q, k));
      try {
        eta[k] = eta_k(ev, 1);
      } catch (const std::out_of_range&) {
        eta[k] = horizon;  // no cut before the horizon
      }
    }
    for (double r : radii) {
      std::vector<double> hit(n);
      for (std::size_t k = 0; k < n; ++k) hit[k] = eta[k] > r ? 1.0 : 0.0;
      const MeanSe m = mc_mean_se(hit);
      const double p = eta1_survival(thetas[q], r);
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      worst = std::max(worst, std::abs(m.mean - p) / se);
      if (!within_3se(m.mean, se, p)) {
        v.pass = false;
        v.detail += " miss(theta=" + std::to_string(q) + ",r=" + fmt(r) + ")";
      }
    }
  }
  v.detail = "max_z=" + fmt(worst) + v.detail;
  return v;
}

double fixed_grid_oracle(double alpha, double t) {
  // u = r^alpha; midpoint rule on [0, 60]
  const int n = 2000000;
  const double h = 60.0 / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = (k + 0.5) * h;
    s += (alpha - 1.0) * std::exp(-t * std::pow(u, 1.0 / alpha) - (alpha - 1.0) * u);
  }
  return s * h;
}

Verdict c7() {
  Verdict v;
  double worst_z = 0.0, worst_quad = 0.0;
  const std::vector<double> ts{0.0, 0.5, 1.0, 2.0};
  std::uint64_t seed = 701;
  for (double alpha : {1.2, 1.5, 1.8}) {
    if (size_biased_moment_quadrature(alpha, 0.0) != 1.0) {
      v.pass = false;
      v.detail += " quadrature(t=0)!=1";
    }
    const std::vector<McEstimate> est = size_biased_moment_mc(alpha, ts, 100000, seed++, kDefaultIcrtDelta, kThreads);
    if (est[0].mean != 1.0) {
      v.pass = false;
      v.detail += " mc(t=0)!=1";
    }
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const double q = size_biased_moment_quadrature(alpha, ts[k]);
      const double diff = std::abs(q - fixed_grid_oracle(alpha, ts[k]));
      worst_quad = std::max(worst_quad, diff);
      if (diff > 1e-6) {
        v.pass = false;
        v.detail += " quadrature_miss(alpha=" + fmt(alpha) + ",t=" + fmt(ts[k]) + ")";
      }
      worst_z = std::max(worst_z, std::abs(est[k].mean - q) / est[k].se);
      if (!within_3se(est[k].mean, est[k].se, q)) {
        v.pass = false;
        v.detail += " mc_miss(alpha=" + fmt(alpha) + ",t=" + fmt(ts[k]) + ")";
      }
    }
  }
  v.detail = "max_z=" + fmt(worst_z) + " max_quadrature_vs_grid=" + fmt(worst_quad) + v.detail;
  return v;
}

Verdict c8() {
  Verdict v;
  struct Family {
    const char* name;
    CaravanLaw law;
    double alpha;
  };
  const std::vector<Family> families{{"alpha=2", CaravanLaw::deterministic(1.0), 2.0},
                                     {"alpha=1.5", CaravanLaw::pareto(1.5, 1.0), 1.5}};
  const std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  for (const Family& f : families) {
    ConvergenceConfig cfg;
    cfg.law = f.law;
    cfg.alpha = f.alpha;
    cfg.t = {0.5, 1.0, 2.0};
    cfg.replicas = 2000;
    cfg.grid = std::size_t{1} << 20;
    cfg.seed = 801;
    cfg.threshold = 0.05;
    cfg.threads = kThreads;
    const MarginalSample limit = limit_marginals(cfg);
    std::vector<std::vector<double>> ks;  // per eps, per t
    for (double eps : epsilons) {
      cfg.eps = eps;
      ks.push_back(compare_marginals(caravan_marginals(cfg), limit, cfg.threshold, "converge").largest_ks());
    }
    v.detail += std::string(" ") + f.name + ":";
    for (std::size_t i = 0; i < cfg.t.size(); ++i) {
      v.detail += " t=" + fmt(cfg.t[i]) + "[";
      for (std::size_t e = 0; e < epsilons.size(); ++e) v.detail += (e ? "," : "") + fmt(ks[e][i]);
      v.detail += "]";
      if (ks.back()[i] > cfg.threshold) {
        v.pass = false;
        v.detail += "(above threshold)";
      }
      for (std::size_t e = 1; e < epsilons.size(); ++e) {
        if (!(ks[e][i] < ks[e - 1][i])) {
          v.pass = false;
          v.detail += "(not decreasing)";
          break;
        }
      }
    }
  }
  return v;
}

Verdict c9() {
  Verdict v;
  const std::vector<std::pair<CaravanLaw, double>> families{{CaravanLaw::deterministic(1.0), 2.0},
                                                            {CaravanLaw::pareto(1.5, 1.0), 1.5}};
  for (const auto& [law, alpha] : families) {
    double prev = INFINITY;
    v.detail += " " + law.describe() + ":[";
    bool first = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const DriftReport r = drift_check(law, alpha, 1.0, eps, 200, 901, kThreads);
      v.detail += (first ? "" : ",") + fmt(r.median);
      first = false;
      if (!(r.median < prev)) v.pass = false;
      prev = r.median;
    }
    v.detail += "]";
  }
  return v;
}

Verdict c10() { return suite(fragmentation_suite(100, 1001, kThreads, 1e-12)); }

Verdict c11() {
  const RankedMassPartition p({0.6, 0.3, 0.1});
  const std::size_t n = 100000;
  Rng rng(1101);
  std::vector<double> hits[3] = {std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const MergeStep s = merge_dynamics_step(p, rng);
    const std::size_t idx = s.pair.first == 0 ? (s.pair.second == 1 ? 0 : 1) : 2;
    hits[idx][k] = 1.0;
  }
  // brute-force pair rates (s_i + s_j) over their total
  const double rates[3] = {0.6 + 0.3, 0.6 + 0.1, 0.3 + 0.1};
  const double total = rates[0] + rates[1] + rates[2];
  Verdict v;
  for (int j = 0; j < 3; ++j) {
    const MeanSe m = mc_mean_se(hits[j]);
    const double target = rates[j] / total;
    v.detail += " " + fmt(m.mean) + "/" + fmt(target);
    if (!within_3se(m.mean, m.se, target)) v.pass = false;
  }
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "parking vs bridge constancy masses", c1},
      {2, "profile invariants", c2},
      {3, "discrete embedding", c3},
      {4, "stable Laplace identity", c4},
      {5, "Weibull identity", c5},
      {6, "first branch length law", c6},
      {7, "size-biased moment", c7},
      {8, "marginal convergence", c8},
      {9, "drift deviation", c9},
      {10, "fragmentation sum rule and nesting", c10},
      {11, "merge pair frequencies", c11},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = Verdict{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "):" << v.detail << " ["
              << fmt(secs) << " s]" << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
