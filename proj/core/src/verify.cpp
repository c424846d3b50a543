#include "caravan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "caravan/bridge.hpp"
#include "caravan/discrete.hpp"
#include "caravan/limit.hpp"
#include "caravan/parallel.hpp"
#include "caravan/samplers.hpp"

namespace caravan {

namespace {

constexpr std::size_t kMaxReported = 20;

struct CaseResult {
  std::size_t checks = 0;
  double discrepancy = 0.0;
  std::vector<std::string> failures;
};

SuiteReport aggregate(std::string name, std::vector<CaseResult>& cases) {
  SuiteReport report;
  report.suite = std::move(name);
  report.cases = cases.size();
  for (CaseResult& c : cases) {
    report.checks += c.checks;
    report.max_discrepancy = std::max(report.max_discrepancy, c.discrepancy);
    for (std::string& f : c.failures) {
      if (report.failures.size() < kMaxReported) report.failures.push_back(std::move(f));
    }
  }
  return report;
}

double circular_gap(double a, double b) {
  const double d = std::abs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

double support_mismatch(const ArcSet& support, const ArcSet& occupied) {
  if (support.is_full() && occupied.is_full()) return 0.0;
  const std::vector<Arc> a = support.blocks();
  const std::vector<Arc> b = occupied.blocks();
  if (a.size() != b.size()) return 1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max({worst, circular_gap(a[k].start, b[k].start), std::abs(a[k].length - b[k].length)});
  }
  return worst;
}

}  // namespace

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["cases"] = cases;
  j["checks"] = checks;
  j["max_discrepancy"] = max_discrepancy;
  j["failures"] = failures;
  j["pass"] = pass();
  return j.dump(2);
}

CaravanInstance suite_instance(std::uint64_t seed, std::size_t index, std::size_t max_size) {
  static const CaravanLaw laws[] = {CaravanLaw::deterministic(1.0), CaravanLaw::exponential(1.0),
                                    CaravanLaw::pareto(1.5, 1.0)};
  const CaravanLaw& law = laws[index % 3];
  Rng pick(derive_seed(seed, 2 * index));
  for (std::uint64_t attempt = 0;; ++attempt) {
    const double target = 1.0 + static_cast<double>(pick() % max_size);
    const double eps = 1.0 / (target * law.mean());
    if (!(eps < 1.0)) continue;
    CaravanInstance inst = make_instance(law, eps, derive_seed(derive_seed(seed, 2 * index + 1), attempt));
    if (inst.size() <= max_size) return inst;
  }
}

SuiteReport lamb_suite(std::size_t instances, std::uint64_t seed, unsigned threads, double tol) {
  std::vector<CaseResult> cases(instances);
  parallel_for(instances, threads, [&](std::size_t k) {
    const CaravanInstance inst = suite_instance(seed, k);
    const LambReport r = lamb_check(inst, tol);
    CaseResult& c = cases[k];
    c.checks = r.steps_checked;
    c.discrepancy = r.max_discrepancy;
    if (!r.pass) {
      std::ostringstream os;
      os << "instance " << k << " (m=" << inst.size() << "): " << r.failing_steps.size()
         << " step(s) differ, max " << r.max_discrepancy;
      c.failures.push_back(os.str());
    }
  });
  return aggregate("lamb", cases);
}

double profile_violation(const CaravanInstance& instance, const ParkingTrajectory& trajectory) {
  const std::vector<Profile> h = cumulative_profiles(trajectory);
  double worst = 0.0;
  auto note = [&](double v) { worst = std::max(worst, std::abs(v)); };

  for (std::size_t i = 1; i <= trajectory.steps(); ++i) {
    const Profile& H = h[i];
    const ArcSet& occupied = trajectory.occupied[i];
    note(support_mismatch(H.support(), occupied));
    note(H.left_limit(trajectory.landings[i - 1].position()));
    note(std::min(0.0, H.min_value()));

    // Jumps: at each arrival the summed masses of caravans arriving there;
    // nothing at any other breakpoint.
    auto expected_jump = [&](double x) {
      double sum = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        if (instance.arrivals[j].position() == x) sum += instance.masses[j];
      }
      return sum;
    };
    for (std::size_t j = 0; j < i; ++j) {
      const double s = instance.arrivals[j].position();
      note(H.jump_at(s) - expected_jump(s));
    }
    const auto& knots = H.knots();
    for (std::size_t k = 0; k < knots.size(); ++k) {
      const ProfileKnot& kn = knots[k];
      note(H.jump_at(kn.x) - expected_jump(kn.x));
      // slope -1 where the profile is positive, 0 where it vanishes
      const double end = k + 1 < knots.size() ? knots[k + 1].x : 1.0;
      const double mid_value = kn.value + kn.slope * (0.5 * (end - kn.x));
      note(mid_value > kCircleTol ? kn.slope + 1.0 : kn.slope);
    }

    // Block identity at every breakpoint of each maximal block.
    std::vector<Arc> blocks = occupied.blocks();
    if (occupied.is_full()) blocks = {Arc{trajectory.landings[i - 1].position(), 1.0}};
    for (const Arc& b : blocks) {
      const double base = H.left_limit(b.start);
      // x is the evaluation point; offset its distance from the block start.
      auto residual = [&](double x, double offset, bool left) {
        const double hx = left ? H.left_limit(x) : H.value(x);
        double arrived = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
          const double off = wrap_unit(instance.arrivals[j].position() - b.start);
          if (left ? off < offset : off <= offset) arrived += instance.masses[j];
        }
        return hx - base + offset - arrived;
      };
      note(residual(b.start, 0.0, false));
      for (const ProfileKnot& kn : knots) {
        const double off = wrap_unit(kn.x - b.start);
        if (off < b.length) note(residual(kn.x, off, false));
      }
      // A full circle ends exactly where it starts.
      note(residual(b.length >= 1.0 ? b.start : b.start + b.length, b.length, true));
    }
  }
  return worst;
}

SuiteReport profile_suite(std::size_t instances, std::uint64_t seed, unsigned threads, double tol) {
  std::vector<CaseResult> cases(instances);
  parallel_for(instances, threads, [&](std::size_t k) {
    const CaravanInstance inst = suite_instance(seed, k);
    const ParkingTrajectory traj = run_parking(inst);
    CaseResult& c = cases[k];
    c.checks = inst.size();
    c.discrepancy = profile_violation(inst, traj);
    if (!(c.discrepancy <= tol)) {
      std::ostringstream os;
      os << "instance " << k << " (m=" << inst.size() << "): violation " << c.discrepancy;
      c.failures.push_back(os.str());
    }
  });
  return aggregate("profile", cases);
}

SuiteReport discrete_suite(std::size_t runs, const std::vector<std::size_t>& lot_sizes, std::uint64_t seed,
                           unsigned threads) {
  static const CaravanLaw laws[] = {CaravanLaw::deterministic(1.0), CaravanLaw::geometric(0.5),
                                    CaravanLaw::deterministic(3.0)};
  const std::size_t total = runs * lot_sizes.size();
  std::vector<CaseResult> cases(total);
  parallel_for(total, threads, [&](std::size_t k) {
    const std::size_t n = lot_sizes[k / runs];
    const std::size_t r = k % runs;
    const std::vector<DiscreteCaravan> caravans = sample_discrete_caravans(n, laws[r % 3], derive_seed(seed, k));
    const EquivalenceReport eq = discrete_continuous_equiv(n, caravans);
    CaseResult& c = cases[k];
    c.checks = eq.steps_checked;
    c.discrepancy = eq.max_discrepancy;
    if (!eq.pass) {
      std::ostringstream os;
      os << "n=" << n << " run " << r << ": " << eq.failing_steps.size() << " step(s) differ";
      c.failures.push_back(os.str());
    }
    if (n <= 100) {
      const DiscreteTrajectory fast = knuth_park(n, caravans);
      const DiscreteTrajectory slow = knuth_park_naive(n, caravans);
      ++c.checks;
      if (fast.car_spots != slow.car_spots || fast.ranked != slow.ranked) {
        std::ostringstream os;
        os << "n=" << n << " run " << r << ": union-find and scan engines disagree";
        c.failures.push_back(os.str());
      }
    }
  });
  return aggregate("discrete", cases);
}

SuiteReport fragmentation_suite(std::size_t paths, std::uint64_t seed, unsigned threads, double tol) {
  static const double alphas[] = {1.2, 1.5, 1.8};
  static const double times[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<CaseResult> cases(paths);
  parallel_for(paths, threads, [&](std::size_t k) {
    const JumpDriftPath path = stable_loop_path(alphas[k % 3], 1.0, 1.0, 0.01, derive_seed(seed, k));
    const double s = path.total_jump_mass();
    CaseResult& c = cases[k];
    std::vector<ConstancyInterval> coarser;
    for (double t : times) {
      const std::vector<ConstancyInterval> frags = fragment_intervals(path, t);
      double sum = 0.0;
      for (const ConstancyInterval& f : frags) sum += f.length;
      const double err = std::abs(sum - s / (s + t));
      c.discrepancy = std::max(c.discrepancy, err);
      ++c.checks;
      if (!(err <= tol)) {
        std::ostringstream os;
        os << "path " << k << " t=" << t << ": sum " << sum << " vs " << s / (s + t);
        c.failures.push_back(os.str());
      }
      for (const ConstancyInterval& f : frags) {
        ++c.checks;
        // coarser is in sweep order, so only the last interval starting
        // at or before f can contain it
        bool nested = coarser.empty();
        if (!nested) {
          auto it = std::upper_bound(coarser.begin(), coarser.end(), f.start + tol,
                                     [](double x, const ConstancyInterval& g) { return x < g.start; });
          if (it != coarser.begin()) {
            const ConstancyInterval& g = *std::prev(it);
            nested = f.start + f.length <= g.start + g.length + tol;
          }
        }
        if (!nested) {
          std::ostringstream os;
          os << "path " << k << " t=" << t << ": fragment at " << f.start << " not nested";
          c.failures.push_back(os.str());
        }
      }
      coarser = frags;
    }
  });
  return aggregate("fragmentation", cases);
}

}  // namespace caravan
