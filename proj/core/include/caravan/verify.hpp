#pragma once

// Seeded differential suites shared by the command-line tool and the tests.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "caravan/model.hpp"
#include "caravan/parking.hpp"

namespace caravan {

struct SuiteReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t checks = 0;
  double max_discrepancy = 0.0;
  std::vector<std::string> failures;  // first few, human readable
  bool pass() const noexcept { return failures.empty(); }
  std::string to_json() const;
};

/// Complete instance number `index` of the random suite: laws cycle through
/// deterministic(1), exponential(1) and pareto(1.5, 1); at most max_size
/// caravans.
CaravanInstance suite_instance(std::uint64_t seed, std::size_t index, std::size_t max_size = 200);

/// Parking Λ(i) against bridge constancy masses at every step.
SuiteReport lamb_suite(std::size_t instances, std::uint64_t seed, unsigned threads = 1, double tol = 1e-9);

/// Largest violation of the profile invariants over all steps: support
/// equals A_i, H_i(t_i-) = 0, jumps sit at arrivals with the caravan masses,
/// slope -1 on the support and 0 off it, and the block identity
/// H(x) - H(v-) + (x - v) - sum_{v <= s_j <= x} p_j = 0 at breakpoints.
double profile_violation(const CaravanInstance& instance, const ParkingTrajectory& trajectory);
SuiteReport profile_suite(std::size_t instances, std::uint64_t seed, unsigned threads = 1, double tol = 1e-12);

/// Discrete block sizes / n against continuous masses, and the union-find
/// engine against the naive scan for n <= 100.
SuiteReport discrete_suite(std::size_t runs, const std::vector<std::size_t>& lot_sizes, std::uint64_t seed,
                           unsigned threads = 1);

/// Sum rule S/(S+t) and nesting t < t' of jump-path fragments.
SuiteReport fragmentation_suite(std::size_t paths, std::uint64_t seed, unsigned threads = 1, double tol = 1e-12);

}  // namespace caravan
