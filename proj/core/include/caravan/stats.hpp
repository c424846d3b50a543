#pragma once

// Monte Carlo harness: empirical distances, mean/SE, and the convergence
// experiments comparing caravan parking against its limits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caravan/model.hpp"
#include "caravan/samplers.hpp"

namespace caravan {

/// Two-sample Kolmogorov-Smirnov distance. Throws on an empty sample.
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and s / sqrt(n). Throws with fewer than two values.
MeanSe mc_mean_se(std::span<const double> values);

double median(std::vector<double> values);

/// sup_x |eps^{1/α} sum over the last floor(t eps^{-1/α}) caravans of
/// ℓ*_j 1{x >= U_j} - t μ₁ x|, exact over the step points.
double drift_deviation(const CaravanInstance& instance, double eps, double alpha, double t, double mu1);

struct DriftReport {
  double eps = 0.0;
  double t = 0.0;
  double median = 0.0;
  std::vector<double> deviations;  // per replica
};

DriftReport drift_check(const CaravanLaw& law, double alpha, double t, double eps, std::size_t replicas,
                        std::uint64_t seed, unsigned threads = 1);

struct KsEntry {
  double t = 0.0;
  /// 1 and 2 for the largest masses; 0 for the sum of the two largest.
  int rank = 0;
  double value = 0.0;
};

/// Per t, one sample per replica of the largest mass, the second largest,
/// and their sum.
struct MarginalSample {
  std::vector<double> t;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::vector<std::vector<double>> top_two;
};

struct ConvergenceConfig {
  CaravanLaw law;
  double alpha = 2.0;
  std::vector<double> t;
  double eps = 1e-4;
  std::size_t replicas = 2000;
  std::uint64_t seed = 1;
  std::size_t grid = std::size_t{1} << 20;
  double delta = 0.0;  // 0 picks the default atom threshold
  double threshold = 0.05;
  unsigned threads = 1;
};

/// X^(eps)(t) = Λ at the backward index, per replica.
MarginalSample caravan_marginals(const ConvergenceConfig& cfg);
/// Fragmentation of the scaled limit bridge at μ₁ t, per replica.
MarginalSample limit_marginals(const ConvergenceConfig& cfg);

struct ConvergenceReport {
  std::string experiment;
  std::vector<KsEntry> ks;
  bool pass = false;
  /// KS of the largest mass at each t, in cfg.t order.
  std::vector<double> largest_ks() const;
  std::string to_json(const std::string& params_json) const;
};

ConvergenceReport compare_marginals(const MarginalSample& caravans, const MarginalSample& limit, double threshold,
                                    std::string experiment);
ConvergenceReport convergence_experiment(const ConvergenceConfig& cfg);

/// sqrt(sum p_i^2).
double sigma_of(std::span<const double> p);

/// inf{i >= 0 : sum_{j > i} p_{order(j)} <= t σ(p)} for masses listed in
/// parking order.
std::size_t extreme_index(std::span<const double> ordered_masses, double t, double sigma);

struct ExtremeConfig {
  std::vector<double> masses;  // p^n, nonincreasing, summing to 1
  ThetaSequence theta;         // target of σ(p)^{-1} p
  std::vector<double> t;
  std::size_t replicas = 2000;
  std::uint64_t seed = 1;
  std::size_t grid = std::size_t{1} << 20;
  double threshold = 0.05;
  unsigned threads = 1;
};

/// Parking of the uniformly permuted masses stopped at extreme_index,
/// against fragmentation of the θ-bridge at t.
ConvergenceReport extreme_convergence_experiment(const ExtremeConfig& cfg);

}  // namespace caravan
