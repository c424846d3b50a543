#pragma once

// Seeded generators for every stochastic ingredient. Generators are value
// types: each replica owns one, seeded through derive_seed(seed, replica).

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caravan/model.hpp"

namespace caravan {

using Rng = std::mt19937_64;

/// Counter-based seed derivation (SplitMix64 over seed and counter).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) noexcept;

/// Uniform on the open interval (0, 1).
double open_uniform(Rng& rng);

/// Law of the caravan length ℓ.
struct CaravanLaw {
  enum class Family { Pareto, Exponential, Deterministic, Geometric };

  Family family = Family::Deterministic;
  double alpha = 2.0;  // pareto tail index
  double xm = 1.0;     // pareto scale
  double rate = 1.0;   // exponential rate
  double value = 1.0;  // deterministic value
  double q = 0.5;      // geometric success probability, support {1, 2, ...}

  static CaravanLaw pareto(double alpha, double xm);
  static CaravanLaw exponential(double rate);
  static CaravanLaw deterministic(double value);
  static CaravanLaw geometric(double q);
  /// Parses "family:params", e.g. "pareto:1.5,1", "exponential:1",
  /// "deterministic:1", "geometric:0.5".
  static CaravanLaw parse(std::string_view text);
  std::string describe() const;

  /// Throws std::invalid_argument for invalid parameters.
  void validate() const;

  double mean() const;           // μ₁
  double second_moment() const;  // μ₂, +inf when infinite
  /// Domain-of-attraction index: the pareto α when below 2, else 2.
  double index() const;
  /// c in P(ℓ > x) ~ c x^-α; only meaningful for the pareto family.
  double tail_constant() const;
  bool integer_valued() const;

  double sample(Rng& rng) const;
};

std::vector<double> sample_lengths(const CaravanLaw& law, std::size_t n, std::uint64_t seed);

struct TruncatedLengths {
  std::vector<double> lengths;  // ℓ*_1 .. ℓ*_T
  std::size_t count = 0;        // T
};

/// Stops at the first index whose partial sum reaches the budget and trims
/// the last length so the sum equals the budget. Throws
/// std::invalid_argument when the lengths run out first.
TruncatedLengths truncate_to_budget(std::span<const double> lengths, double budget);

/// Streaming form: draws from `next()` until the budget is reached.
template <class Next>
TruncatedLengths truncate_to_budget_stream(Next&& next, double budget);

/// Complete instance with p_i = eps ℓ*_i and iid uniform arrivals.
CaravanInstance make_instance(const CaravanLaw& law, double eps, std::uint64_t seed);

/// Random-walk bridge on G steps: W_k - (k/G) W_G with N(0, 1/G) steps.
GridPath brownian_bridge(std::size_t grid, std::uint64_t seed);
GridPath brownian_bridge(std::size_t grid, Rng& rng);

/// One draw of σ(1) for the spectrally positive stable law normalized by
/// E exp(-λ σ(1)) = exp(λ^α), via Chambers-Mallows-Stuck with skewness 1.
double sample_stable(double alpha, Rng& rng);
std::vector<double> stable_spectrally_positive(double alpha, std::size_t n, std::uint64_t seed);

inline constexpr double kDefaultAtomCap = 1e7;

/// Ranked atoms above delta of a Poisson measure with tail
/// tail_constant * x^-α (intensity α tail_constant x^{-1-α} dx). Throws
/// std::invalid_argument ("truncation too fine") when the expected count
/// exceeds max_expected.
std::vector<double> poisson_atoms_tail(double alpha, double tail_constant, double delta, Rng& rng,
                                       double max_expected = kDefaultAtomCap);

/// Atoms of intensity α c μ₁^-1 x^{-1-α} dx above delta.
std::vector<double> poisson_atoms(double alpha, double c, double mu1, double delta,
                                  std::uint64_t seed, double max_expected = kDefaultAtomCap);

/// Threshold whose neglected compensated variance is at most 1e-6, raised
/// when needed so that the expected atom count stays below atom_budget.
double default_atom_threshold(double alpha, double tail_constant, double atom_budget = 2e5);

struct ThetaStar {
  double t_star = 0.0;
  ThetaSequence theta;
};

/// e^{2 t*} = sum Δ_i^2 and θ*_i = Δ_i e^{-t*}.
ThetaStar theta_star(std::span<const double> atoms);

template <class Next>
TruncatedLengths truncate_to_budget_stream(Next&& next, double budget) {
  TruncatedLengths out;
  // Relative slack keeps round-off in the partial sums from spawning a
  // spurious near-zero last caravan.
  const double target = budget * (1.0 - 1e-12);
  double partial = 0.0;
  for (;;) {
    const double l = next();
    if (partial + l >= target) {
      out.lengths.push_back(budget - partial);
      break;
    }
    out.lengths.push_back(l);
    partial += l;
  }
  out.count = out.lengths.size();
  return out;
}

}  // namespace caravan
