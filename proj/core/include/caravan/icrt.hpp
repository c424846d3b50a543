#pragma once

// Stick-breaking construction of reduced ICRT trees, the law of the first
// branch length η₁, the Weibull identity and the size-biased first moment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "caravan/model.hpp"
#include "caravan/samplers.hpp"

namespace caravan {

struct CutJoinPair {
  double cut = 0.0;   // U_i
  double join = 0.0;  // V_i, uniform on (0, U_i)
};

struct IcrtEventSet {
  double horizon = 0.0;
  std::vector<CutJoinPair> brownian;
  /// atom_points[i] are the sorted ξ_{i,1} < ξ_{i,2} < ... of atom i.
  std::vector<std::vector<double>> atom_points;
};

struct Cutpoint {
  double position = 0.0;
  double joinpoint = 0.0;  // V_i for U_i, ξ_{i,1} for ξ_{i,j}, j >= 2
};

/// U-points of intensity θ₀² x dx and per-atom Poisson(θ_i) points on (0, L].
IcrtEventSet sample_events(const ThetaSequence& theta, double horizon, std::uint64_t seed);

/// All U_i and all ξ_{i,j} with j >= 2, increasing.
std::vector<Cutpoint> cutpoints(const IcrtEventSet& events);

/// Position of the k-th cutpoint (k >= 1). Throws std::out_of_range
/// ("horizon too short") when there are fewer than k.
double eta_k(const IcrtEventSet& events, std::size_t k);

/// R(k): branch 1 is [0, η₁] rooted at 0; branch j+1 is (η_j, η_{j+1}]
/// glued at η_j*. Points are named by their stick coordinate.
class IcrtReducedTree {
 public:
  IcrtReducedTree(std::vector<double> eta, std::vector<double> joins);

  std::size_t branch_count() const noexcept { return eta_.size(); }
  const std::vector<double>& eta() const noexcept { return eta_; }
  /// joins()[j-1] is the attachment point of branch j+1.
  const std::vector<double>& joins() const noexcept { return joins_; }
  double total_length() const noexcept { return eta_.back(); }

  /// 1-based branch holding stick coordinate x in [0, η_k].
  std::size_t branch_of(double x) const;
  double distance(double x, double y) const;
  double root_distance(double x) const { return distance(0.0, x); }

 private:
  std::vector<double> eta_;
  std::vector<double> joins_;
};

IcrtReducedTree build_reduced_tree(const IcrtEventSet& events, std::size_t k);

/// P(η₁ > r) = e^{-θ₀² r²/2} prod (1 + θ_i r) e^{-θ_i r}.
double eta1_survival(const ThetaSequence& theta, double r);

/// Direct draw of the first cutpoint: the first U-point and the second
/// point of each atom process.
double eta1_sample(const ThetaSequence& theta, Rng& rng);
/// Same, with atom rates given directly (not normalized) and no θ₀.
double first_cut_from_rates(std::span<const double> rates, Rng& rng);

/// exp(-(α-1) r^α).
double weibull_survival(double alpha, double r);

/// ∫ α(α-1) r^{α-1} exp(-t r - (α-1) r^α) dr, by double-exponential
/// quadrature after u = r^α; exactly 1 at t = 0.
double size_biased_moment_quadrature(double alpha, double t);

/// Tail constant (α-1)/Γ(2-α) of the atom measure α(α-1)Γ(2-α)^{-1}
/// x^{-1-α} dx under which the Weibull identity holds.
double weibull_tail_constant(double alpha);

/// Cut intensity of the atoms below delta, integrated over the atom law:
/// Φ(r) = ∫_0^δ (1 - (1 + r x) e^{-r x}) α C x^{-1-α} dx. The product over
/// atoms below δ has expectation exp(-Φ(r)), and the first cut they
/// produce, averaged over those atoms, has survival exp(-Φ(r)).
class SmallAtomCuts {
 public:
  SmallAtomCuts(double alpha, double tail_constant, double delta);

  double alpha() const noexcept { return alpha_; }
  double delta() const noexcept { return delta_; }
  /// Φ(r) by direct adaptive quadrature.
  double intensity(double r) const;
  /// Φ(r) from the tabulated profile (relative error below 1e-7).
  double intensity_tabulated(double r) const;
  /// Expected sum of squares of the atoms below δ.
  double square_mass() const;
  /// Inverse-transform draw of the first small-atom cut.
  double sample(Rng& rng) const;

 private:
  double g_table(double z) const;

  double alpha_;
  double tail_;
  double delta_;
  double log_z0_;
  double dlog_;
  std::vector<double> log_g_;
};

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t replicas = 0;
};

inline constexpr double kDefaultIcrtDelta = 0.01;

/// E[prod (1 + rΔ) e^{-rΔ}] over atom draws above delta, times the exact
/// expectation exp(-Φ(r)) of the product over the atoms below delta.
struct WeibullProductReport {
  McEstimate estimate;
  double closed_form = 0.0;
  double small_atom_factor = 1.0;
  /// Width 1 - exp(-E[sum_{Δ<δ} Δ²] r²/2) of the analytic bracket that the
  /// exact factor replaces.
  double bracket_width = 0.0;
};
WeibullProductReport weibull_product_mc(double alpha, double r, std::size_t draws, std::uint64_t seed,
                                        double delta = kDefaultIcrtDelta, unsigned threads = 1);

/// Per replica: atoms above delta at rates Δ_i, first cut η = min of the
/// per-atom second points and an independent small-atom cut; averages
/// e^{-t η}. One estimate per entry of ts, all from the same draws.
std::vector<McEstimate> size_biased_moment_mc(double alpha, std::span<const double> ts, std::size_t replicas,
                                              std::uint64_t seed, double delta = kDefaultIcrtDelta,
                                              unsigned threads = 1);
McEstimate size_biased_moment_mc(double alpha, double t, std::size_t replicas, std::uint64_t seed,
                                 double delta = kDefaultIcrtDelta, unsigned threads = 1);

}  // namespace caravan
