#pragma once

// Core value types for caravan parking on the unit circle T = R/Z.
//
// Positions are fractions of the circumference in [0, 1). All comparisons
// that decide whether two circle points coincide use kCircleTol.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace caravan {

inline constexpr double kCircleTol = 1e-12;

/// Reduces any real to its representative in [0, 1).
double wrap_unit(double x) noexcept;

/// A point of the circle, stored as a fraction of the circumference.
class CirclePoint {
 public:
  CirclePoint() = default;
  /// Throws std::invalid_argument unless 0 <= position < 1.
  explicit CirclePoint(double position);

  static CirclePoint wrap(double x) noexcept;

  double position() const noexcept { return position_; }
  auto operator<=>(const CirclePoint&) const = default;

 private:
  double position_ = 0.0;
};

/// Finite parking data: caravan masses p_1..p_m (fractions of the
/// circumference) and their arrival points s_1..s_m.
struct CaravanInstance {
  std::vector<double> masses;
  std::vector<CirclePoint> arrivals;

  std::size_t size() const noexcept { return masses.size(); }
  double total_mass() const noexcept;
  /// True when the masses fill the circle exactly (within kCircleTol).
  bool is_complete() const noexcept;
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Builds and validates an instance from raw positions in [0, 1).
CaravanInstance make_caravan_instance(std::vector<double> masses,
                                      std::span<const double> arrivals);

/// Half-open circular arc [start, start + length); it wraps through 0 when
/// start + length > 1.
struct Arc {
  double start = 0.0;
  double length = 0.0;

  double end() const noexcept { return start + length; }
};

/// Disjoint union of half-open circular arcs. Arcs that touch are merged,
/// so every stored arc is a maximal block. The full circle is [0, 1).
class ArcSet {
 public:
  ArcSet() = default;

  static ArcSet full_circle();

  /// Returns the union with `arc`. Throws std::invalid_argument
  /// ("overlapping arc") when the arc overlaps a block by more than the
  /// circle tolerance.
  [[nodiscard]] ArcSet inserted(Arc arc) const;
  void insert(Arc arc);

  std::vector<Arc> blocks() const;
  std::size_t block_count() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  double total_length() const noexcept { return total_; }
  bool is_full() const noexcept;
  bool contains(double x) const;

  // Neighbour queries used by the parking scan. Starts are returned in
  // unwrapped coordinates relative to the query point.

  /// Block with the greatest start <= x (circularly); its start is
  /// reported in (x - 1, x].
  std::optional<Arc> block_at_or_before(double x) const;
  /// Block with the smallest start >= x (circularly); its start is
  /// reported in [x, x + 1).
  std::optional<Arc> block_at_or_after(double x) const;
  /// Removes the block whose start is `start` modulo 1.
  void erase_block(double start);
  /// Exact stored start in [0, 1) of the block starting at `start` modulo 1.
  double stored_start(double start) const;

 private:
  void put(double start, double length);
  std::map<double, double>::const_iterator find_block(double start) const;

  std::map<double, double> blocks_;  // start in [0,1) -> length in (0,1]
  double total_ = 0.0;
};

/// Nonincreasing masses with implicit trailing zeros; sum <= 1.
class RankedMassPartition {
 public:
  RankedMassPartition() = default;
  /// Sorts `masses` into nonincreasing order and drops zeros.
  explicit RankedMassPartition(std::vector<double> masses);

  const std::vector<double>& masses() const noexcept { return masses_; }
  std::size_t size() const noexcept { return masses_.size(); }
  bool empty() const noexcept { return masses_.empty(); }
  /// i-th largest mass (0-based); zero past the stored entries.
  double operator[](std::size_t i) const noexcept;
  double sum() const noexcept;

  /// Componentwise sup distance, padding the shorter with zeros.
  static double max_abs_difference(const RankedMassPartition& a,
                                   const RankedMassPartition& b) noexcept;

 private:
  std::vector<double> masses_;
};

/// Ranked block lengths of an arc set.
RankedMassPartition ranked_lengths(const ArcSet& set);

struct Jump {
  double location = 0.0;  // in [0, 1)
  double size = 0.0;      // > 0
};

/// Cadlag path on [0, 1): constant negative slope plus finitely many
/// positive jumps. Extended to R by value(x + 1) = value(x) + value(1-).
class JumpDriftPath {
 public:
  JumpDriftPath() = default;
  /// Sorts the jumps by location. Throws std::invalid_argument for a
  /// nonnegative slope, a nonpositive jump or a location outside [0, 1).
  JumpDriftPath(double slope, std::vector<Jump> jumps);

  double slope() const noexcept { return slope_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  double total_jump_mass() const noexcept;

  /// value(x) for x in [0, 1); right-continuous.
  double value(double x) const;
  /// value(x-) for x in [0, 1]; value(0-) is 0 under the periodic extension.
  double left_limit(double x) const;
  /// value(1-).
  double end_value() const noexcept { return slope_ + total_jump_mass(); }
  /// Periodic extension to all of R.
  double value_extended(double x) const;
  double left_limit_extended(double x) const;

 private:
  // Sum of jump sizes with location < x (strict) or <= x.
  double jumps_before(double x, bool inclusive) const;

  double slope_ = -1.0;
  std::vector<Jump> jumps_;
  std::vector<double> prefix_;  // prefix_[k] = sum of the first k jumps
};

/// Path sampled on the regular grid x = k / G, k = 0..G.
struct GridPath {
  std::vector<double> values;

  std::size_t grid_size() const noexcept {
    return values.empty() ? 0 : values.size() - 1;
  }
};

/// One piece of a circle function: on [x, next knot) the value is
/// value + slope * (t - x).
struct ProfileKnot {
  double x = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

/// Piecewise linear, right-continuous function on the circle, stored as a
/// breakpoint list. Used for the per-caravan pieces and the cumulative
/// parking profile; slopes are 0 or -1 and jumps sit at arrival points.
class Profile {
 public:
  Profile() = default;  // identically zero

  /// Builds a profile from knots covering one period [x0, x0 + 1) in
  /// unwrapped coordinates (x0 = knots.front().x).
  static Profile from_period(std::vector<ProfileKnot> knots);
  /// Same, with `wrapped[k]` the exact position in [0, 1) of knot k, or NaN
  /// to derive it from the unwrapped coordinate.
  static Profile from_period(std::vector<ProfileKnot> knots, const std::vector<double>& wrapped);

  const std::vector<ProfileKnot>& knots() const noexcept { return knots_; }

  double value(double x) const;
  double left_limit(double x) const;
  double jump_at(double x) const { return value(x) - left_limit(x); }

  Profile operator+(const Profile& other) const;

  /// Interior of the support {value > tol}, as an arc set.
  ArcSet support(double tol = kCircleTol) const;
  double min_value() const;

 private:
  std::size_t piece_index(double x) const;
  double piece_value(std::size_t k, double x) const;

  std::vector<ProfileKnot> knots_;  // sorted; empty or knots_[0].x == 0
};

/// (theta_0, theta_1 >= theta_2 >= ...), with theta_0^2 + sum theta_i^2 = 1.
struct ThetaSequence {
  double theta0 = 0.0;
  std::vector<double> atoms;
  bool truncated = false;

  double square_sum() const noexcept;
  /// Throws std::invalid_argument when the normalization or ordering fails.
  void validate(double tol = 1e-9) const;
};

}  // namespace caravan
