#include "caravan/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace caravan {

double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  // floor can leave r == 1 for tiny negative x.
  if (r >= 1.0) r = 0.0;
  return r;
}

CirclePoint::CirclePoint(double position) : position_(position) {
  if (!(position >= 0.0 && position < 1.0)) {
    throw std::invalid_argument("circle point outside [0, 1): " +
                                std::to_string(position));
  }
}

CirclePoint CirclePoint::wrap(double x) noexcept {
  CirclePoint p;
  p.position_ = wrap_unit(x);
  return p;
}

double CaravanInstance::total_mass() const noexcept {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

bool CaravanInstance::is_complete() const noexcept {
  return std::abs(total_mass() - 1.0) <= kCircleTol;
}

void CaravanInstance::validate() const {
  if (masses.empty()) throw std::invalid_argument("instance has no caravans");
  if (masses.size() != arrivals.size()) {
    throw std::invalid_argument("masses and arrivals differ in length");
  }
  for (double p : masses) {
    if (!(p > 0.0)) throw std::invalid_argument("caravan mass must be positive");
  }
  if (total_mass() > 1.0 + kCircleTol) {
    throw std::invalid_argument("total caravan mass exceeds the circle");
  }
}

CaravanInstance make_caravan_instance(std::vector<double> masses,
                                      std::span<const double> arrivals) {
  CaravanInstance inst;
  inst.masses = std::move(masses);
  inst.arrivals.reserve(arrivals.size());
  for (double s : arrivals) inst.arrivals.emplace_back(s);
  inst.validate();
  return inst;
}

RankedMassPartition::RankedMassPartition(std::vector<double> masses)
    : masses_(std::move(masses)) {
  std::erase_if(masses_, [](double m) { return !(m > 0.0); });
  std::sort(masses_.begin(), masses_.end(), std::greater<>());
}

double RankedMassPartition::operator[](std::size_t i) const noexcept {
  return i < masses_.size() ? masses_[i] : 0.0;
}

double RankedMassPartition::sum() const noexcept {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double RankedMassPartition::max_abs_difference(
    const RankedMassPartition& a, const RankedMassPartition& b) noexcept {
  const std::size_t n = std::max(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

JumpDriftPath::JumpDriftPath(double slope, std::vector<Jump> jumps)
    : slope_(slope), jumps_(std::move(jumps)) {
  if (!(slope_ < 0.0)) throw std::invalid_argument("path slope must be negative");
  for (const Jump& j : jumps_) {
    if (!(j.size > 0.0)) throw std::invalid_argument("jump sizes must be positive");
    if (!(j.location >= 0.0 && j.location < 1.0)) {
      throw std::invalid_argument("jump location outside [0, 1)");
    }
  }
  auto by_location = [](const Jump& a, const Jump& b) { return a.location < b.location; };
  if (!std::is_sorted(jumps_.begin(), jumps_.end(), by_location)) {
    std::stable_sort(jumps_.begin(), jumps_.end(), by_location);
  }
  prefix_.resize(jumps_.size() + 1, 0.0);
  for (std::size_t k = 0; k < jumps_.size(); ++k) prefix_[k + 1] = prefix_[k] + jumps_[k].size;
}

double JumpDriftPath::total_jump_mass() const noexcept {
  return prefix_.empty() ? 0.0 : prefix_.back();
}

double JumpDriftPath::jumps_before(double x, bool inclusive) const {
  auto it = inclusive
                ? std::upper_bound(jumps_.begin(), jumps_.end(), x,
                                   [](double v, const Jump& j) { return v < j.location; })
                : std::lower_bound(jumps_.begin(), jumps_.end(), x,
                                   [](const Jump& j, double v) { return j.location < v; });
  return prefix_.empty() ? 0.0 : prefix_[static_cast<std::size_t>(it - jumps_.begin())];
}

double JumpDriftPath::value(double x) const { return slope_ * x + jumps_before(x, true); }

double JumpDriftPath::left_limit(double x) const {
  if (x <= 0.0) return 0.0;
  return slope_ * x + jumps_before(x, false);
}

double JumpDriftPath::value_extended(double x) const {
  const double k = std::floor(x);
  return value(x - k) + k * end_value();
}

double JumpDriftPath::left_limit_extended(double x) const {
  double k = std::floor(x);
  double frac = x - k;
  if (frac == 0.0) {
    // x-: approach from the previous period.
    return left_limit(1.0) + (k - 1.0) * end_value();
  }
  return left_limit(frac) + k * end_value();
}

double ThetaSequence::square_sum() const noexcept {
  double s = theta0 * theta0;
  for (double a : atoms) s += a * a;
  return s;
}

void ThetaSequence::validate(double tol) const {
  if (theta0 < 0.0) throw std::invalid_argument("theta0 must be nonnegative");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0.0)) throw std::invalid_argument("theta atoms must be positive");
    if (i > 0 && atoms[i] > atoms[i - 1]) {
      throw std::invalid_argument("theta atoms must be nonincreasing");
    }
  }
  if (std::abs(square_sum() - 1.0) > tol) {
    throw std::invalid_argument("theta squares must sum to 1");
  }
}

}  // namespace caravan
