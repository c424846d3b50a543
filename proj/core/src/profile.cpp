#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <stdexcept>

#include "caravan/model.hpp"

namespace caravan {

Profile Profile::from_period(std::vector<ProfileKnot> knots) {
  const std::vector<double> wrapped(knots.size(), std::numeric_limits<double>::quiet_NaN());
  return from_period(std::move(knots), wrapped);
}

Profile Profile::from_period(std::vector<ProfileKnot> knots, const std::vector<double>& wrapped) {
  Profile out;
  if (knots.empty()) return out;
  if (wrapped.size() != knots.size()) throw std::invalid_argument("wrapped size mismatch");
  std::vector<std::pair<ProfileKnot, double>> tagged;
  tagged.reserve(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) tagged.emplace_back(knots[k], wrapped[k]);
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const auto& a, const auto& b) { return a.first.x < b.first.x; });
  const double x0 = tagged.front().first.x;
  if (tagged.back().first.x >= x0 + 1.0) throw std::invalid_argument("profile knots exceed one period");

  // Split the piece that straddles the integer boundary inside (x0, x0 + 1).
  const double boundary = std::floor(x0) + 1.0;
  std::vector<ProfileKnot> split;
  split.reserve(tagged.size() + 1);
  for (std::size_t k = 0; k < tagged.size(); ++k) {
    ProfileKnot knot = tagged[k].first;
    const double next = k + 1 < tagged.size() ? tagged[k + 1].first.x : x0 + 1.0;
    if (knot.x < boundary && boundary < next) {
      split.push_back(ProfileKnot{0.0, knot.value + knot.slope * (boundary - knot.x), knot.slope});
    }
    if (!std::isnan(tagged[k].second)) {
      knot.x = tagged[k].second;
    } else {
      knot.x = knot.x >= boundary ? knot.x - boundary : knot.x - (boundary - 1.0);
      if (knot.x < 0.0) knot.x = 0.0;
    }
    split.push_back(knot);
  }
  std::stable_sort(split.begin(), split.end(),
                   [](const ProfileKnot& a, const ProfileKnot& b) { return a.x < b.x; });

  // Several knots at one position: the last one carries the right value.
  for (std::size_t k = 0; k < split.size(); ++k) {
    if (k + 1 < split.size() && split[k + 1].x == split[k].x) continue;
    out.knots_.push_back(split[k]);
  }
  if (out.knots_.front().x != 0.0) {
    // Only reachable through round-off in the boundary shift.
    const ProfileKnot& last = out.knots_.back();
    out.knots_.insert(out.knots_.begin(),
                      ProfileKnot{0.0, last.value + last.slope * (1.0 - last.x), last.slope});
  }
  return out;
}

std::size_t Profile::piece_index(double x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const ProfileKnot& k) { return v < k.x; });
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double Profile::piece_value(std::size_t k, double x) const {
  return knots_[k].value + knots_[k].slope * (x - knots_[k].x);
}

double Profile::value(double x) const {
  if (knots_.empty()) return 0.0;
  const double w = wrap_unit(x);
  return piece_value(piece_index(w), w);
}

double Profile::left_limit(double x) const {
  if (knots_.empty()) return 0.0;
  const double w = wrap_unit(x);
  if (w <= knots_.front().x) return piece_value(knots_.size() - 1, 1.0);
  auto it = std::lower_bound(knots_.begin(), knots_.end(), w,
                             [](const ProfileKnot& k, double v) { return k.x < v; });
  const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return piece_value(k, w);
}

Profile Profile::operator+(const Profile& other) const {
  if (other.knots_.empty()) return *this;
  if (knots_.empty()) return other;
  std::vector<double> xs;
  xs.reserve(knots_.size() + other.knots_.size());
  for (const auto& k : knots_) xs.push_back(k.x);
  for (const auto& k : other.knots_) xs.push_back(k.x);
  std::sort(xs.begin(), xs.end());

  // Block ends computed as start + length can miss the matching breakpoint
  // of the other summand by a few ulps; such clusters become one knot, with
  // the pieces that follow the cluster. The knot sits where a summand jumps
  // (an exact arrival point), else at the cluster's first position.
  constexpr double kSnap = 1e-14;
  Profile sum;
  sum.knots_.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size();) {
    std::size_t last = k;
    while (last + 1 < xs.size() && xs[last + 1] - xs[last] <= kSnap) ++last;
    double x = xs[k];
    double biggest = 0.0;
    for (std::size_t q = k; last > k && q <= last; ++q) {
      const double jump = std::max(std::abs(jump_at(xs[q])), std::abs(other.jump_at(xs[q])));
      if (jump > biggest) {
        biggest = jump;
        x = xs[q];
      }
    }
    if (biggest <= 1e-15) x = xs[k];
    const std::size_t a = piece_index(xs[last]);
    const std::size_t b = other.piece_index(xs[last]);
    sum.knots_.push_back(ProfileKnot{x, piece_value(a, x) + other.piece_value(b, x),
                                     knots_[a].slope + other.knots_[b].slope});
    k = last + 1;
  }
  return sum;
}

ArcSet Profile::support(double tol) const {
  ArcSet set;
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    const double begin = knots_[k].x;
    const double end = k + 1 < knots_.size() ? knots_[k + 1].x : 1.0;
    if (!(end > begin)) continue;
    if (knots_[k].value > tol || piece_value(k, end) > tol) set.insert(Arc{begin, end - begin});
  }
  return set;
}

double Profile::min_value() const {
  double lo = 0.0;
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    const double end = k + 1 < knots_.size() ? knots_[k + 1].x : 1.0;
    lo = std::min({lo, knots_[k].value, piece_value(k, end)});
  }
  return lo;
}

}  // namespace caravan
