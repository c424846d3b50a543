#include <cmath>
#include <stdexcept>

#include "caravan/model.hpp"

namespace caravan {

namespace {

// Key matching tolerance for erase_block: keys of distinct blocks differ by
// at least a block length plus a gap, far above round-off from +-1 shifts.
constexpr double kKeyTol = 1e-13;

}  // namespace

ArcSet ArcSet::full_circle() {
  ArcSet s;
  s.put(0.0, 1.0);
  return s;
}

bool ArcSet::is_full() const noexcept {
  return blocks_.size() == 1 && blocks_.begin()->second >= 1.0 - kCircleTol;
}

void ArcSet::put(double start, double length) {
  blocks_.emplace(wrap_unit(start), length);
  total_ += length;
}

std::map<double, double>::const_iterator ArcSet::find_block(double start) const {
  const double w = wrap_unit(start);
  auto it = blocks_.lower_bound(w - kKeyTol);
  if (it == blocks_.end() || it->first > w + kKeyTol) {
    // w may sit just below 1 while the key is 0.
    it = blocks_.begin();
    if (it == blocks_.end() || std::abs(it->first + 1.0 - w) > kKeyTol) {
      throw std::logic_error("no block at the given start");
    }
  }
  return it;
}

double ArcSet::stored_start(double start) const { return find_block(start)->first; }

void ArcSet::erase_block(double start) {
  auto it = find_block(start);
  total_ -= it->second;
  blocks_.erase(it);
  if (blocks_.empty()) total_ = 0.0;
}

std::optional<Arc> ArcSet::block_at_or_before(double x) const {
  if (blocks_.empty()) return std::nullopt;
  const double base = std::floor(x);
  const double w = wrap_unit(x);
  auto it = blocks_.upper_bound(w);
  if (it != blocks_.begin()) {
    --it;
    return Arc{it->first + base, it->second};
  }
  auto last = std::prev(blocks_.end());
  return Arc{last->first + base - 1.0, last->second};
}

std::optional<Arc> ArcSet::block_at_or_after(double x) const {
  if (blocks_.empty()) return std::nullopt;
  const double base = std::floor(x);
  const double w = wrap_unit(x);
  auto it = blocks_.lower_bound(w);
  if (it != blocks_.end()) return Arc{it->first + base, it->second};
  return Arc{blocks_.begin()->first + base + 1.0, blocks_.begin()->second};
}

bool ArcSet::contains(double x) const {
  auto pred = block_at_or_before(x);
  return pred && x < pred->end();
}

void ArcSet::insert(Arc arc) {
  if (!(arc.length > 0.0) || arc.length > 1.0 + kCircleTol) {
    throw std::invalid_argument("arc length must lie in (0, 1]");
  }
  if (is_full()) throw std::invalid_argument("overlapping arc");

  const double origin = wrap_unit(arc.start);
  double s = origin;
  double e = origin + arc.length;

  if (auto pred = block_at_or_before(origin)) {
    if (pred->end() > origin + kCircleTol) throw std::invalid_argument("overlapping arc");
    if (pred->end() >= origin - kCircleTol) {
      s = pred->start;
      erase_block(pred->start);
    }
  }
  if (auto succ = block_at_or_after(origin)) {
    // A successor starting before e would overlap; the predecessor merged
    // above cannot reappear here because it was erased.
    if (succ->start < e - kCircleTol) throw std::invalid_argument("overlapping arc");
    if (succ->start <= e + kCircleTol) {
      e = std::max(e, succ->end());
      erase_block(succ->start);
    }
  }

  if (e - s >= 1.0 - kCircleTol) {
    if (!blocks_.empty()) throw std::invalid_argument("overlapping arc");
    blocks_.clear();
    total_ = 0.0;
    put(0.0, 1.0);
    return;
  }
  put(s, e - s);
}

ArcSet ArcSet::inserted(Arc arc) const {
  ArcSet copy = *this;
  copy.insert(arc);
  return copy;
}

std::vector<Arc> ArcSet::blocks() const {
  std::vector<Arc> out;
  out.reserve(blocks_.size());
  for (const auto& [start, length] : blocks_) out.push_back(Arc{start, length});
  return out;
}

RankedMassPartition ranked_lengths(const ArcSet& set) {
  std::vector<double> lengths;
  lengths.reserve(set.block_count());
  for (const Arc& a : set.blocks()) lengths.push_back(a.length);
  return RankedMassPartition(std::move(lengths));
}

}  // namespace caravan
