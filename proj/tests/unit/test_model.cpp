#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caravan/model.hpp"
#include "caravan/parking.hpp"

namespace caravan {
namespace {

TEST(WrapUnit, ReducesToUnitInterval) {
  EXPECT_DOUBLE_EQ(wrap_unit(1.25), 0.25);
  EXPECT_DOUBLE_EQ(wrap_unit(-0.25), 0.75);
  EXPECT_EQ(wrap_unit(0.0), 0.0);
  EXPECT_EQ(wrap_unit(-1e-300), 0.0);
  EXPECT_LT(wrap_unit(std::nextafter(1.0, 0.0)), 1.0);
}

TEST(CirclePoint, RejectsOutOfRange) {
  EXPECT_THROW(CirclePoint(1.0), std::invalid_argument);
  EXPECT_THROW(CirclePoint(-0.1), std::invalid_argument);
  EXPECT_DOUBLE_EQ(CirclePoint::wrap(2.5).position(), 0.5);
}

TEST(CaravanInstance, Validation) {
  const std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(make_caravan_instance({0.7, 0.7}, s), std::invalid_argument);
  EXPECT_THROW(make_caravan_instance({0.5, 0.0}, s), std::invalid_argument);
  EXPECT_THROW(make_caravan_instance({0.5}, s), std::invalid_argument);
  const CaravanInstance ok = make_caravan_instance({0.5, 0.5}, s);
  EXPECT_TRUE(ok.is_complete());
  EXPECT_FALSE(make_caravan_instance({0.5}, std::vector<double>{0.3}).is_complete());
}

TEST(ArcSet, InsertIntoEmpty) {
  ArcSet a;
  a.insert(Arc{0.2, 0.3});
  ASSERT_EQ(a.block_count(), 1u);
  EXPECT_DOUBLE_EQ(a.blocks()[0].start, 0.2);
  EXPECT_DOUBLE_EQ(a.blocks()[0].length, 0.3);
}

TEST(ArcSet, AdjacentArcsMerge) {
  const ArcSet a = ArcSet{}.inserted(Arc{0.2, 0.3}).inserted(Arc{0.5, 0.3});
  ASSERT_EQ(a.block_count(), 1u);
  EXPECT_DOUBLE_EQ(a.blocks()[0].start, 0.2);
  EXPECT_NEAR(a.blocks()[0].length, 0.6, 1e-15);
}

TEST(ArcSet, WrapAroundMerge) {
  const ArcSet a = ArcSet{}.inserted(Arc{0.9, 0.1}).inserted(Arc{0.0, 0.1});
  ASSERT_EQ(a.block_count(), 1u);
  EXPECT_DOUBLE_EQ(a.blocks()[0].start, 0.9);
  EXPECT_NEAR(a.blocks()[0].length, 0.2, 1e-15);
  EXPECT_TRUE(a.contains(0.95));
  EXPECT_TRUE(a.contains(0.05));
  EXPECT_FALSE(a.contains(0.1));
}

TEST(ArcSet, OverlapIsRejected) {
  const ArcSet a = ArcSet{}.inserted(Arc{0.2, 0.3});
  try {
    (void)a.inserted(Arc{0.4, 0.2});
    FAIL() << "expected an overlap error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "overlapping arc");
  }
  EXPECT_THROW((void)a.inserted(Arc{0.1, 0.15}), std::invalid_argument);
  EXPECT_THROW((void)ArcSet::full_circle().inserted(Arc{0.1, 0.1}), std::invalid_argument);
}

TEST(ArcSet, FillingTheCircle) {
  const ArcSet a = ArcSet{}.inserted(Arc{0.25, 0.5}).inserted(Arc{0.75, 0.5});
  EXPECT_TRUE(a.is_full());
  EXPECT_DOUBLE_EQ(a.total_length(), 1.0);
}

TEST(RankedLengths, Examples) {
  EXPECT_TRUE(ranked_lengths(ArcSet{}).empty());
  const ArcSet a = ArcSet{}.inserted(Arc{0.2, 0.3}).inserted(Arc{0.7, 0.1});
  const RankedMassPartition r = ranked_lengths(a);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 0.3, 1e-15);
  EXPECT_NEAR(r[1], 0.1, 1e-15);
  EXPECT_EQ(r[5], 0.0);
  const RankedMassPartition full = ranked_lengths(ArcSet::full_circle());
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], 1.0);
}

TEST(RankedMassPartition, SortsAndDropsZeros) {
  const RankedMassPartition r({0.1, 0.0, 0.5, 0.2});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], 0.5);
  EXPECT_EQ(r[2], 0.1);
  EXPECT_NEAR(r.sum(), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(RankedMassPartition::max_abs_difference(r, RankedMassPartition({0.5, 0.2})), 0.1);
}

TEST(JumpDriftPath, ValueAndLimits) {
  const JumpDriftPath p(-1.0, {Jump{0.6, 0.7}, Jump{0.2, 0.3}});
  EXPECT_DOUBLE_EQ(p.value(0.5), -0.2);
  EXPECT_DOUBLE_EQ(p.left_limit(0.2), -0.2);
  EXPECT_DOUBLE_EQ(p.value(0.2), 0.1);
  EXPECT_NEAR(p.end_value(), 0.0, 1e-15);
  EXPECT_NEAR(p.value_extended(1.5), p.value(0.5), 1e-15);
  EXPECT_THROW(JumpDriftPath(0.0, {}), std::invalid_argument);
  EXPECT_THROW(JumpDriftPath(-1.0, {Jump{1.0, 0.1}}), std::invalid_argument);
  EXPECT_THROW(JumpDriftPath(-1.0, {Jump{0.5, -0.1}}), std::invalid_argument);
}

TEST(Profile, ZeroAtStepZero) {
  const CaravanInstance inst = make_caravan_instance({0.3, 0.7}, std::vector<double>{0.2, 0.6});
  const Profile h = profile(inst, 0);
  for (double x : {0.0, 0.2, 0.5, 0.99}) EXPECT_EQ(h.value(x), 0.0);
}

TEST(Profile, SingleCaravan) {
  const CaravanInstance inst = make_caravan_instance({0.3}, std::vector<double>{0.2});
  const Profile h = profile(inst, 1);
  for (double x : {0.2, 0.3, 0.45}) EXPECT_NEAR(h.value(x), 0.3 - (x - 0.2), 1e-15);
  for (double x : {0.0, 0.1, 0.5, 0.7}) EXPECT_NEAR(h.value(x), 0.0, 1e-15);
  EXPECT_NEAR(h.left_limit(0.5), 0.0, 1e-15);
}

TEST(Profile, TwoCaravansHandTrace) {
  const CaravanInstance inst = make_caravan_instance({0.3, 0.3}, std::vector<double>{0.2, 0.4});
  const Profile h = profile(inst, 2);
  EXPECT_NEAR(h.jump_at(0.4), 0.3, 1e-15);
  EXPECT_NEAR(h.value(0.4), 0.4, 1e-15);
  EXPECT_NEAR(h.left_limit(0.8), 0.0, 1e-15);
  EXPECT_NEAR(h.min_value(), 0.0, 1e-15);
  const ArcSet support = h.support();
  ASSERT_EQ(support.block_count(), 1u);
  EXPECT_NEAR(support.blocks()[0].start, 0.2, 1e-15);
  EXPECT_NEAR(support.blocks()[0].length, 0.6, 1e-15);
}

TEST(ThetaSequence, Validation) {
  ThetaSequence ok{0.0, {0.8, 0.6}, false};
  EXPECT_NO_THROW(ok.validate());
  ThetaSequence unordered{0.0, {0.6, 0.8}, false};
  EXPECT_THROW(unordered.validate(), std::invalid_argument);
  ThetaSequence unnormalized{0.5, {0.5}, false};
  EXPECT_THROW(unnormalized.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace caravan
