#include <gtest/gtest.h>

#include <numeric>
#include <stdexcept>
#include <vector>

#include "caravan/bridge.hpp"
#include "caravan/parking.hpp"

namespace caravan {
namespace {

CaravanInstance two_caravans() {
  return make_caravan_instance({0.3, 0.7}, std::vector<double>{0.2, 0.6});
}

TEST(BuildBridge, Evaluation) {
  const JumpDriftPath b = build_bridge(two_caravans(), 2);
  EXPECT_DOUBLE_EQ(b.slope(), -1.0);
  EXPECT_DOUBLE_EQ(b.value(0.5), -0.2);
  EXPECT_NEAR(b.end_value(), 0.0, 1e-15);
  const JumpDriftPath b1 = build_bridge(make_caravan_instance({0.3}, std::vector<double>{0.2}), 1);
  EXPECT_DOUBLE_EQ(b1.end_value(), -0.7);
  EXPECT_THROW(build_bridge(two_caravans(), 0), std::out_of_range);
  EXPECT_THROW(build_bridge(two_caravans(), 3), std::out_of_range);
}

TEST(PathArgmin, HandTraces) {
  const PathArgmin a = path_argmin(build_bridge(two_caravans(), 2));
  EXPECT_DOUBLE_EQ(a.location, 0.6);
  EXPECT_DOUBLE_EQ(a.infimum, -0.3);

  const PathArgmin b = path_argmin(JumpDriftPath(-1.0, {Jump{0.5, 1.0}}));
  EXPECT_DOUBLE_EQ(b.location, 0.5);
  EXPECT_DOUBLE_EQ(b.infimum, -0.5);

  const PathArgmin c = path_argmin(JumpDriftPath(-1.0, {Jump{0.0, 1.0}}));
  EXPECT_EQ(c.location, 0.0);
  EXPECT_EQ(c.infimum, 0.0);
}

TEST(PathArgmin, TiesGoLeft) {
  // left limits at 0.25 and 0.75 are both -0.25
  const PathArgmin a = path_argmin(JumpDriftPath(-1.0, {Jump{0.25, 0.5}, Jump{0.75, 0.5}}));
  EXPECT_DOUBLE_EQ(a.location, 0.25);
}

TEST(ConstancyBlocks, FullCircle) {
  const CaravanInstance inst = two_caravans();
  const JumpDriftPath b = build_bridge(inst, 2);
  const RankedMassPartition r = constancy_blocks(b, path_argmin(b).location);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
}

TEST(ConstancyBlocks, AgreesWithParkingAfterOneStep) {
  const CaravanInstance inst = two_caravans();
  const double v = path_argmin(build_bridge(inst, 2)).location;
  const RankedMassPartition r = constancy_blocks(build_bridge(inst, 1), v);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 0.3, 1e-15);
  const std::vector<ConstancyInterval> iv = constancy_intervals(build_bridge(inst, 1), v);
  ASSERT_EQ(iv.size(), 1u);
  // [0.2, 0.5) seen from V = 0.6
  EXPECT_NEAR(iv[0].start, 0.6, 1e-15);
}

TEST(ConstancyBlocks, SumRuleWithSteeperSlope) {
  const JumpDriftPath p(-2.0, {Jump{0.3, 1.0}});
  const RankedMassPartition r = constancy_blocks(p, 0.0);
  EXPECT_NEAR(r.sum(), 0.5, 1e-12);
}

TEST(ConstancyBlocks, Supercritical) {
  try {
    (void)constancy_blocks(JumpDriftPath(-1.0, {Jump{0.3, 1.5}}), 0.0);
    FAIL() << "expected supercritical error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "supercritical mass");
  }
}

TEST(Vervaat, SingleJump) {
  const JumpDriftPath e = vervaat(JumpDriftPath(-1.0, {Jump{0.5, 1.0}}));
  EXPECT_DOUBLE_EQ(e.value(0.0), 1.0);  // the jump at V moves to 0
  EXPECT_DOUBLE_EQ(e.left_limit(0.0), 0.0);
  // value(V + 0.25) - value(V-) = 0.25 - (-0.5)
  EXPECT_DOUBLE_EQ(e.value(0.25), 0.75);
  EXPECT_NEAR(e.end_value(), 0.0, 1e-15);
}

TEST(Vervaat, NonnegativeWithZeroMinimum) {
  const JumpDriftPath p(-1.0, {Jump{0.1, 0.2}, Jump{0.45, 0.5}, Jump{0.8, 0.3}});
  const JumpDriftPath e = vervaat(p);
  double lowest = 0.0;
  for (const Jump& j : e.jumps()) {
    EXPECT_GE(e.left_limit(j.location), -1e-12);
    lowest = std::min(lowest, e.left_limit(j.location));
  }
  EXPECT_GE(e.left_limit(1.0), -1e-12);
  EXPECT_NEAR(std::min(lowest, e.left_limit(1.0)), 0.0, 1e-12);
}

TEST(LambCheck, Examples) {
  const LambReport a = lamb_check(make_caravan_instance({0.5, 0.5}, std::vector<double>{0.0, 0.25}));
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(a.max_discrepancy, 0.0);
  const LambReport b = lamb_check(make_caravan_instance({0.3, 0.3, 0.4}, std::vector<double>{0.2, 0.4, 0.9}));
  EXPECT_TRUE(b.pass);
  EXPECT_EQ(b.steps_checked, 3u);
  EXPECT_THROW(lamb_check(make_caravan_instance({0.5}, std::vector<double>{0.0})), std::invalid_argument);
}

TEST(ProfileBridgeIdentity, CompleteInstance) {
  // H_m(x) - H_m(0) = b_m(x) at every breakpoint
  const CaravanInstance inst =
      make_caravan_instance({0.15, 0.25, 0.1, 0.3, 0.2}, std::vector<double>{0.7, 0.1, 0.75, 0.4, 0.05});
  const Profile h = profile(inst, inst.size());
  const JumpDriftPath b = build_bridge(inst, inst.size());
  for (const ProfileKnot& k : h.knots()) {
    EXPECT_NEAR(h.value(k.x) - h.value(0.0) - b.value(k.x), 0.0, 1e-12) << "x = " << k.x;
  }
}

}  // namespace
}  // namespace caravan
