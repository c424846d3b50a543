#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "caravan/parking.hpp"
#include "caravan/samplers.hpp"

namespace caravan {
namespace {

TEST(ParkCaravan, EmptyLot) {
  const ParkStep st = park_caravan(ArcSet{}, CirclePoint(0.2), 0.3);
  ASSERT_EQ(st.occupied.block_count(), 1u);
  EXPECT_DOUBLE_EQ(st.occupied.blocks()[0].start, 0.2);
  EXPECT_NEAR(st.occupied.blocks()[0].length, 0.3, 1e-15);
  EXPECT_NEAR(st.landing.position(), 0.5, 1e-15);
}

TEST(ParkCaravan, SkipsOccupiedBlock) {
  const ArcSet lot = ArcSet{}.inserted(Arc{0.2, 0.3});
  const ParkStep st = park_caravan(lot, CirclePoint(0.4), 0.3);
  ASSERT_EQ(st.occupied.block_count(), 1u);
  EXPECT_DOUBLE_EQ(st.occupied.blocks()[0].start, 0.2);
  EXPECT_NEAR(st.occupied.blocks()[0].length, 0.6, 1e-15);
  EXPECT_NEAR(st.landing.position(), 0.8, 1e-15);
  // cars pass over [0.4, 0.5) without parking
  EXPECT_NEAR(st.piece.value(0.45), 0.3, 1e-15);
  EXPECT_NEAR(st.piece.value(0.6), 0.2, 1e-15);
}

TEST(ParkCaravan, WrapsThroughZero) {
  const ParkStep st = park_caravan(ArcSet{}, CirclePoint(0.9), 0.2);
  ASSERT_EQ(st.occupied.block_count(), 1u);
  EXPECT_DOUBLE_EQ(st.occupied.blocks()[0].start, 0.9);
  EXPECT_NEAR(st.occupied.blocks()[0].length, 0.2, 1e-15);
  EXPECT_NEAR(st.landing.position(), 0.1, 1e-15);
}

TEST(ParkCaravan, CapacityExceeded) {
  const ArcSet lot = ArcSet{}.inserted(Arc{0.0, 0.8});
  try {
    (void)park_caravan(lot, CirclePoint(0.5), 0.3);
    FAIL() << "expected capacity error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "capacity exceeded");
  }
}

TEST(RunParking, CompleteInstanceEndsFull) {
  const CaravanInstance inst = make_caravan_instance({0.5, 0.5}, std::vector<double>{0.0, 0.25});
  const ParkingTrajectory tr = run_parking(inst);
  ASSERT_EQ(tr.steps(), 2u);
  ASSERT_EQ(tr.ranked[1].size(), 1u);
  EXPECT_DOUBLE_EQ(tr.ranked[1][0], 0.5);
  ASSERT_EQ(tr.ranked[2].size(), 1u);
  EXPECT_DOUBLE_EQ(tr.ranked[2][0], 1.0);
  EXPECT_TRUE(tr.occupied[2].is_full());
  EXPECT_TRUE(tr.ranked[0].empty());
}

TEST(RunParking, DisjointPlacement) {
  const CaravanInstance inst = make_caravan_instance({0.3, 0.3}, std::vector<double>{0.2, 0.6});
  const ParkingTrajectory tr = run_parking(inst);
  const auto blocks = tr.occupied[2].blocks();
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_DOUBLE_EQ(blocks[0].start, 0.2);
  EXPECT_DOUBLE_EQ(blocks[1].start, 0.6);
  EXPECT_NEAR(tr.ranked[2][0], 0.3, 1e-15);
  EXPECT_NEAR(tr.ranked[2][1], 0.3, 1e-15);
}

TEST(RunParking, MergingPlacement) {
  const CaravanInstance inst = make_caravan_instance({0.3, 0.3}, std::vector<double>{0.2, 0.4});
  const ParkingTrajectory tr = run_parking(inst);
  ASSERT_EQ(tr.ranked[2].size(), 1u);
  EXPECT_NEAR(tr.ranked[2][0], 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(tr.occupied[2].blocks()[0].start, 0.2);
}

TEST(RunParking, RankedAtMatchesTrajectory) {
  const CaravanInstance inst = make_instance(CaravanLaw::exponential(1.0), 0.02, 11);
  const ParkingTrajectory tr = run_parking(inst);
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, inst.size()}) {
    EXPECT_EQ(RankedMassPartition::max_abs_difference(ranked_at(inst, i), tr.ranked[i]), 0.0) << "step " << i;
  }
  const std::vector<std::size_t> steps{inst.size(), 3, 0, 3};
  const auto many = ranked_at_steps(inst, steps);
  ASSERT_EQ(many.size(), steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    EXPECT_EQ(RankedMassPartition::max_abs_difference(many[k], tr.ranked[steps[k]]), 0.0);
  }
}

TEST(BackwardIndex, Examples) {
  EXPECT_EQ(backward_index(4, 0.25, 2.0, 1.0), 2u);
  EXPECT_EQ(backward_index(4, 0.25, 2.0, 0.0), 4u);
  EXPECT_EQ(backward_index(4, 0.25, 2.0, 2.0), 0u);
  // exact integer shifts survive rounding: 1e-4^(-1/2) = 100
  EXPECT_EQ(backward_index(10000, 1e-4, 2.0, 1.0), 9900u);
  try {
    (void)backward_index(4, 0.25, 2.0, 2.6);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_STREQ(e.what(), "time beyond process start");
  }
}

TEST(BackwardMarginal, EndpointsOfTheProcess) {
  const CaravanInstance inst = make_instance(CaravanLaw::deterministic(1.0), 0.25, 3);
  ASSERT_EQ(inst.size(), 4u);
  const RankedMassPartition full = backward_marginal(inst, 0.25, 2.0, 0.0);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_DOUBLE_EQ(full[0], 1.0);
  EXPECT_TRUE(backward_marginal(inst, 0.25, 2.0, 2.0).empty());
  EXPECT_EQ(RankedMassPartition::max_abs_difference(backward_marginal(inst, 0.25, 2.0, 1.0), ranked_at(inst, 2)), 0.0);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const CaravanInstance inst = make_caravan_instance({0.3, 0.3}, std::vector<double>{0.2, 0.6});
  std::ostringstream os;
  write_trajectory_csv(os, run_parking(inst));
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("step,block_rank,block_start,block_length\n", 0), 0u);
  // one row at step 1, two at step 2
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  EXPECT_EQ(lines, 4u);
}

TEST(Parking, DeterministicQuarterTrajectory) {
  const CaravanInstance inst = make_instance(CaravanLaw::deterministic(1.0), 0.25, 1);
  const ParkingTrajectory tr = run_parking(inst);
  ASSERT_EQ(tr.steps(), 4u);
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_NEAR(tr.ranked[i].sum(), 0.25 * static_cast<double>(i), 1e-12);
}

}  // namespace
}  // namespace caravan
