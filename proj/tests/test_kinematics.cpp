#include <gtest/gtest.h>

#include "lamof/error.hpp"
#include "lamof/kinematics.hpp"
#include "oracles.hpp"
#include "fixtures.hpp"

using namespace lamof;
namespace lt = lamof::testing;

namespace {

Skeleton two_joint_chain() {
  PositionMatrix offsets(2, 3);
  offsets << 0, 0, 0, 1, 0, 0;
  return Skeleton({-1, 0}, offsets, {1});
}

FrameVector identity_pose(Index joints) {
  return lt::rot6d_frame(std::vector<Eigen::Matrix3d>(static_cast<std::size_t>(joints), Eigen::Matrix3d::Identity()),
                         Eigen::Vector3d::Zero());
}

}  // namespace

TEST(Skeleton, RejectsBadHierarchy) {
  PositionMatrix offsets = PositionMatrix::Zero(3, 3);
  EXPECT_THROW(Skeleton({0, 0, 1}, offsets), Error);
  EXPECT_THROW(Skeleton({-1, 2, 1}, offsets), Error);
  EXPECT_THROW(Skeleton({-1, 0, -1}, offsets), Error);
  EXPECT_THROW(Skeleton({-1, 0, 1}, offsets, {3}), Error);
  EXPECT_THROW(Skeleton({-1, 0}, offsets), Error);
  try {
    Skeleton({-1, 0, 0}, offsets, {5});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSkeleton);
  }
}

TEST(ForwardKinematics, IdentityPoseSumsOffsets) {
  Rng rng(31);
  const Skeleton sk = lt::random_skeleton(rng, 8);
  const PositionMatrix p = forward_kinematics(sk, identity_pose(8));
  EXPECT_EQ(p.row(0), Eigen::RowVector3d::Zero());
  for (Index j = 1; j < 8; ++j) {
    Eigen::RowVector3d expected = Eigen::RowVector3d::Zero();
    for (Index a = j; a > 0; a = sk.parents()[static_cast<std::size_t>(a)]) expected += sk.offsets().row(a);
    EXPECT_LE((p.row(j) - expected).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ForwardKinematics, RootQuarterTurnMovesChild) {
  std::vector<Eigen::Matrix3d> rot = {lt::axis_rotation(Eigen::Vector3d::UnitZ(), M_PI / 2), Eigen::Matrix3d::Identity()};
  const PositionMatrix p = forward_kinematics(two_joint_chain(), lt::rot6d_frame(rot, Eigen::Vector3d::Zero()));
  EXPECT_LE((p.row(1) - Eigen::RowVector3d(0, 1, 0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardKinematics, RootPositionIsTranslation) {
  Rng rng(32);
  const Skeleton sk = lt::random_skeleton(rng, 5);
  const FrameVector pose = lt::random_rot6d_frame(rng, 5, 3.0);
  EXPECT_EQ(forward_kinematics(sk, pose).row(0), pose.tail<3>());
}

TEST(ForwardKinematics, MatchesHomogeneousChainOracle) {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Skeleton sk = lt::random_skeleton(rng, 5, trial % 2 == 0);
    const FrameVector pose = lt::random_rot6d_frame(rng, 5);
    EXPECT_LE((forward_kinematics(sk, pose) - oracle::fk(sk, pose)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ForwardKinematics, PreservesBoneLengths) {
  Rng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const Skeleton sk = lt::random_skeleton(rng, 10, true);
    const PositionMatrix p = forward_kinematics(sk, lt::random_rot6d_frame(rng, 10));
    for (Index j = 1; j < 10; ++j) {
      const double bone = (p.row(j) - p.row(sk.parents()[static_cast<std::size_t>(j)])).norm();
      EXPECT_NEAR(bone, sk.offsets().row(j).norm(), 1e-9);
    }
  }
}

TEST(ForwardKinematics, DimensionMismatch) {
  try {
    forward_kinematics(two_joint_chain(), FrameVector::Zero(14));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ForwardKinematics, ToCartesianConvertsEveryFrame) {
  Rng rng(35);
  const Skeleton sk = lt::random_skeleton(rng, 4);
  const MotionSequence m = lt::random_rot6d_clip(rng, 12, 4);
  const MotionSequence c = to_cartesian(m, &sk);
  ASSERT_EQ(c.representation(), Representation::Cartesian3D);
  ASSERT_EQ(c.frame_count(), 12);
  for (Index t = 0; t < 12; ++t) {
    const PositionMatrix p = oracle::fk(sk, m.frames().row(t));
    for (Index j = 0; j < 4; ++j) {
      EXPECT_LE((c.frames().row(t).segment<3>(3 * j) - p.row(j)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
  // Cartesian input passes through untouched
  EXPECT_EQ(to_cartesian(c, nullptr), c);
}
