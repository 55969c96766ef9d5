#include "lamof/kinematics.hpp"

#include <string>

#include "lamof/error.hpp"
#include "lamof/rotation.hpp"

namespace lamof {

Skeleton::Skeleton(std::vector<int> parents, PositionMatrix offsets, std::vector<int> foot_joints)
    : parents_(std::move(parents)), offsets_(std::move(offsets)), foot_joints_(std::move(foot_joints)) {
  const auto j_count = static_cast<Index>(parents_.size());
  if (j_count < 1) throw Error(ErrorCode::InvalidSkeleton, "skeleton has no joints");
  if (offsets_.rows() != j_count) {
    throw Error(ErrorCode::InvalidSkeleton, "offset count does not match parent count");
  }
  if (!offsets_.allFinite()) throw Error(ErrorCode::InvalidSkeleton, "bone offsets must be finite");
  if (parents_[0] != -1) throw Error(ErrorCode::InvalidSkeleton, "joint 0 must be the root");
  for (Index j = 1; j < j_count; ++j) {
    const int p = parents_[static_cast<std::size_t>(j)];
    if (p < 0 || p >= j) {
      throw Error(ErrorCode::InvalidSkeleton,
                  "joint " + std::to_string(j) + " must have a parent with a lower index");
    }
  }
  for (int f : foot_joints_) {
    if (f < 0 || f >= j_count) {
      throw Error(ErrorCode::InvalidSkeleton, "foot joint index " + std::to_string(f) + " out of range");
    }
  }
}

PositionMatrix forward_kinematics(const Skeleton& skeleton, Eigen::Ref<const FrameVector> pose) {
  const Index j_count = skeleton.joint_count();
  if (pose.size() != feature_dim(Representation::Rot6D, j_count)) {
    throw Error(ErrorCode::DimensionMismatch,
                "pose has " + std::to_string(pose.size()) + " features, skeleton needs " +
                    std::to_string(feature_dim(Representation::Rot6D, j_count)));
  }
  std::vector<Eigen::Matrix3d> global(static_cast<std::size_t>(j_count));
  PositionMatrix positions(j_count, 3);
  const auto& parents = skeleton.parents();
  const auto& offsets = skeleton.offsets();

  for (Index j = 0; j < j_count; ++j) {
    const Eigen::Matrix3d local = rot6d_to_matrix(pose.segment<6>(6 * j).transpose());
    const auto ju = static_cast<std::size_t>(j);
    if (j == 0) {
      global[0] = local;
      positions.row(0) = pose.tail<3>();
      continue;
    }
    const auto p = static_cast<std::size_t>(parents[ju]);
    global[ju] = global[p] * local;
    positions.row(j) =
        positions.row(static_cast<Index>(p)) + (global[p] * offsets.row(j).transpose()).transpose();
  }
  return positions;
}

PositionMatrix joint_positions(const MotionSequence& motion, Index t, const Skeleton* skeleton) {
  if (motion.representation() == Representation::Cartesian3D) {
    return Eigen::Map<const PositionMatrix>(motion.frames().row(t).data(), motion.joint_count(), 3);
  }
  if (skeleton == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "Rot6D motion needs a skeleton for joint positions");
  }
  if (skeleton->joint_count() != motion.joint_count()) {
    throw Error(ErrorCode::DimensionMismatch, "skeleton and motion joint counts differ");
  }
  return forward_kinematics(*skeleton, motion.frame(t));
}

MotionSequence to_cartesian(const MotionSequence& motion, const Skeleton* skeleton) {
  if (motion.representation() == Representation::Cartesian3D) return motion;
  const Index j_count = motion.joint_count();
  FrameMatrix out(motion.frame_count(), 3 * j_count);
  for (Index t = 0; t < motion.frame_count(); ++t) {
    const PositionMatrix p = joint_positions(motion, t, skeleton);
    out.row(t) = Eigen::Map<const FrameVector>(p.data(), 3 * j_count);
  }
  return MotionSequence(std::move(out), Representation::Cartesian3D, j_count, motion.fps());
}

}  // namespace lamof
