#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lamof/motion.hpp"

namespace lamof {

/// J x 3 joint positions, one joint per row.
using PositionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Joint hierarchy with rest-pose offsets. Parents are topologically sorted:
/// joint 0 is the only root and parent(j) < j for every other joint.
class Skeleton {
 public:
  Skeleton(std::vector<int> parents, PositionMatrix offsets, std::vector<int> foot_joints = {});

  Index joint_count() const noexcept { return static_cast<Index>(parents_.size()); }
  const std::vector<int>& parents() const noexcept { return parents_; }
  const PositionMatrix& offsets() const noexcept { return offsets_; }
  const std::vector<int>& foot_joints() const noexcept { return foot_joints_; }

 private:
  std::vector<int> parents_;
  PositionMatrix offsets_;
  std::vector<int> foot_joints_;
};

/// Global joint positions for one Rot6D pose (6 J rotation features followed
/// by the root translation). The root sits at the translation; each child is
/// its parent's position plus the parent's global rotation applied to the
/// child offset.
PositionMatrix forward_kinematics(const Skeleton& skeleton, Eigen::Ref<const FrameVector> pose);

/// Joint positions of frame t: a reshape for Cartesian motions, FK for Rot6D.
PositionMatrix joint_positions(const MotionSequence& motion, Index t, const Skeleton* skeleton);

/// Whole-sequence conversion to Cartesian3D. Cartesian input is returned as is.
MotionSequence to_cartesian(const MotionSequence& motion, const Skeleton* skeleton);

}  // namespace lamof
