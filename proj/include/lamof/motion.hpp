#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace lamof {

using Index = Eigen::Index;

/// N x D, one frame per row. Row-major so a frame is contiguous.
using FrameMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FrameVector = Eigen::RowVectorXd;

enum class Representation : std::uint8_t {
  Cartesian3D = 0,  ///< 3 coordinates per joint, meters.
  Rot6D = 1,        ///< 6D rotation per joint followed by a 3D root translation.
};

Index feature_dim(Representation rep, Index joint_count);
std::string_view representation_name(Representation rep);
Representation parse_representation(std::string_view name);

/// Framewise motion: immutable after construction, validated on entry.
class MotionSequence {
 public:
  MotionSequence(FrameMatrix frames, Representation rep, Index joint_count, double fps);

  const FrameMatrix& frames() const noexcept { return frames_; }
  auto frame(Index t) const { return frames_.row(t); }
  Index frame_count() const noexcept { return frames_.rows(); }
  Index feature_dim() const noexcept { return frames_.cols(); }
  Index joint_count() const noexcept { return joint_count_; }
  Representation representation() const noexcept { return rep_; }
  double fps() const noexcept { return fps_; }

  friend bool operator==(const MotionSequence& a, const MotionSequence& b) {
    return a.rep_ == b.rep_ && a.joint_count_ == b.joint_count_ && a.fps_ == b.fps_ &&
           a.frames_.rows() == b.frames_.rows() && a.frames_.cols() == b.frames_.cols() &&
           a.frames_ == b.frames_;
  }

 private:
  FrameMatrix frames_;
  Representation rep_;
  Index joint_count_;
  double fps_;
};

/// Discrete Lagrangian field: per-frame forward differences of every feature.
struct VelocityField {
  FrameMatrix velocities;

  Index frame_count() const noexcept { return velocities.rows(); }
  Index feature_dim() const noexcept { return velocities.cols(); }
};

/// velocities[t] = frames[t+1] - frames[t]; the last row repeats the one
/// before it, and a single-frame motion yields a zero row.
VelocityField compute_velocity_field(const MotionSequence& motion);

/// Re-orthonormalizes every joint rotation of a Rot6D frame in place.
void project_rotations(Eigen::Ref<FrameVector> frame, Index joint_count);

/// Exact-length resampling. Shrinking keeps frames round(i (N-1)/(T-1));
/// growing interpolates linearly at uniform fractional indices. The first
/// and last frames are preserved bit-exactly. Interpolated Rot6D frames are
/// re-projected onto valid rotations.
MotionSequence resample_to_length(const MotionSequence& motion, Index target_len);

}  // namespace lamof
