#include "lamof/motion.hpp"

#include <string>

#include "lamof/error.hpp"
#include "lamof/rotation.hpp"

namespace lamof {

Index feature_dim(Representation rep, Index joint_count) {
  switch (rep) {
    case Representation::Cartesian3D: return 3 * joint_count;
    case Representation::Rot6D: return 6 * joint_count + 3;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown representation");
}

std::string_view representation_name(Representation rep) {
  switch (rep) {
    case Representation::Cartesian3D: return "cartesian3d";
    case Representation::Rot6D: return "rot6d";
  }
  return "unknown";
}

Representation parse_representation(std::string_view name) {
  if (name == "cartesian3d") return Representation::Cartesian3D;
  if (name == "rot6d") return Representation::Rot6D;
  throw Error(ErrorCode::ParseError, "unknown representation '" + std::string(name) + "'");
}

MotionSequence::MotionSequence(FrameMatrix frames, Representation rep, Index joint_count, double fps)
    : frames_(std::move(frames)), rep_(rep), joint_count_(joint_count), fps_(fps) {
  if (rep_ != Representation::Cartesian3D && rep_ != Representation::Rot6D) {
    throw Error(ErrorCode::InvalidArgument, "unknown representation");
  }
  if (joint_count_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "joint count must be positive");
  }
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    throw Error(ErrorCode::InvalidArgument, "fps must be positive and finite");
  }
  if (frames_.rows() < 1) {
    throw Error(ErrorCode::InvalidArgument, "motion needs at least one frame");
  }
  const Index expected = lamof::feature_dim(rep_, joint_count_);
  if (frames_.cols() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame dimension " + std::to_string(frames_.cols()) + " does not match " +
                    std::string(representation_name(rep_)) + " with " +
                    std::to_string(joint_count_) + " joints (expected " +
                    std::to_string(expected) + ")");
  }
  if (!frames_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "motion contains non-finite values");
  }
}

VelocityField compute_velocity_field(const MotionSequence& motion) {
  const Index n = motion.frame_count();
  const auto& f = motion.frames();
  VelocityField field{FrameMatrix::Zero(n, motion.feature_dim())};
  if (n < 2) return field;
  field.velocities.topRows(n - 1) = f.bottomRows(n - 1) - f.topRows(n - 1);
  field.velocities.row(n - 1) = field.velocities.row(n - 2);
  return field;
}

void project_rotations(Eigen::Ref<FrameVector> frame, Index joint_count) {
  for (Index j = 0; j < joint_count; ++j) {
    const Rotation6D projected = project_rot6d(frame.segment<6>(6 * j).transpose());
    frame.segment<6>(6 * j) = projected.transpose();
  }
}

MotionSequence resample_to_length(const MotionSequence& motion, Index target_len) {
  if (target_len < 1) {
    throw Error(ErrorCode::InvalidArgument, "target length must be at least 1");
  }
  const Index n = motion.frame_count();
  if (target_len == n) return motion;

  const auto& src = motion.frames();
  FrameMatrix out(target_len, motion.feature_dim());
  if (target_len == 1) {
    out.row(0) = src.row(0);
  } else if (target_len < n) {
    // round-half-up of i (n-1) / (T-1) in integer arithmetic
    const Index den = target_len - 1;
    for (Index i = 0; i < target_len; ++i) {
      const Index idx = (2 * i * (n - 1) + den) / (2 * den);
      out.row(i) = src.row(idx);
    }
  } else {
    const Index den = target_len - 1;
    const bool rot6d = motion.representation() == Representation::Rot6D;
    for (Index i = 0; i < target_len; ++i) {
      const Index num = i * (n - 1);
      const Index lo = num / den;
      const Index rem = num % den;
      if (rem == 0) {
        out.row(i) = src.row(lo);
        continue;
      }
      const double frac = static_cast<double>(rem) / static_cast<double>(den);
      out.row(i) = (1.0 - frac) * src.row(lo) + frac * src.row(lo + 1);
      if (rot6d) project_rotations(out.row(i), motion.joint_count());
    }
  }
  return MotionSequence(std::move(out), motion.representation(), motion.joint_count(), motion.fps());
}

}  // namespace lamof
