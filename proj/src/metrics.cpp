#include "lamof/metrics.hpp"

#include <string>

#include "lamof/error.hpp"

namespace lamof {

namespace {

void require_same_shape(const SuperMotionSequence& a, const SuperMotionSequence& b) {
  if (a.segment_count() != b.segment_count() || a.feature_dim() != b.feature_dim()) {
    throw Error(ErrorCode::ShapeMismatch,
                "supermotion sequences differ in shape (" + std::to_string(a.segment_count()) + "x" +
                    std::to_string(a.feature_dim()) + " vs " + std::to_string(b.segment_count()) +
                    "x" + std::to_string(b.feature_dim()) + ")");
  }
}

void require_feet(const MotionSequence& motion, const Skeleton& skeleton, int up_axis) {
  if (motion.representation() != Representation::Cartesian3D) {
    throw Error(ErrorCode::WrongRepresentation, "foot analysis needs Cartesian3D motion");
  }
  if (skeleton.foot_joints().empty()) throw Error(ErrorCode::NoFootJoints, "skeleton has no foot joints");
  if (skeleton.joint_count() != motion.joint_count()) {
    throw Error(ErrorCode::DimensionMismatch, "skeleton and motion joint counts differ");
  }
  if (up_axis < 0 || up_axis > 2) throw Error(ErrorCode::InvalidArgument, "up axis must be 0, 1 or 2");
}

// Horizontal speed of `joint` at frame t from the forward difference, with
// the last frame repeating the previous step.
double horizontal_speed(const FrameMatrix& frames, Index joint, Index t, int up_axis) {
  const Index n = frames.rows();
  if (n < 2) return 0.0;
  const Index t0 = t + 1 < n ? t : n - 2;
  Eigen::Vector3d step = (frames.row(t0 + 1).segment<3>(3 * joint) - frames.row(t0).segment<3>(3 * joint))
                             .transpose();
  step[up_axis] = 0.0;
  return step.norm();
}

PositionMatrix pose_positions(const SuperMotionSequence& sm, const FrameVector& pose,
                              const Skeleton& skeleton) {
  if (sm.representation() == Representation::Cartesian3D) {
    return Eigen::Map<const PositionMatrix>(pose.data(), sm.joint_count(), 3);
  }
  return forward_kinematics(skeleton, pose);
}

}  // namespace

MetricWeights dance_edge_weights() { return {0.636, 0.646, 0.0, 10.942, 2.964}; }
MetricWeights dance_lodge_weights() { return {0.636, 0.636, 2.964, 10.942, 2.964}; }
MetricWeights text_mdm_weights() { return {1.0, 0.0, 0.0, 0.0, 0.2}; }

double recon_metric(const SuperMotionSequence& a, const SuperMotionSequence& b, double duration_scale) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    const auto& sa = a.segment(s);
    const auto& sb = b.segment(s);
    const double dd = duration_scale * static_cast<double>(sa.duration) -
                      duration_scale * static_cast<double>(sb.duration);
    acc += (sa.start_pose - sb.start_pose).squaredNorm() + (sa.velocity - sb.velocity).squaredNorm() +
           dd * dd;
  }
  return acc / static_cast<double>(a.segment_count());
}

double joint_metric(const SuperMotionSequence& a, const SuperMotionSequence& b, const Skeleton& skeleton) {
  if (a.representation() != Representation::Rot6D || b.representation() != Representation::Rot6D) {
    throw Error(ErrorCode::WrongRepresentation,
                "joint metric needs Rot6D supermotions; use the recon metric for Cartesian data");
  }
  require_same_shape(a, b);
  if (skeleton.joint_count() != a.joint_count()) {
    throw Error(ErrorCode::DimensionMismatch, "skeleton and supermotion joint counts differ");
  }
  double acc = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    acc += (forward_kinematics(skeleton, a.segment(s).start_pose) -
            forward_kinematics(skeleton, b.segment(s).start_pose))
               .squaredNorm();
  }
  return acc / static_cast<double>(a.segment_count());
}

double velocity_metric(const SuperMotionSequence& a, const SuperMotionSequence& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    acc += (a.segment(s).velocity - b.segment(s).velocity).squaredNorm();
  }
  return acc / static_cast<double>(a.segment_count());
}

ContactLabels detect_contacts(const MotionSequence& motion, const Skeleton& skeleton,
                              const ContactThresholds& thresholds) {
  require_feet(motion, skeleton, thresholds.up_axis);
  const auto& feet = skeleton.foot_joints();
  const auto& frames = motion.frames();
  ContactLabels out{LabelMatrix::Zero(motion.frame_count(), static_cast<Index>(feet.size())), thresholds};
  for (Index t = 0; t < motion.frame_count(); ++t) {
    for (std::size_t f = 0; f < feet.size(); ++f) {
      const Index joint = feet[f];
      const double height = frames(t, 3 * joint + thresholds.up_axis);
      const double speed = horizontal_speed(frames, joint, t, thresholds.up_axis);
      out.labels(t, static_cast<Index>(f)) =
          (height <= thresholds.max_height && speed <= thresholds.max_speed) ? 1 : 0;
    }
  }
  return out;
}

FrameMatrix segment_foot_velocities(const SuperMotionSequence& sm, const Skeleton& skeleton) {
  const auto& feet = skeleton.foot_joints();
  if (feet.empty()) throw Error(ErrorCode::NoFootJoints, "skeleton has no foot joints");
  if (skeleton.joint_count() != sm.joint_count()) {
    throw Error(ErrorCode::DimensionMismatch, "skeleton and supermotion joint counts differ");
  }
  FrameMatrix out(sm.segment_count(), 3 * static_cast<Index>(feet.size()));
  for (Index s = 0; s < sm.segment_count(); ++s) {
    const auto& seg = sm.segment(s);
    const PositionMatrix p0 = pose_positions(sm, seg.start_pose, skeleton);
    const PositionMatrix p1 = pose_positions(sm, seg.start_pose + seg.velocity, skeleton);
    for (std::size_t f = 0; f < feet.size(); ++f) {
      out.row(s).segment<3>(3 * static_cast<Index>(f)) = p1.row(feet[f]) - p0.row(feet[f]);
    }
  }
  return out;
}

double contact_metric(const FrameMatrix& foot_velocities, const LabelMatrix& contacts) {
  if (foot_velocities.rows() != contacts.rows() || foot_velocities.cols() != 3 * contacts.cols() ||
      contacts.rows() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "foot velocities and contact labels are not aligned");
  }
  double acc = 0.0;
  for (Index s = 0; s < contacts.rows(); ++s) {
    for (Index f = 0; f < contacts.cols(); ++f) {
      if (contacts(s, f) == 0) continue;
      acc += foot_velocities.row(s).segment<3>(3 * f).squaredNorm();
    }
  }
  return acc / static_cast<double>(contacts.rows());
}

double contact_metric(const SuperMotionSequence& sm, const Skeleton& skeleton,
                      const ContactLabels& contacts) {
  if (contacts.labels.rows() != sm.total_frames() ||
      contacts.labels.cols() != static_cast<Index>(skeleton.foot_joints().size())) {
    throw Error(ErrorCode::ShapeMismatch, "contact labels do not cover the decoded frames");
  }
  const std::vector<Index> starts = sm.start_times();
  LabelMatrix sampled(sm.segment_count(), contacts.labels.cols());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    sampled.row(static_cast<Index>(s)) = contacts.labels.row(starts[s]);
  }
  return contact_metric(segment_foot_velocities(sm, skeleton), sampled);
}

double coherent_metric(const SuperMotionSequence& sm) {
  const std::vector<double> residual = coherence_residual(sm);
  double acc = 0.0;
  for (double r : residual) acc += r * r;
  return acc / static_cast<double>(residual.size());
}

double total_metric(const MetricComponents& c, const MetricWeights& w) {
  return w.recon * c.recon + w.joint * c.joint + w.vel * c.vel + w.contact * c.contact +
         w.coherent * c.coherent;
}

double foot_skating_ratio(const MotionSequence& motion, const Skeleton& skeleton,
                          const SkatingThresholds& thresholds) {
  require_feet(motion, skeleton, thresholds.up_axis);
  const auto& frames = motion.frames();
  Index skating = 0;
  for (Index t = 0; t < motion.frame_count(); ++t) {
    for (int joint : skeleton.foot_joints()) {
      const double height = frames(t, 3 * joint + thresholds.up_axis);
      if (height <= thresholds.max_height &&
          horizontal_speed(frames, joint, t, thresholds.up_axis) > thresholds.skate_speed) {
        ++skating;
        break;
      }
    }
  }
  return static_cast<double>(skating) / static_cast<double>(motion.frame_count());
}

double mpjpe(const MotionSequence& a, const MotionSequence& b, const Skeleton* skeleton) {
  if (a.representation() != b.representation() || a.joint_count() != b.joint_count() ||
      a.frame_count() != b.frame_count()) {
    throw Error(ErrorCode::ShapeMismatch, "mpjpe needs motions of identical shape");
  }
  if (a.representation() == Representation::Rot6D) {
    if (skeleton == nullptr) {
      throw Error(ErrorCode::WrongRepresentation, "mpjpe on Rot6D motion needs a skeleton");
    }
    return mpjpe(to_cartesian(a, skeleton), to_cartesian(b, skeleton));
  }
  const Index j_count = a.joint_count();
  double acc = 0.0;
  for (Index t = 0; t < a.frame_count(); ++t) {
    for (Index j = 0; j < j_count; ++j) {
      acc += (a.frames().row(t).segment<3>(3 * j) - b.frames().row(t).segment<3>(3 * j)).norm();
    }
  }
  return acc / static_cast<double>(a.frame_count() * j_count);
}

}  // namespace lamof
