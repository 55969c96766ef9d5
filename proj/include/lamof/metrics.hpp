#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lamof/codec.hpp"
#include "lamof/kinematics.hpp"
#include "lamof/motion.hpp"

namespace lamof {

/// Up axis used for foot heights; the remaining two axes are horizontal.
inline constexpr int kDefaultUpAxis = 1;

struct ContactThresholds {
  double max_height = 0.05;  ///< meters
  double max_speed = 0.01;   ///< meters per frame, horizontal
  int up_axis = kDefaultUpAxis;
};

struct SkatingThresholds {
  double max_height = 0.05;   ///< meters
  double skate_speed = 0.025; ///< meters per frame, horizontal
  int up_axis = kDefaultUpAxis;
};

using LabelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N x F binary foot-contact labels, one column per foot joint.
struct ContactLabels {
  LabelMatrix labels;
  ContactThresholds thresholds;
};

struct MetricWeights {
  double recon = 1.0;
  double joint = 0.0;
  double vel = 0.0;
  double contact = 0.0;
  double coherent = 0.0;
};

/// Loss-weight presets reported for the music-to-dance and text-to-motion setups.
MetricWeights dance_edge_weights();
MetricWeights dance_lodge_weights();
MetricWeights text_mdm_weights();

struct MetricComponents {
  double recon = 0.0;
  double joint = 0.0;
  double vel = 0.0;
  double contact = 0.0;
  double coherent = 0.0;
};

/// Mean over segments of |[x, v, d]_a - [x, v, d]_b|^2, with the duration
/// entry multiplied by duration_scale.
double recon_metric(const SuperMotionSequence& a, const SuperMotionSequence& b,
                    double duration_scale = 1.0);

/// Mean over segments of the summed squared FK joint distance between start
/// poses. Rot6D only.
double joint_metric(const SuperMotionSequence& a, const SuperMotionSequence& b,
                    const Skeleton& skeleton);

double velocity_metric(const SuperMotionSequence& a, const SuperMotionSequence& b);

ContactLabels detect_contacts(const MotionSequence& motion, const Skeleton& skeleton,
                              const ContactThresholds& thresholds = {});

/// M x 3F foot velocities at segment starts, taken as the decoded one-step
/// displacement positions(x_s + v_s) - positions(x_s).
FrameMatrix segment_foot_velocities(const SuperMotionSequence& sm, const Skeleton& skeleton);

/// Mean over segments of |foot_velocity(t_s) * g(t_s)|^2. foot_velocities is
/// M x 3F and contacts holds M x F labels aligned to segment starts.
double contact_metric(const FrameMatrix& foot_velocities, const LabelMatrix& contacts);

/// Convenience form: contacts are per-frame labels of the decoded sequence
/// (N x F) and are sampled at the segment start frames.
double contact_metric(const SuperMotionSequence& sm, const Skeleton& skeleton,
                      const ContactLabels& contacts);

/// Mean squared coherence residual.
double coherent_metric(const SuperMotionSequence& sm);

double total_metric(const MetricComponents& components, const MetricWeights& weights);

/// Fraction of frames in which some foot is at or below max_height while
/// moving horizontally faster than skate_speed.
double foot_skating_ratio(const MotionSequence& motion, const Skeleton& skeleton,
                          const SkatingThresholds& thresholds = {});

/// Mean per-joint Euclidean error. Cartesian inputs only unless a skeleton
/// is supplied for FK conversion.
double mpjpe(const MotionSequence& a, const MotionSequence& b, const Skeleton* skeleton = nullptr);

}  // namespace lamof
