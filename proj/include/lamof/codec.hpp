#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lamof/clustering.hpp"
#include "lamof/motion.hpp"

namespace lamof {

/// A maximal run of one label: frames [start, start + duration).
struct Segment {
  int label;
  Index start;
  Index duration;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// One uniform-velocity run: x(t_s + o) = start_pose + o * velocity.
struct SuperMotion {
  FrameVector start_pose;
  FrameVector velocity;
  Index duration = 1;
  int cluster_label = 0;  ///< provenance only

  friend bool operator==(const SuperMotion& a, const SuperMotion& b) {
    return a.duration == b.duration && a.cluster_label == b.cluster_label &&
           a.start_pose.size() == b.start_pose.size() && a.velocity.size() == b.velocity.size() &&
           a.start_pose == b.start_pose && a.velocity == b.velocity;
  }
};

using ConditionTag = std::vector<std::uint8_t>;

/// The compressed representation. The condition tag is carried through
/// untouched and never interpreted.
class SuperMotionSequence {
 public:
  SuperMotionSequence(std::vector<SuperMotion> segments, Representation rep, Index joint_count,
                      double fps, std::optional<ConditionTag> condition_tag = std::nullopt);

  const std::vector<SuperMotion>& segments() const noexcept { return segments_; }
  const SuperMotion& segment(Index s) const { return segments_[static_cast<std::size_t>(s)]; }
  Index segment_count() const noexcept { return static_cast<Index>(segments_.size()); }
  Index total_frames() const noexcept { return total_frames_; }
  Index feature_dim() const noexcept { return segments_.front().start_pose.size(); }
  Index joint_count() const noexcept { return joint_count_; }
  Representation representation() const noexcept { return rep_; }
  double fps() const noexcept { return fps_; }
  const std::optional<ConditionTag>& condition_tag() const noexcept { return condition_tag_; }

  /// t_s = sum of the durations before segment s.
  std::vector<Index> start_times() const;

  friend bool operator==(const SuperMotionSequence& a, const SuperMotionSequence& b) {
    return a.rep_ == b.rep_ && a.joint_count_ == b.joint_count_ && a.fps_ == b.fps_ &&
           a.condition_tag_ == b.condition_tag_ && a.segments_ == b.segments_;
  }

 private:
  std::vector<SuperMotion> segments_;
  Representation rep_;
  Index joint_count_;
  double fps_;
  std::optional<ConditionTag> condition_tag_;
  Index total_frames_ = 0;
};

enum class VelocityMode {
  Secant,     ///< endpoint slope; adjacent segments meet exactly
  MeanField,  ///< mean of the field rows inside the segment
};

struct EncodeConfig {
  int smooth_window = 5;
  Index min_duration = 1;
  VelocityMode velocity_mode = VelocityMode::Secant;
};

/// Sliding-window majority vote with edge clamping. Ties prefer the previous
/// output label, then the lowest label. Throws EvenWindow for even windows.
std::vector<int> smooth_labels(std::span<const int> labels, int window);

/// Run-length grouping. Runs shorter than min_duration are merged into the
/// neighbour whose centroid is closer (left on ties, or left when no model
/// is given).
std::vector<Segment> group_segments(std::span<const int> labels, Index min_duration = 1,
                                    const ClusterModel* model = nullptr);

SuperMotionSequence encode(const MotionSequence& motion, const ClusterModel& model,
                           const EncodeConfig& config = {});

struct DecodeOptions {
  /// Re-project every joint rotation after decoding (Rot6D only).
  bool reorthonormalize = false;
};

MotionSequence decode(const SuperMotionSequence& sm, const DecodeOptions& options = {});

/// residual[s] = |x_{s+1} - (x_s + v_s d_s)| for s in [0, M-2].
std::vector<double> coherence_residual(const SuperMotionSequence& sm);

struct CompressionReport {
  double ratio = 0.0;
  Index segments = 0;
  Index frames = 0;
  double mean_duration = 0.0;
};

CompressionReport compression_report(const MotionSequence& original, const SuperMotionSequence& sm);

}  // namespace lamof
