#include "lamof/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lamof/error.hpp"

namespace lamof {

SuperMotionSequence::SuperMotionSequence(std::vector<SuperMotion> segments, Representation rep,
                                         Index joint_count, double fps,
                                         std::optional<ConditionTag> condition_tag)
    : segments_(std::move(segments)),
      rep_(rep),
      joint_count_(joint_count),
      fps_(fps),
      condition_tag_(std::move(condition_tag)) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "supermotion sequence is empty");
  if (joint_count_ < 1) throw Error(ErrorCode::InvalidArgument, "joint count must be positive");
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    throw Error(ErrorCode::InvalidArgument, "fps must be positive and finite");
  }
  const Index d = lamof::feature_dim(rep_, joint_count_);
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& sm = segments_[s];
    if (sm.start_pose.size() != d || sm.velocity.size() != d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "segment " + std::to_string(s) + " has the wrong feature dimension");
    }
    if (sm.duration < 1) {
      throw Error(ErrorCode::InvalidArgument, "segment " + std::to_string(s) + " has duration < 1");
    }
    if (!sm.start_pose.allFinite() || !sm.velocity.allFinite()) {
      throw Error(ErrorCode::NonFinite, "segment " + std::to_string(s) + " has non-finite values");
    }
    total_frames_ += sm.duration;
  }
}

std::vector<Index> SuperMotionSequence::start_times() const {
  std::vector<Index> starts(segments_.size());
  Index t = 0;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    starts[s] = t;
    t += segments_[s].duration;
  }
  return starts;
}

std::vector<int> smooth_labels(std::span<const int> labels, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "smoothing window must be positive");
  if (window % 2 == 0) {
    throw Error(ErrorCode::EvenWindow, "smoothing window must be odd, got " + std::to_string(window));
  }
  const auto n = static_cast<Index>(labels.size());
  std::vector<int> out(labels.size());
  if (window == 1) {
    std::copy(labels.begin(), labels.end(), out.begin());
    return out;
  }
  const Index half = window / 2;
  std::vector<std::pair<int, int>> votes;
  for (Index t = 0; t < n; ++t) {
    votes.clear();
    for (Index o = -half; o <= half; ++o) {
      const Index idx = std::clamp<Index>(t + o, 0, n - 1);
      const int l = labels[static_cast<std::size_t>(idx)];
      auto it = std::find_if(votes.begin(), votes.end(), [l](const auto& v) { return v.first == l; });
      if (it == votes.end()) {
        votes.emplace_back(l, 1);
      } else {
        ++it->second;
      }
    }
    int best_count = 0;
    for (const auto& v : votes) best_count = std::max(best_count, v.second);

    int winner = std::numeric_limits<int>::max();
    bool prev_tied = false;
    for (const auto& v : votes) {
      if (v.second != best_count) continue;
      winner = std::min(winner, v.first);
      prev_tied = prev_tied || (t > 0 && v.first == out[static_cast<std::size_t>(t - 1)]);
    }
    out[static_cast<std::size_t>(t)] = prev_tied ? out[static_cast<std::size_t>(t - 1)] : winner;
  }
  return out;
}

std::vector<Segment> group_segments(std::span<const int> labels, Index min_duration,
                                    const ClusterModel* model) {
  if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "cannot group an empty label list");
  if (min_duration < 1) throw Error(ErrorCode::InvalidArgument, "min_duration must be at least 1");

  std::vector<Segment> runs;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!runs.empty() && runs.back().label == labels[t]) {
      ++runs.back().duration;
    } else {
      runs.push_back({labels[t], static_cast<Index>(t), 1});
    }
  }
  if (min_duration == 1) return runs;

  auto centroid_distance = [&](int a, int b) {
    if (a < 0 || b < 0 || a >= model->k() || b >= model->k()) {
      throw Error(ErrorCode::InvalidArgument, "label outside the cluster model");
    }
    return squared_distance(model->centroids.row(a), model->centroids.row(b));
  };

  while (runs.size() > 1) {
    const auto short_it = std::find_if(runs.begin(), runs.end(),
                                       [&](const Segment& s) { return s.duration < min_duration; });
    if (short_it == runs.end()) break;
    const auto i = static_cast<std::size_t>(short_it - runs.begin());

    bool to_left;
    if (i == 0) {
      to_left = false;
    } else if (i + 1 == runs.size()) {
      to_left = true;
    } else if (model == nullptr) {
      to_left = true;
    } else {
      to_left = centroid_distance(runs[i].label, runs[i - 1].label) <=
                centroid_distance(runs[i].label, runs[i + 1].label);
    }

    if (to_left) {
      runs[i - 1].duration += runs[i].duration;
    } else {
      runs[i + 1].start = runs[i].start;
      runs[i + 1].duration += runs[i].duration;
    }
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));

    // the absorbed run may leave two equal labels adjacent
    const std::size_t left = to_left ? i - 1 : (i == 0 ? 0 : i - 1);
    if (left + 1 < runs.size() && runs[left].label == runs[left + 1].label) {
      runs[left].duration += runs[left + 1].duration;
      runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(left + 1));
    }
  }
  return runs;
}

SuperMotionSequence encode(const MotionSequence& motion, const ClusterModel& model,
                           const EncodeConfig& config) {
  if (model.feature_dim() != motion.feature_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "model dimension " + std::to_string(model.feature_dim()) +
                    " does not match motion dimension " + std::to_string(motion.feature_dim()));
  }
  const VelocityField field = compute_velocity_field(motion);
  const std::vector<int> labels = smooth_labels(assign_labels(field, model), config.smooth_window);
  const std::vector<Segment> runs = group_segments(labels, config.min_duration, &model);

  const auto& frames = motion.frames();
  const Index n = motion.frame_count();
  const Index d = motion.feature_dim();
  std::vector<SuperMotion> segments;
  segments.reserve(runs.size());
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const Segment& run = runs[s];
    SuperMotion sm;
    sm.start_pose = frames.row(run.start);
    sm.duration = run.duration;
    sm.cluster_label = run.label;
    if (config.velocity_mode == VelocityMode::Secant) {
      if (s + 1 < runs.size()) {
        sm.velocity = (frames.row(runs[s + 1].start) - sm.start_pose) / static_cast<double>(run.duration);
      } else if (run.duration > 1) {
        sm.velocity = (frames.row(n - 1) - sm.start_pose) / static_cast<double>(run.duration - 1);
      } else {
        sm.velocity = FrameVector::Zero(d);
      }
    } else {
      sm.velocity = field.velocities.middleRows(run.start, run.duration).colwise().mean();
    }
    segments.push_back(std::move(sm));
  }
  return SuperMotionSequence(std::move(segments), motion.representation(), motion.joint_count(),
                             motion.fps());
}

MotionSequence decode(const SuperMotionSequence& sm, const DecodeOptions& options) {
  FrameMatrix frames(sm.total_frames(), sm.feature_dim());
  Index t = 0;
  for (const auto& seg : sm.segments()) {
    for (Index o = 0; o < seg.duration; ++o, ++t) {
      frames.row(t) = seg.start_pose + static_cast<double>(o) * seg.velocity;
    }
  }
  if (options.reorthonormalize && sm.representation() == Representation::Rot6D) {
    for (Index r = 0; r < frames.rows(); ++r) project_rotations(frames.row(r), sm.joint_count());
  }
  return MotionSequence(std::move(frames), sm.representation(), sm.joint_count(), sm.fps());
}

std::vector<double> coherence_residual(const SuperMotionSequence& sm) {
  if (sm.segment_count() < 2) {
    throw Error(ErrorCode::SingleSegment, "coherence needs at least two supermotions");
  }
  std::vector<double> residual(static_cast<std::size_t>(sm.segment_count() - 1));
  for (Index s = 0; s + 1 < sm.segment_count(); ++s) {
    const auto& cur = sm.segment(s);
    const FrameVector predicted = cur.start_pose + static_cast<double>(cur.duration) * cur.velocity;
    residual[static_cast<std::size_t>(s)] = (sm.segment(s + 1).start_pose - predicted).norm();
  }
  return residual;
}

CompressionReport compression_report(const MotionSequence& original, const SuperMotionSequence& sm) {
  if (sm.total_frames() != original.frame_count()) {
    throw Error(ErrorCode::FrameCountMismatch,
                "supermotions cover " + std::to_string(sm.total_frames()) + " frames, original has " +
                    std::to_string(original.frame_count()));
  }
  CompressionReport report;
  report.frames = original.frame_count();
  report.segments = sm.segment_count();
  report.ratio = static_cast<double>(report.frames) / static_cast<double>(report.segments);
  report.mean_duration = report.ratio;
  return report;
}

}  // namespace lamof
