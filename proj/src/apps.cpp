#include "lamof/apps.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lamof/error.hpp"
#include "lamof/random.hpp"

namespace lamof {

SuperMotionSequence loop_close(const SuperMotionSequence& sm) {
  if (sm.segment_count() < 2) {
    throw Error(ErrorCode::SingleSegment, "loop closure needs at least two supermotions");
  }
  std::vector<SuperMotion> segments = sm.segments();
  segments.back() = segments.front();
  return SuperMotionSequence(std::move(segments), sm.representation(), sm.joint_count(), sm.fps(),
                             sm.condition_tag());
}

LoopSeamReport loop_seam_report(const SuperMotionSequence& sm) {
  const MotionSequence decoded = decode(sm);
  const auto& f = decoded.frames();
  const Index n = f.rows();

  LoopSeamReport report;
  report.wrap_step = (f.row(0) - (f.row(n - 1) + sm.segments().back().velocity)).norm();
  for (Index t = 0; t + 1 < n; ++t) {
    report.max_internal_step = std::max(report.max_internal_step, (f.row(t + 1) - f.row(t)).norm());
  }
  report.seamless = report.wrap_step <= report.max_internal_step + 1e-9;
  return report;
}

Index DurationPlan::total() const { return std::accumulate(durations.begin(), durations.end(), Index{0}); }

DurationPlan decompose_duration(Index total, Index segments, Index d_min, Index d_max, DecomposeMode mode,
                                std::uint64_t seed) {
  if (segments < 1) throw Error(ErrorCode::InvalidArgument, "segment count must be at least 1");
  if (d_min < 1 || d_min > d_max) {
    throw Error(ErrorCode::InvalidArgument, "duration bounds must satisfy 1 <= d_min <= d_max");
  }
  if (segments * d_min > total || segments * d_max < total) {
    throw Error(ErrorCode::Infeasible,
                "cannot split " + std::to_string(total) + " frames into " + std::to_string(segments) +
                    " durations within [" + std::to_string(d_min) + ", " + std::to_string(d_max) + "]");
  }

  DurationPlan plan;
  plan.d_min = d_min;
  plan.d_max = d_max;
  const Index base = total / segments;
  const Index extra = total % segments;
  plan.durations.assign(static_cast<std::size_t>(segments), base);
  for (Index i = 0; i < extra; ++i) ++plan.durations[static_cast<std::size_t>(i)];

  if (mode == DecomposeMode::Seeded && segments > 1) {
    Rng rng(seed);
    const auto m = static_cast<std::uint64_t>(segments);
    for (Index step = 0; step < segments; ++step) {
      const auto from = static_cast<std::size_t>(rng.uniform_index(m));
      auto to = static_cast<std::size_t>(rng.uniform_index(m - 1));
      if (to >= from) ++to;
      if (plan.durations[from] - 1 >= d_min && plan.durations[to] + 1 <= d_max) {
        --plan.durations[from];
        ++plan.durations[to];
      }
    }
  }
  return plan;
}

SuperMotionSequence retime_supermotions(const SuperMotionSequence& sm, const DurationPlan& plan) {
  if (plan.segment_count() != sm.segment_count()) {
    throw Error(ErrorCode::LengthMismatch,
                "plan has " + std::to_string(plan.segment_count()) + " durations for " +
                    std::to_string(sm.segment_count()) + " supermotions");
  }
  std::vector<SuperMotion> segments = sm.segments();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const Index d_new = plan.durations[s];
    if (d_new < plan.d_min || d_new > plan.d_max || d_new < 1) {
      throw Error(ErrorCode::Infeasible, "plan duration " + std::to_string(d_new) + " violates its bounds");
    }
    auto& seg = segments[s];
    if (d_new != seg.duration) {
      seg.velocity *= static_cast<double>(seg.duration) / static_cast<double>(d_new);
      seg.duration = d_new;
    }
  }
  return SuperMotionSequence(std::move(segments), sm.representation(), sm.joint_count(), sm.fps(),
                             sm.condition_tag());
}

MotionSequence match_music_length(const MotionSequence& motion, Index target_frames) {
  return resample_to_length(motion, target_frames);
}

}  // namespace lamof
