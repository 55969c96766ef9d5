#pragma once

#include <cstdint>
#include <vector>

#include "lamof/codec.hpp"
#include "lamof/motion.hpp"

namespace lamof {

/// Copies segment 0 over the last segment (pose, velocity, duration, label).
/// Total frames change by d_0 - d_{M-1}.
SuperMotionSequence loop_close(const SuperMotionSequence& sm);

struct LoopSeamReport {
  double wrap_step = 0.0;          ///< |frame[0] - (frame[N-1] + v_{M-1})|
  double max_internal_step = 0.0;  ///< max_t |frame[t+1] - frame[t]|
  bool seamless = true;            ///< wrap_step <= max_internal_step + 1e-9
};

LoopSeamReport loop_seam_report(const SuperMotionSequence& sm);

struct DurationPlan {
  std::vector<Index> durations;
  Index d_min = 1;
  Index d_max = 1;

  Index total() const;
  Index segment_count() const noexcept { return static_cast<Index>(durations.size()); }
};

enum class DecomposeMode { Even, Seeded };

/// Splits `total` frames into `segments` durations within [d_min, d_max].
/// Even gives the first (total mod M) entries one extra frame; Seeded then
/// applies M seeded +-1 transfers that respect the bounds.
DurationPlan decompose_duration(Index total, Index segments, Index d_min, Index d_max,
                                DecomposeMode mode = DecomposeMode::Even, std::uint64_t seed = 0);

/// Applies new durations while keeping every segment endpoint
/// x_s + v_s d_s fixed: v'_s = v_s d_s / d'_s.
SuperMotionSequence retime_supermotions(const SuperMotionSequence& sm, const DurationPlan& plan);

/// Clips or interpolates decoded motion to the exact music length.
MotionSequence match_music_length(const MotionSequence& motion, Index target_frames);

}  // namespace lamof
