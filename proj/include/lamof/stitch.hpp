#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lamof/motion.hpp"

namespace lamof {

inline constexpr Index kDefaultTransitionFrames = 20;
inline constexpr Index kDefaultClipsPerSample = 10;

struct Clip {
  MotionSequence motion;  ///< Rot6D with root translation
  std::string prompt;
};

struct StitchConfig {
  Index transition_frames = kDefaultTransitionFrames;
  Index clip_count = kDefaultClipsPerSample;
  std::uint64_t seed = 0;
  Index min_clip_length = 40;
  Index max_clip_length = 200;
};

/// Crossfade stitch of two Rot6D clips over `transition` frames. The output
/// has L1 + L2 - transition frames: a's head, a blended overlap of a's last
/// and b's first `transition` frames (fade-out j/M weights, re-projected per
/// joint), then b from frame `transition` on. Root translation starts at
/// a's first frame and integrates the input steps, with the overlap steps
/// blended by the same weights.
MotionSequence stitch(const MotionSequence& a, const MotionSequence& b, Index transition);

enum class SubjectPosition { First, Subsequent };

/// Rewrites a leading subject phrase ("a person", "someone", "she", ...) to
/// "The person" or "And then this person"; prefixes when nothing matches.
std::string rewrite_subject(std::string_view prompt, SubjectPosition position);

/// Rewrites each prompt's subject and joins them into one paragraph.
std::string compose_prompt(std::span<const std::string> prompts);

struct LongSequence {
  MotionSequence motion;
  std::string prompt;
};

/// Left fold of stitch over clip_count clips plus prompt composition.
LongSequence build_long_sequence(std::span<const Clip> clips, const StitchConfig& config);

}  // namespace lamof
