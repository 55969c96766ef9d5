#include "lamof/stitch.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "lamof/error.hpp"

namespace lamof {

namespace {

void require_stitchable(const MotionSequence& a, const MotionSequence& b) {
  if (a.representation() != Representation::Rot6D || b.representation() != Representation::Rot6D) {
    throw Error(ErrorCode::RepresentationMismatch, "stitching needs Rot6D clips with root translation");
  }
  if (a.joint_count() != b.joint_count()) {
    throw Error(ErrorCode::RepresentationMismatch, "clips have different joint counts");
  }
  if (a.fps() != b.fps()) throw Error(ErrorCode::RepresentationMismatch, "clips have different frame rates");
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\''; }

bool starts_with_word(std::string_view text, std::string_view word) {
  if (text.size() < word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != word[i]) return false;
  }
  return text.size() == word.size() || !is_word_char(text[word.size()]);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

MotionSequence stitch(const MotionSequence& a, const MotionSequence& b, Index transition) {
  require_stitchable(a, b);
  if (transition < 1) throw Error(ErrorCode::InvalidArgument, "transition must be at least one frame");
  const Index l1 = a.frame_count();
  const Index l2 = b.frame_count();
  if (std::min(l1, l2) <= transition) {
    throw Error(ErrorCode::TooShortForTransition,
                "clips of " + std::to_string(l1) + " and " + std::to_string(l2) +
                    " frames cannot take a " + std::to_string(transition) + "-frame transition");
  }

  const Index m = transition;
  const Index len = l1 + l2 - m;
  const Index rot = 6 * a.joint_count();
  const auto& fa = a.frames();
  const auto& fb = b.frames();
  const double md = static_cast<double>(m);

  FrameMatrix out(len, a.feature_dim());

  const Index overlap = l1 - m;
  out.topLeftCorner(overlap, rot) = fa.topLeftCorner(overlap, rot);
  for (Index j = 0; j < m; ++j) {
    const double fade_in = static_cast<double>(j) / md;
    const double fade_out = static_cast<double>(m - j) / md;
    out.row(overlap + j).head(rot) = fade_out * fa.row(overlap + j).head(rot) + fade_in * fb.row(j).head(rot);
    project_rotations(out.row(overlap + j), a.joint_count());
  }
  out.bottomLeftCorner(l2 - m, rot) = fb.bottomLeftCorner(l2 - m, rot);

  auto translation = [rot](const FrameMatrix& f, Index t) { return f.row(t).segment<3>(rot); };
  out.row(0).segment<3>(rot) = translation(fa, 0);
  for (Index k = 0; k + 1 < len; ++k) {
    Eigen::RowVector3d step;
    if (k < overlap) {
      step = translation(fa, k + 1) - translation(fa, k);
    } else if (k < l1 - 1) {
      const Index j = k - overlap;
      const double fade_in = static_cast<double>(j) / md;
      const double fade_out = static_cast<double>(m - j) / md;
      step = fade_out * (translation(fa, k + 1) - translation(fa, k)) +
             fade_in * (translation(fb, j + 1) - translation(fb, j));
    } else {
      const Index j = k - overlap;
      step = translation(fb, j + 1) - translation(fb, j);
    }
    out.row(k + 1).segment<3>(rot) = out.row(k).segment<3>(rot) + step;
  }
  return MotionSequence(std::move(out), Representation::Rot6D, a.joint_count(), a.fps());
}

std::string rewrite_subject(std::string_view prompt, SubjectPosition position) {
  const std::string_view text = trim(prompt);
  if (text.empty()) throw Error(ErrorCode::EmptyPrompt, "prompt is empty");

  static constexpr std::array<std::string_view, 7> kSubjects = {
      "a person", "the person", "a woman", "a man", "someone", "she", "he"};
  const std::string_view replacement =
      position == SubjectPosition::First ? "The person" : "And then this person";

  for (std::string_view subject : kSubjects) {
    if (starts_with_word(text, subject)) {
      return std::string(replacement) + std::string(text.substr(subject.size()));
    }
  }
  return std::string(replacement) + " " + std::string(text);
}

std::string compose_prompt(std::span<const std::string> prompts) {
  std::string out;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    std::string sentence =
        rewrite_subject(prompts[i], i == 0 ? SubjectPosition::First : SubjectPosition::Subsequent);
    while (!sentence.empty() && (sentence.back() == '.' || std::isspace(static_cast<unsigned char>(sentence.back())))) {
      sentence.pop_back();
    }
    if (i > 0) out += ". ";
    out += sentence;
  }
  if (!out.empty()) out += ".";
  return out;
}

LongSequence build_long_sequence(std::span<const Clip> clips, const StitchConfig& config) {
  if (config.clip_count < 2) throw Error(ErrorCode::InvalidArgument, "clip_count must be at least 2");
  if (static_cast<Index>(clips.size()) != config.clip_count) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(config.clip_count) +
                                                " clips, got " + std::to_string(clips.size()));
  }
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const Index len = clips[i].motion.frame_count();
    if (len < config.min_clip_length || len > config.max_clip_length) {
      throw Error(ErrorCode::BadClipLength,
                  "clip " + std::to_string(i) + " has " + std::to_string(len) + " frames, outside [" +
                      std::to_string(config.min_clip_length) + ", " +
                      std::to_string(config.max_clip_length) + "]");
    }
  }
  std::vector<std::string> prompts;
  prompts.reserve(clips.size());
  for (const auto& c : clips) prompts.push_back(c.prompt);
  std::string prompt = compose_prompt(prompts);

  MotionSequence motion = clips.front().motion;
  for (std::size_t i = 1; i < clips.size(); ++i) {
    motion = stitch(motion, clips[i].motion, config.transition_frames);
  }
  return {std::move(motion), std::move(prompt)};
}

}  // namespace lamof
