#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lamof/stitch.hpp"

namespace lamof {

/// One line of the input clip manifest:
///   {"id": "...", "path": "clip.lmf", "prompts": ["...", ...]}
/// A single "prompt" string is accepted in place of "prompts". Relative
/// paths resolve against the manifest's directory.
struct ClipRecord {
  std::string id;
  std::filesystem::path path;
  std::vector<std::string> prompts;
};

struct CorpusConfig {
  Index sample_count = 1;
  StitchConfig stitch;
  Index prompts_per_sample = 3;
  unsigned workers = 1;
};

/// A loaded clip with every text description it carries.
struct SourceClip {
  std::string id;
  MotionSequence motion;
  std::vector<std::string> prompts;
};

struct CorpusSample {
  std::string id;
  std::vector<std::string> clip_ids;
  std::uint64_t seed = 0;
  Index total_frames = 0;
  std::vector<std::string> prompts;
  std::optional<MotionSequence> motion;
};

std::vector<ClipRecord> load_clip_manifest(const std::filesystem::path& manifest);

/// Output manifest record, keys in the order id, clip_ids, seed,
/// total_frames, prompt, prompts.
nlohmann::ordered_json sample_record(const CorpusSample& sample);

/// Builds sample i from its own seed derive_seed(config.stitch.seed, i):
/// clip_count distinct clips, stitched in draw order, with
/// prompts_per_sample composed prompts. Clips outside the length bounds
/// are never drawn.
CorpusSample build_corpus_sample(std::span<const SourceClip> pool, Index index,
                                 const CorpusConfig& config);

/// Loads and validates every clip, then writes sample_XXXXXX.lmf files and
/// manifest.jsonl into out_dir. Output bytes do not depend on the worker
/// count. Returns the samples in order, without their motions.
std::vector<CorpusSample> build_corpus(const std::vector<ClipRecord>& records, const CorpusConfig& config,
                                       const std::filesystem::path& out_dir);

}  // namespace lamof
