#include "lamof/corpus.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "lamof/error.hpp"
#include "lamof/io.hpp"
#include "lamof/random.hpp"

namespace lamof {

namespace {

std::string sample_name(Index index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%06lld", static_cast<long long>(index));
  return buf;
}

}  // namespace

std::vector<ClipRecord> load_clip_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::IoError, "cannot open clip manifest", manifest.string());
  const std::filesystem::path base = manifest.parent_path();

  std::vector<ClipRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ClipRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.path = j.at("path").get<std::string>();
      if (rec.path.is_relative()) rec.path = base / rec.path;
      if (j.contains("prompts")) {
        rec.prompts = j.at("prompts").get<std::vector<std::string>>();
      } else {
        rec.prompts.push_back(j.at("prompt").get<std::string>());
      }
      if (rec.prompts.empty()) throw Error(ErrorCode::EmptyPrompt, "clip has no prompts", where);
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad manifest line: ") + e.what(), where);
    }
  }
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "clip manifest is empty", manifest.string());
  return records;
}

nlohmann::ordered_json sample_record(const CorpusSample& sample) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["clip_ids"] = sample.clip_ids;
  j["seed"] = sample.seed;
  j["total_frames"] = sample.total_frames;
  j["prompt"] = sample.prompts.empty() ? std::string() : sample.prompts.front();
  j["prompts"] = sample.prompts;
  return j;
}

CorpusSample build_corpus_sample(std::span<const SourceClip> pool, Index index, const CorpusConfig& config) {
  const Index count = config.stitch.clip_count;
  if (static_cast<Index>(pool.size()) < count) {
    throw Error(ErrorCode::InvalidArgument, "need at least " + std::to_string(count) +
                                                " eligible clips, have " + std::to_string(pool.size()));
  }
  CorpusSample sample;
  sample.id = sample_name(index);
  sample.seed = derive_seed(config.stitch.seed, static_cast<std::uint64_t>(index));
  Rng rng(sample.seed);

  // partial Fisher-Yates over pool indices: sampling without replacement
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (Index i = 0; i < count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const auto j = iu + static_cast<std::size_t>(rng.uniform_index(order.size() - iu));
    std::swap(order[iu], order[j]);
  }
  order.resize(static_cast<std::size_t>(count));

  std::vector<Clip> clips;
  clips.reserve(order.size());
  for (std::size_t idx : order) {
    clips.push_back({pool[idx].motion, pool[idx].prompts.front()});
    sample.clip_ids.push_back(pool[idx].id);
  }
  const LongSequence long_seq = build_long_sequence(clips, config.stitch);

  for (Index p = 0; p < config.prompts_per_sample; ++p) {
    std::vector<std::string> chosen;
    chosen.reserve(order.size());
    for (std::size_t idx : order) {
      const auto& options = pool[idx].prompts;
      chosen.push_back(options[static_cast<std::size_t>(rng.uniform_index(options.size()))]);
    }
    sample.prompts.push_back(compose_prompt(chosen));
  }
  sample.total_frames = long_seq.motion.frame_count();
  sample.motion = long_seq.motion;
  return sample;
}

std::vector<CorpusSample> build_corpus(const std::vector<ClipRecord>& records, const CorpusConfig& config,
                                       const std::filesystem::path& out_dir) {
  if (config.sample_count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  if (config.prompts_per_sample < 1) {
    throw Error(ErrorCode::InvalidArgument, "prompts per sample must be positive");
  }
  if (config.stitch.clip_count < 2) throw Error(ErrorCode::InvalidArgument, "clip_count must be at least 2");
  if (config.stitch.transition_frames >= config.stitch.min_clip_length) {
    throw Error(ErrorCode::TooShortForTransition, "transition must be shorter than the minimum clip length");
  }

  std::vector<SourceClip> pool;
  for (const auto& rec : records) {
    MotionSequence motion = io::load_motion(rec.path);
    if (motion.representation() != Representation::Rot6D) {
      throw Error(ErrorCode::RepresentationMismatch, "corpus clips must be Rot6D", rec.path.string());
    }
    if (!pool.empty() && (pool.front().motion.joint_count() != motion.joint_count() ||
                          pool.front().motion.fps() != motion.fps())) {
      throw Error(ErrorCode::RepresentationMismatch, "clips disagree on skeleton or frame rate",
                  rec.path.string());
    }
    const Index len = motion.frame_count();
    if (len < config.stitch.min_clip_length || len > config.stitch.max_clip_length) continue;
    pool.push_back({rec.id, std::move(motion), rec.prompts});
  }
  if (static_cast<Index>(pool.size()) < config.stitch.clip_count) {
    throw Error(ErrorCode::BadClipLength,
                "only " + std::to_string(pool.size()) + " clips fall inside the length bounds");
  }

  std::filesystem::create_directories(out_dir);
  std::vector<CorpusSample> samples(static_cast<std::size_t>(config.sample_count));
  std::atomic<Index> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (Index i = next++; i < config.sample_count; i = next++) {
      try {
        CorpusSample s = build_corpus_sample(pool, i, config);
        io::save_motion(*s.motion, out_dir / (s.id + ".lmf"));
        s.motion.reset();
        samples[static_cast<std::size_t>(i)] = std::move(s);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
        next = config.sample_count;
      }
    }
  };
  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool_threads;
    for (unsigned w = 0; w < workers; ++w) pool_threads.emplace_back(worker);
    for (auto& t : pool_threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::string manifest;
  for (const auto& s : samples) manifest += sample_record(s).dump() + "\n";
  io::write_file_atomic(out_dir / "manifest.jsonl", manifest);
  return samples;
}

}  // namespace lamof
