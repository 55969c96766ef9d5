#include <gtest/gtest.h>

#include <fstream>

#include "lamof/corpus.hpp"
#include "lamof/error.hpp"
#include "lamof/io.hpp"
#include "fixtures.hpp"

using namespace lamof;
namespace lt = lamof::testing;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> dir_listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  if (dir_listing(a) != dir_listing(b)) return false;
  for (const auto& name : dir_listing(a)) {
    if (io::read_file(a / name) != io::read_file(b / name)) return false;
  }
  return true;
}

}  // namespace

TEST(ClipManifest, LoadsPromptsAndResolvesPaths) {
  lt::TempDir dir("manifest");
  std::ofstream(dir / "m.jsonl") << R"({"id": "a", "path": "x.lmf", "prompt": "a man runs"})" << "\n\n"
                                 << R"({"id": "b", "path": "/abs/y.lmf", "prompts": ["p", "q"]})" << "\n";
  const auto records = load_clip_manifest(dir / "m.jsonl");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].path, dir / "x.lmf");
  EXPECT_EQ(records[0].prompts, std::vector<std::string>{"a man runs"});
  EXPECT_EQ(records[1].path, fs::path("/abs/y.lmf"));
  EXPECT_EQ(records[1].prompts.size(), 2u);
}

TEST(ClipManifest, MalformedLine) {
  lt::TempDir dir("manifest_bad");
  std::ofstream(dir / "m.jsonl") << R"({"id": "a"})" << "\n";
  try {
    load_clip_manifest(dir / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(e.context().find(":1"), std::string::npos);
  }
}

TEST(Corpus, SampleUsesDistinctClipsAndLengthLaw) {
  lt::TempDir dir("corpus_sample");
  Rng rng(141);
  std::vector<Index> lengths;
  const auto manifest = lt::write_clip_library(dir.path(), rng, 14, 40, 90, 2, &lengths);
  std::vector<SourceClip> pool;
  for (const auto& rec : load_clip_manifest(manifest)) pool.push_back({rec.id, io::load_motion(rec.path), rec.prompts});

  CorpusConfig config;
  config.stitch.seed = 5;
  for (Index i = 0; i < 5; ++i) {
    const CorpusSample s = build_corpus_sample(pool, i, config);
    ASSERT_EQ(s.clip_ids.size(), 10u);
    std::vector<std::string> ids = s.clip_ids;
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
    Index sum = 0;
    for (const auto& id : s.clip_ids) sum += lengths[static_cast<std::size_t>(std::stoi(id.substr(1)))];
    EXPECT_EQ(s.total_frames, sum - 9 * 20);
    EXPECT_EQ(s.motion->frame_count(), s.total_frames);
    EXPECT_EQ(s.prompts.size(), 3u);
    for (const auto& p : s.prompts) EXPECT_EQ(p.rfind("The person ", 0), 0u);
    EXPECT_EQ(s.seed, derive_seed(5, static_cast<std::uint64_t>(i)));
  }
}

TEST(Corpus, OutputIndependentOfWorkerCount) {
  lt::TempDir dir("corpus_workers");
  Rng rng(142);
  const auto manifest = lt::write_clip_library(dir.path(), rng, 12, 40, 80, 2);
  const auto records = load_clip_manifest(manifest);
  CorpusConfig config;
  config.sample_count = 6;
  config.stitch.seed = 77;
  build_corpus(records, config, dir / "one");
  config.workers = 4;
  build_corpus(records, config, dir / "four");
  EXPECT_TRUE(same_tree(dir / "one", dir / "four"));
  EXPECT_EQ(dir_listing(dir / "one").size(), 7u);
}

TEST(Corpus, ManifestRecords) {
  lt::TempDir dir("corpus_manifest");
  Rng rng(143);
  const auto manifest = lt::write_clip_library(dir.path(), rng, 10, 40, 60, 1);
  CorpusConfig config;
  config.sample_count = 2;
  const auto samples = build_corpus(load_clip_manifest(manifest), config, dir / "out");
  std::ifstream in(dir / "out" / "manifest.jsonl");
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["id"], samples[static_cast<std::size_t>(count)].id);
    for (const char* key : {"id", "clip_ids", "seed", "total_frames", "prompt", "prompts"}) EXPECT_TRUE(j.contains(key));
    EXPECT_EQ(j["prompt"], j["prompts"][0]);
    const MotionSequence m = io::load_motion(dir / "out" / (j["id"].get<std::string>() + ".lmf"));
    EXPECT_EQ(m.frame_count(), j["total_frames"].get<Index>());
    ++count;
  }
  EXPECT_EQ(count, 2);
}

TEST(Corpus, TooFewEligibleClipsWritesNothing) {
  lt::TempDir dir("corpus_few");
  Rng rng(144);
  // only clips shorter than the default 40-frame minimum
  const auto manifest = lt::write_clip_library(dir.path(), rng, 12, 25, 39, 1);
  try {
    build_corpus(load_clip_manifest(manifest), CorpusConfig{}, dir / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadClipLength);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}
