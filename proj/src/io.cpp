#include "lamof/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string_view>

#include <zlib.h>

#include "lamof/error.hpp"

namespace lamof::io {

namespace {

using Magic = std::array<char, 4>;
constexpr Magic kMotionMagic = {'L', 'M', 'F', '1'};
constexpr Magic kSuperMotionMagic = {'L', 'S', 'M', '1'};
constexpr Magic kClusterMagic = {'L', 'C', 'M', '1'};

std::uint32_t checksum(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces
  constexpr std::size_t kPiece = 1u << 30;
  for (std::size_t at = 0; at < bytes.size(); at += kPiece) {
    const std::size_t len = std::min(kPiece, bytes.size() - at);
    crc = crc32(crc, bytes.data() + at, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

class ByteWriter {
 public:
  explicit ByteWriter(const Magic& magic) { buf_.insert(buf_.end(), magic.begin(), magic.end()); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(double v) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw Error(ErrorCode::NonFinite, "value does not fit in an f32 field");
    u32(std::bit_cast<std::uint32_t>(f));
  }
  void count(Index v, const char* what) {
    if (v < 0 || v > static_cast<Index>(UINT32_MAX)) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " does not fit in 32 bits");
    }
    u32(static_cast<std::uint32_t>(v));
  }
  void raw(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

  Bytes finish() {
    const std::uint32_t crc = checksum(std::span(buf_).subspan(4));
    u32(crc);
    return std::move(buf_);
  }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const Magic& magic, std::string_view kind)
      : bytes_(bytes), kind_(kind) {
    const std::size_t have = std::min<std::size_t>(bytes.size(), 4);
    for (std::size_t i = 0; i < have; ++i) {
      if (bytes[i] != static_cast<std::uint8_t>(magic[i])) {
        throw Error(ErrorCode::BadMagic, "not a " + std::string(kind) + " file (bad magic)");
      }
    }
    if (have < 4) throw Error(ErrorCode::TruncatedFile, std::string(kind) + " file ends inside the magic");
    pos_ = 4;
  }

  void version() {
    const std::uint32_t v = u32();
    if (v != kFormatVersion) {
      throw Error(ErrorCode::VersionUnsupported,
                  std::string(kind_) + " version " + std::to_string(v) + " is not supported");
    }
  }

  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) {
      throw Error(ErrorCode::TruncatedFile, std::string(kind_) + " file is truncated");
    }
  }

  /// need(count * item_size + tail) without overflowing.
  void need_items(std::uint64_t count, std::uint64_t item_size, std::uint64_t tail = 0) const {
    const std::uint64_t remaining = bytes_.size() - pos_;
    if (tail > remaining || (item_size != 0 && count > (remaining - tail) / item_size)) {
      throw Error(ErrorCode::TruncatedFile, std::string(kind_) + " file is truncated");
    }
  }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  /// Checks that exactly the CRC trailer remains and that it matches.
  void finish() {
    need(4);
    if (bytes_.size() - pos_ > 4) {
      throw Error(ErrorCode::TrailingData, std::string(kind_) + " file has trailing bytes");
    }
    const std::uint32_t expected = checksum(bytes_.subspan(4, pos_ - 4));
    if (u32() != expected) {
      throw Error(ErrorCode::ChecksumMismatch, std::string(kind_) + " checksum mismatch");
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string_view kind_;
  std::size_t pos_ = 0;
};

Representation representation_from_byte(std::uint8_t b) {
  if (b > static_cast<std::uint8_t>(Representation::Rot6D)) {
    throw Error(ErrorCode::ParseError, "unknown representation tag " + std::to_string(b));
  }
  return static_cast<Representation>(b);
}

std::string extension_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

template <typename F>
auto parse_json_guarded(F&& f, std::string_view what) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace

Bytes encode_motion(const MotionSequence& motion) {
  ByteWriter w(kMotionMagic);
  w.u32(kFormatVersion);
  w.f32(motion.fps());
  w.u8(static_cast<std::uint8_t>(motion.representation()));
  w.count(motion.joint_count(), "joint count");
  w.count(motion.frame_count(), "frame count");
  w.count(motion.feature_dim(), "feature dimension");
  const auto& f = motion.frames();
  for (Index i = 0; i < f.size(); ++i) w.f32(f.data()[i]);
  return w.finish();
}

MotionSequence decode_motion(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, kMotionMagic, "LMF1");
  r.version();
  const double fps = r.f32();
  const std::uint8_t rep = r.u8();
  const std::uint32_t joints = r.u32();
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  r.need_items(n, static_cast<std::uint64_t>(d) * 4, 4);
  FrameMatrix frames(n, d);
  for (Index i = 0; i < frames.size(); ++i) frames.data()[i] = r.f32();
  r.finish();
  return MotionSequence(std::move(frames), representation_from_byte(rep), joints, fps);
}

Bytes encode_supermotion(const SuperMotionSequence& sm) {
  ByteWriter w(kSuperMotionMagic);
  w.u32(kFormatVersion);
  w.f32(sm.fps());
  w.u8(static_cast<std::uint8_t>(sm.representation()));
  w.count(sm.joint_count(), "joint count");
  w.count(sm.feature_dim(), "feature dimension");
  w.count(sm.segment_count(), "segment count");
  w.count(sm.total_frames(), "total frames");
  for (const auto& seg : sm.segments()) {
    w.count(seg.duration, "duration");
    w.u32(static_cast<std::uint32_t>(seg.cluster_label));
    for (Index i = 0; i < seg.start_pose.size(); ++i) w.f32(seg.start_pose[i]);
    for (Index i = 0; i < seg.velocity.size(); ++i) w.f32(seg.velocity[i]);
  }
  const auto& tag = sm.condition_tag();
  w.u8(tag ? 1 : 0);
  if (tag) {
    w.count(static_cast<Index>(tag->size()), "condition tag length");
    w.raw(*tag);
  }
  return w.finish();
}

SuperMotionSequence decode_supermotion(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, kSuperMotionMagic, "LSM1");
  r.version();
  const double fps = r.f32();
  const std::uint8_t rep = r.u8();
  const std::uint32_t joints = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint32_t m = r.u32();
  const std::uint32_t total = r.u32();
  r.need_items(m, 8 + 8 * static_cast<std::uint64_t>(d));

  std::vector<SuperMotion> segments(m);
  for (auto& seg : segments) {
    seg.duration = r.u32();
    seg.cluster_label = static_cast<int>(r.u32());
    seg.start_pose.resize(d);
    seg.velocity.resize(d);
    for (std::uint32_t i = 0; i < d; ++i) seg.start_pose[i] = r.f32();
    for (std::uint32_t i = 0; i < d; ++i) seg.velocity[i] = r.f32();
  }
  std::optional<ConditionTag> tag;
  const std::uint8_t has_tag = r.u8();
  if (has_tag > 1) {
    // still report corruption as a checksum problem when the CRC disagrees
    r.finish();
    throw Error(ErrorCode::ParseError, "invalid condition tag flag");
  }
  if (has_tag == 1) {
    const std::uint32_t len = r.u32();
    const auto raw = r.raw(len);
    tag = ConditionTag(raw.begin(), raw.end());
  }
  r.finish();

  if (m == 0) throw Error(ErrorCode::ParseError, "LSM1 file has no supermotions");
  SuperMotionSequence sm(std::move(segments), representation_from_byte(rep), joints, fps, std::move(tag));
  if (sm.total_frames() != static_cast<Index>(total)) {
    throw Error(ErrorCode::FrameCountMismatch, "recorded total frames " + std::to_string(total) +
                                                   " disagree with durations (" +
                                                   std::to_string(sm.total_frames()) + ")");
  }
  return sm;
}

Bytes encode_cluster_model(const ClusterModel& model) {
  ByteWriter w(kClusterMagic);
  w.u32(kFormatVersion);
  w.count(model.k(), "cluster count");
  w.count(model.feature_dim(), "feature dimension");
  w.u64(model.seed);
  w.count(model.iterations_run, "iteration count");
  w.f32(model.inertia);
  const auto& c = model.centroids;
  for (Index i = 0; i < c.size(); ++i) w.f32(c.data()[i]);
  return w.finish();
}

ClusterModel decode_cluster_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, kClusterMagic, "LCM1");
  r.version();
  const std::uint32_t k = r.u32();
  const std::uint32_t d = r.u32();
  ClusterModel model;
  model.seed = r.u64();
  model.iterations_run = static_cast<int>(r.u32());
  model.inertia = r.f32();
  r.need_items(k, static_cast<std::uint64_t>(d) * 4, 4);
  model.centroids.resize(k, d);
  for (Index i = 0; i < model.centroids.size(); ++i) model.centroids.data()[i] = r.f32();
  r.finish();
  if (k == 0 || d == 0) throw Error(ErrorCode::ParseError, "LCM1 model is empty");
  if (!model.centroids.allFinite()) throw Error(ErrorCode::NonFinite, "LCM1 centroids are not finite");
  return model;
}

nlohmann::json motion_to_json(const MotionSequence& motion) {
  nlohmann::json frames = nlohmann::json::array();
  const auto& f = motion.frames();
  for (Index t = 0; t < f.rows(); ++t) {
    std::vector<double> row(f.row(t).data(), f.row(t).data() + f.cols());
    frames.push_back(std::move(row));
  }
  return {{"format_version", kFormatVersion},
          {"fps", motion.fps()},
          {"representation", std::string(representation_name(motion.representation()))},
          {"joint_count", motion.joint_count()},
          {"frames", std::move(frames)}};
}

MotionSequence motion_from_json(const nlohmann::json& j) {
  return parse_json_guarded(
      [&] {
        const auto version = j.at("format_version").get<std::uint32_t>();
        if (version != kFormatVersion) {
          throw Error(ErrorCode::VersionUnsupported, "motion JSON version " + std::to_string(version));
        }
        const auto& rows = j.at("frames");
        if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "frames must be a non-empty array");
        const auto d = static_cast<Index>(rows.at(0).size());
        FrameMatrix frames(static_cast<Index>(rows.size()), d);
        for (std::size_t t = 0; t < rows.size(); ++t) {
          if (static_cast<Index>(rows[t].size()) != d) {
            throw Error(ErrorCode::DimensionMismatch, "frame " + std::to_string(t) + " has the wrong length");
          }
          for (Index i = 0; i < d; ++i) frames(static_cast<Index>(t), i) = rows[t][static_cast<std::size_t>(i)].get<double>();
        }
        return MotionSequence(std::move(frames),
                              parse_representation(j.at("representation").get<std::string>()),
                              j.at("joint_count").get<Index>(), j.at("fps").get<double>());
      },
      "motion JSON");
}

Skeleton skeleton_from_json(const nlohmann::json& j) {
  return parse_json_guarded(
      [&] {
        auto parents = j.at("parents").get<std::vector<int>>();
        const auto& rows = j.at("offsets");
        PositionMatrix offsets(static_cast<Index>(rows.size()), 3);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const auto v = rows[r].get<std::vector<double>>();
          if (v.size() != 3) throw Error(ErrorCode::InvalidSkeleton, "offsets must be 3-vectors");
          offsets.row(static_cast<Index>(r)) << v[0], v[1], v[2];
        }
        std::vector<int> feet;
        if (j.contains("foot_joints")) feet = j.at("foot_joints").get<std::vector<int>>();
        return Skeleton(std::move(parents), std::move(offsets), std::move(feet));
      },
      "skeleton JSON");
}

nlohmann::json skeleton_to_json(const Skeleton& skeleton) {
  nlohmann::json offsets = nlohmann::json::array();
  for (Index r = 0; r < skeleton.offsets().rows(); ++r) {
    offsets.push_back({skeleton.offsets()(r, 0), skeleton.offsets()(r, 1), skeleton.offsets()(r, 2)});
  }
  return {{"parents", skeleton.parents()}, {"offsets", offsets}, {"foot_joints", skeleton.foot_joints()}};
}

MetricWeights weights_from_json(const nlohmann::json& j) {
  return parse_json_guarded(
      [&] {
        MetricWeights w;
        w.recon = j.value("recon", w.recon);
        w.joint = j.value("joint", w.joint);
        w.vel = j.value("vel", w.vel);
        w.contact = j.value("contact", w.contact);
        w.coherent = j.value("coherent", w.coherent);
        for (double v : {w.recon, w.joint, w.vel, w.contact, w.coherent}) {
          if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "metric weights must be finite and non-negative");
          }
        }
        return w;
      },
      "weights JSON");
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open file", path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "failed reading file", path.string());
  return bytes;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what(), path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create file", tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::IoError, "failed writing file", tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move file into place", path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

template <typename Decode>
auto decode_with_context(const std::filesystem::path& path, Decode&& decode) {
  const Bytes bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path.string());
  }
}

MotionSequence load_motion(const std::filesystem::path& path) {
  if (extension_of(path) == ".json") {
    const nlohmann::json j = read_json(path);
    try {
      return motion_from_json(j);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), path.string());
    }
  }
  return decode_with_context(path, [](const Bytes& b) { return decode_motion(b); });
}

void save_motion(const MotionSequence& motion, const std::filesystem::path& path) {
  if (extension_of(path) == ".json") {
    write_file_atomic(path, motion_to_json(motion).dump() + "\n");
  } else {
    write_file_atomic(path, encode_motion(motion));
  }
}

SuperMotionSequence load_supermotion(const std::filesystem::path& path) {
  return decode_with_context(path, [](const Bytes& b) { return decode_supermotion(b); });
}

void save_supermotion(const SuperMotionSequence& sm, const std::filesystem::path& path) {
  write_file_atomic(path, encode_supermotion(sm));
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
  return decode_with_context(path, [](const Bytes& b) { return decode_cluster_model(b); });
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_cluster_model(model));
}

Skeleton load_skeleton(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  try {
    return skeleton_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path.string());
  }
}

}  // namespace lamof::io
