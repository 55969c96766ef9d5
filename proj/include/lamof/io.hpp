#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lamof/clustering.hpp"
#include "lamof/codec.hpp"
#include "lamof/kinematics.hpp"
#include "lamof/metrics.hpp"
#include "lamof/motion.hpp"

namespace lamof::io {

// Binary layouts (little-endian, f32 values, CRC-32 trailer over every byte
// between the magic and the trailer):
//
//   LMF1  u32 version, f32 fps, u8 representation, u32 J, u32 N, u32 D,
//         N*D f32 frames (row-major)
//   LSM1  u32 version, f32 fps, u8 representation, u32 J, u32 D, u32 M,
//         u32 total_frames, M * {u32 duration, u32 label, D f32 start,
//         D f32 velocity}, u8 has_tag, [u32 tag_len, tag bytes]
//   LCM1  u32 version, u32 K, u32 D, u64 seed, u32 iterations, f32 inertia,
//         K*D f32 centroids

inline constexpr std::uint32_t kFormatVersion = 1;

using Bytes = std::vector<std::uint8_t>;

Bytes encode_motion(const MotionSequence& motion);
MotionSequence decode_motion(std::span<const std::uint8_t> bytes);

Bytes encode_supermotion(const SuperMotionSequence& sm);
SuperMotionSequence decode_supermotion(std::span<const std::uint8_t> bytes);

Bytes encode_cluster_model(const ClusterModel& model);
ClusterModel decode_cluster_model(std::span<const std::uint8_t> bytes);

nlohmann::json motion_to_json(const MotionSequence& motion);
MotionSequence motion_from_json(const nlohmann::json& j);

Skeleton skeleton_from_json(const nlohmann::json& j);
nlohmann::json skeleton_to_json(const Skeleton& skeleton);
MetricWeights weights_from_json(const nlohmann::json& j);

Bytes read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Format follows the extension: ".json" is JSON, anything else LMF1.
MotionSequence load_motion(const std::filesystem::path& path);
void save_motion(const MotionSequence& motion, const std::filesystem::path& path);

SuperMotionSequence load_supermotion(const std::filesystem::path& path);
void save_supermotion(const SuperMotionSequence& sm, const std::filesystem::path& path);

ClusterModel load_cluster_model(const std::filesystem::path& path);
void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);

Skeleton load_skeleton(const std::filesystem::path& path);

}  // namespace lamof::io
