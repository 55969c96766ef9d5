#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Geometry>

#include "lamof/io.hpp"
#include "lamof/kinematics.hpp"
#include "lamof/motion.hpp"
#include "lamof/random.hpp"
#include "lamof/rotation.hpp"

namespace lamof::testing {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
}

inline double gaussian(Rng& rng) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline FrameMatrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  FrameMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
  return m;
}

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

/// Rot6D frame from per-joint rotations and a root translation.
inline FrameVector rot6d_frame(const std::vector<Eigen::Matrix3d>& rotations, const Eigen::Vector3d& root) {
  const Index j = static_cast<Index>(rotations.size());
  FrameVector f(6 * j + 3);
  for (Index k = 0; k < j; ++k) f.segment<6>(6 * k) = matrix_to_rot6d(rotations[static_cast<std::size_t>(k)]).transpose();
  f.tail<3>() = root.transpose();
  return f;
}

inline FrameVector random_rot6d_frame(Rng& rng, Index joints, double translation_scale = 1.0) {
  std::vector<Eigen::Matrix3d> rotations;
  for (Index k = 0; k < joints; ++k) rotations.push_back(random_rotation(rng));
  const Eigen::Vector3d root(uniform(rng, -translation_scale, translation_scale),
                             uniform(rng, -translation_scale, translation_scale),
                             uniform(rng, -translation_scale, translation_scale));
  return rot6d_frame(rotations, root);
}

/// Smoothly varying Rot6D clip: each joint spins about its own axis and the
/// root walks with small random steps.
inline MotionSequence random_rot6d_clip(Rng& rng, Index frames, Index joints, double fps = 20.0) {
  std::vector<Eigen::Matrix3d> base;
  std::vector<Eigen::Vector3d> axes;
  std::vector<double> rates;
  for (Index k = 0; k < joints; ++k) {
    base.push_back(random_rotation(rng));
    axes.emplace_back(gaussian(rng), gaussian(rng), gaussian(rng));
    rates.push_back(uniform(rng, -0.1, 0.1));
  }
  FrameMatrix m(frames, 6 * joints + 3);
  Eigen::Vector3d root(uniform(rng, -1, 1), uniform(rng, 0, 1), uniform(rng, -1, 1));
  for (Index t = 0; t < frames; ++t) {
    std::vector<Eigen::Matrix3d> rot;
    for (Index k = 0; k < joints; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      rot.push_back(axis_rotation(axes[kk], rates[kk] * static_cast<double>(t)) * base[kk]);
    }
    m.row(t) = rot6d_frame(rot, root);
    root += Eigen::Vector3d(uniform(rng, -0.05, 0.05), uniform(rng, -0.01, 0.01), uniform(rng, -0.05, 0.05));
  }
  return MotionSequence(std::move(m), Representation::Rot6D, joints, fps);
}

inline MotionSequence random_cartesian(Rng& rng, Index frames, Index joints, double scale = 1.0) {
  return MotionSequence(random_matrix(rng, frames, 3 * joints, scale), Representation::Cartesian3D, joints, 30.0);
}

/// Chain or random tree with parent[j] < j, random offsets, last joints as feet.
inline Skeleton random_skeleton(Rng& rng, Index joints, bool chain = false, Index feet = 2) {
  std::vector<int> parents(static_cast<std::size_t>(joints));
  PositionMatrix offsets(joints, 3);
  parents[0] = -1;
  offsets.row(0).setZero();
  for (Index j = 1; j < joints; ++j) {
    parents[static_cast<std::size_t>(j)] = chain ? static_cast<int>(j - 1) : static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(j)));
    offsets.row(j) << uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5);
  }
  std::vector<int> foot_joints;
  for (Index f = std::max<Index>(1, joints - feet); f < joints; ++f) foot_joints.push_back(static_cast<int>(f));
  return Skeleton(std::move(parents), std::move(offsets), std::move(foot_joints));
}

/// One constant-velocity phase of a piecewise-linear motion.
struct Phase {
  FrameVector velocity;
  Index length;
};

/// frames[t+1] = frames[t] + velocity of the phase that owns frame t. The
/// final phase owns one frame fewer in steps, so every phase spans exactly
/// `length` frames.
inline MotionSequence piecewise_motion(const FrameVector& start, const std::vector<Phase>& phases, Index joints,
                                       Representation rep = Representation::Cartesian3D) {
  Index n = 0;
  for (const auto& p : phases) n += p.length;
  FrameMatrix m(n, start.size());
  m.row(0) = start;
  Index t = 0;
  for (const auto& p : phases) {
    for (Index o = 0; o < p.length; ++o, ++t) {
      if (t + 1 < n) m.row(t + 1) = m.row(t) + p.velocity;
    }
  }
  return MotionSequence(std::move(m), rep, joints, 30.0);
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(::getpid()));
    path_ = std::filesystem::temp_directory_path() / ("lamof_" + tag + "_" + std::to_string(rng.next() % 1000000007ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Writes `count` random Rot6D clips plus a JSONL manifest into dir.
/// Returns the manifest path; lengths[i] is the frame count of clip i.
inline std::filesystem::path write_clip_library(const std::filesystem::path& dir, Rng& rng, int count, Index min_len,
                                                Index max_len, Index joints, std::vector<Index>* lengths = nullptr) {
  static const char* kPrompts[] = {"a person walks forward", "someone jumps twice", "the person waves both arms",
                                   "a man turns around", "she kicks with the left leg", "arms swing wildly"};
  std::string manifest;
  for (int i = 0; i < count; ++i) {
    const Index len = uniform_int(rng, min_len, max_len);
    if (lengths != nullptr) lengths->push_back(len);
    const std::string name = "clip_" + std::to_string(i) + ".lmf";
    MotionSequence clip = random_rot6d_clip(rng, len, joints);
    // round through f32 so the file holds exactly what the tests compare against
    FrameMatrix f = clip.frames().cast<float>().cast<double>();
    io::save_motion(MotionSequence(f, Representation::Rot6D, joints, clip.fps()), dir / name);
    nlohmann::json rec;
    rec["id"] = "c" + std::to_string(i);
    rec["path"] = name;
    rec["prompts"] = {kPrompts[i % 6], kPrompts[(i + 1) % 6], kPrompts[(i + 3) % 6]};
    manifest += rec.dump() + "\n";
  }
  const auto path = dir / "clips.jsonl";
  io::write_file_atomic(path, manifest);
  return path;
}

}  // namespace lamof::testing
