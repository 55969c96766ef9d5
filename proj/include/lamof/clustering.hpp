#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lamof/motion.hpp"

namespace lamof {

inline constexpr Index kDefaultClusterCount = 1000;
inline constexpr Index kAblationClusterCount = 2000;

struct KMeansConfig {
  std::uint64_t seed = 0;
  /// A batch at least as large as the sample set turns each iteration into
  /// an exact Lloyd step.
  Index batch_size = 1024;
  int max_iters = 100;
  /// Stop once the largest squared centroid shift in an iteration is <= tol.
  double tol = 1e-6;
};

/// K centroids over flattened per-frame velocity vectors.
struct ClusterModel {
  FrameMatrix centroids;
  std::uint64_t seed = 0;
  double inertia = 0.0;
  int iterations_run = 0;

  Index k() const noexcept { return centroids.rows(); }
  Index feature_dim() const noexcept { return centroids.cols(); }
};

/// Squared Euclidean distance accumulated left to right. This is the
/// reference metric for every assignment decision.
double squared_distance(Eigen::Ref<const FrameVector> a, Eigen::Ref<const FrameVector> b);

/// Nearest centroid per row; ties go to the lowest index. Optionally
/// returns the winning squared distances.
std::vector<int> nearest_centroids(const FrameMatrix& points, const FrameMatrix& centroids,
                                   std::vector<double>* distances = nullptr);

/// k-means++ seeding (D^2 sampling) over the given rows.
FrameMatrix kmeanspp_init(const FrameMatrix& samples, Index k, std::uint64_t seed);

/// Moves every centroid whose count is zero onto the farthest member of the
/// currently largest cluster, one distinct point per empty centroid. labels
/// and counts are updated to reflect the moves. Returns the number moved.
Index reseed_empty_clusters(const FrameMatrix& points, std::vector<int>& labels,
                            std::vector<Index>& counts, FrameMatrix& centroids);

/// Number of rows used for k-means++ seeding when the sample set is large.
Index init_sample_size(Index sample_count, Index k, Index batch_size);

/// Mini-batch K-means with k-means++ initialization. Deterministic for a
/// fixed (samples, k, seed, batch_size).
ClusterModel fit_clusters(const FrameMatrix& samples, Index k, const KMeansConfig& config = {});
ClusterModel fit_clusters(std::span<const VelocityField> fields, Index k,
                          const KMeansConfig& config = {});

std::vector<int> assign_labels(const VelocityField& field, const ClusterModel& model);

}  // namespace lamof
