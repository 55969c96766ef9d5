#include "lamof/clustering.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "lamof/error.hpp"
#include "lamof/random.hpp"
#include "parallel.hpp"

namespace lamof {

namespace {

constexpr Index kChunkRows = 2048;

// Relative slack for the GEMM-based distance expansion. Its rounding error is
// orders of magnitude below this for any realistic feature dimension, so the
// true nearest centroid always survives the candidate filter.
constexpr double kExpansionSlack = 1e-10;

void validate_samples(const FrameMatrix& samples, Index k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be at least 1");
  if (samples.rows() < k) {
    throw Error(ErrorCode::TooFewSamples, "need at least " + std::to_string(k) + " samples, got " +
                                              std::to_string(samples.rows()));
  }
  if (samples.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "samples have no features");
  if (!samples.allFinite()) throw Error(ErrorCode::NonFinite, "samples contain non-finite values");
}

std::vector<Index> count_labels(const std::vector<int>& labels, Index k) {
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

Index reseed_impl(const FrameMatrix& points, std::vector<int>& labels, std::vector<Index>& counts,
                  FrameMatrix& centroids, const std::vector<bool>& empty) {
  std::vector<bool> used(static_cast<std::size_t>(points.rows()), false);
  Index moved = 0;
  for (Index c = 0; c < centroids.rows(); ++c) {
    if (!empty[static_cast<std::size_t>(c)]) continue;
    const auto largest_it = std::max_element(counts.begin(), counts.end());
    if (*largest_it < 2) break;
    const auto largest = static_cast<int>(largest_it - counts.begin());

    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < points.rows(); ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (labels[iu] != largest || used[iu]) continue;
      const double d = squared_distance(points.row(i), centroids.row(largest));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) break;
    centroids.row(c) = points.row(far);
    labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
    used[static_cast<std::size_t>(far)] = true;
    --counts[static_cast<std::size_t>(largest)];
    counts[static_cast<std::size_t>(c)] = 1;
    ++moved;
  }
  return moved;
}

FrameMatrix gather_rows(const FrameMatrix& src, const std::vector<Index>& rows) {
  FrameMatrix out(static_cast<Index>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = src.row(rows[i]);
  return out;
}

}  // namespace

double squared_distance(Eigen::Ref<const FrameVector> a, Eigen::Ref<const FrameVector> b) {
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<int> nearest_centroids(const FrameMatrix& points, const FrameMatrix& centroids,
                                   std::vector<double>* distances) {
  if (points.cols() != centroids.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature dimension " + std::to_string(points.cols()) +
                    " does not match centroid dimension " + std::to_string(centroids.cols()));
  }
  if (centroids.rows() < 1) throw Error(ErrorCode::InvalidArgument, "no centroids");

  const Index n = points.rows();
  const Index k = centroids.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (distances) distances->assign(static_cast<std::size_t>(n), 0.0);

  const Eigen::VectorXd c_norm = centroids.rowwise().squaredNorm();
  const double c_max = c_norm.maxCoeff();

  detail::parallel_chunks(0, n, kChunkRows, [&](Index r0, Index r1) {
    // one column per point keeps each point's candidate scan contiguous
    const Eigen::MatrixXd cross = centroids * points.middleRows(r0, r1 - r0).transpose();
    Eigen::VectorXd approx(k);
    for (Index r = r0; r < r1; ++r) {
      const auto x = points.row(r);
      const double x_norm = x.squaredNorm();
      approx = (x_norm - 2.0 * cross.col(r - r0).array() + c_norm.array()).matrix();
      const double threshold =
          approx.minCoeff() + 2.0 * (kExpansionSlack * (x_norm + c_max) + 1e-300);

      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < k; ++j) {
        if (approx[j] > threshold) continue;
        const double d = squared_distance(x, centroids.row(j));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(j);
        }
      }
      labels[static_cast<std::size_t>(r)] = best;
      if (distances) (*distances)[static_cast<std::size_t>(r)] = best_d;
    }
  });
  return labels;
}

FrameMatrix kmeanspp_init(const FrameMatrix& samples, Index k, std::uint64_t seed) {
  validate_samples(samples, k);
  const Index n = samples.rows();
  Rng rng(seed);
  FrameMatrix centers(k, samples.cols());

  centers.row(0) = samples.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd min_d(n);
  for (Index i = 0; i < n; ++i) min_d[i] = squared_distance(samples.row(i), centers.row(0));

  for (Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) total += min_d[i];

    Index pick = -1;
    if (total > 0.0) {
      const double r = rng.uniform01() * total;
      double cum = 0.0;
      Index last_positive = -1;
      for (Index i = 0; i < n; ++i) {
        if (min_d[i] <= 0.0) continue;
        last_positive = i;
        cum += min_d[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = last_positive;
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = samples.row(pick);
    for (Index i = 0; i < n; ++i) {
      min_d[i] = std::min(min_d[i], squared_distance(samples.row(i), centers.row(c)));
    }
  }
  return centers;
}

Index reseed_empty_clusters(const FrameMatrix& points, std::vector<int>& labels,
                            std::vector<Index>& counts, FrameMatrix& centroids) {
  std::vector<bool> empty(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) empty[c] = counts[c] == 0;
  return reseed_impl(points, labels, counts, centroids, empty);
}

Index init_sample_size(Index sample_count, Index k, Index batch_size) {
  return std::min(sample_count, std::max(3 * batch_size, 3 * k));
}

ClusterModel fit_clusters(const FrameMatrix& samples, Index k, const KMeansConfig& config) {
  validate_samples(samples, k);
  if (config.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (config.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");

  const Index n = samples.rows();
  Rng rng(derive_seed(config.seed, 1));

  ClusterModel model;
  model.seed = config.seed;

  const Index init_n = init_sample_size(n, k, config.batch_size);
  if (init_n < n) {
    // partial Fisher-Yates: first init_n entries are a uniform subset
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < init_n; ++i) {
      const auto j = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    order.resize(static_cast<std::size_t>(init_n));
    model.centroids = kmeanspp_init(gather_rows(samples, order), k, derive_seed(config.seed, 0));
  } else {
    model.centroids = kmeanspp_init(samples, k, derive_seed(config.seed, 0));
  }
  FrameMatrix& centroids = model.centroids;

  if (config.batch_size >= n) {
    // Full batch: exact Lloyd iterations until the assignment repeats.
    std::vector<int> previous;
    for (int iter = 0; iter < config.max_iters; ++iter) {
      std::vector<int> labels = nearest_centroids(samples, centroids);
      model.iterations_run = iter + 1;
      if (labels == previous) break;
      previous = labels;

      std::vector<Index> counts = count_labels(labels, k);
      FrameMatrix sums = FrameMatrix::Zero(k, samples.cols());
      for (Index i = 0; i < n; ++i) sums.row(labels[static_cast<std::size_t>(i)]) += samples.row(i);
      for (Index c = 0; c < k; ++c) {
        const Index cnt = counts[static_cast<std::size_t>(c)];
        if (cnt > 0) centroids.row(c) = sums.row(c) / static_cast<double>(cnt);
      }
      reseed_empty_clusters(samples, labels, counts, centroids);
    }
  } else {
    std::vector<Index> seen(static_cast<std::size_t>(k), 0);
    std::vector<Index> batch_rows(static_cast<std::size_t>(config.batch_size));
    for (int iter = 0; iter < config.max_iters; ++iter) {
      for (auto& r : batch_rows) r = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      const FrameMatrix batch = gather_rows(samples, batch_rows);
      std::vector<int> labels = nearest_centroids(batch, centroids);
      const FrameMatrix before = centroids;

      for (Index i = 0; i < batch.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        ++seen[c];
        centroids.row(static_cast<Index>(c)) +=
            (batch.row(i) - centroids.row(static_cast<Index>(c))) / static_cast<double>(seen[c]);
      }

      std::vector<bool> empty(static_cast<std::size_t>(k));
      bool any_empty = false;
      for (std::size_t c = 0; c < empty.size(); ++c) {
        empty[c] = seen[c] == 0;
        any_empty = any_empty || empty[c];
      }
      if (any_empty) {
        std::vector<Index> counts = count_labels(labels, k);
        reseed_impl(batch, labels, counts, centroids, empty);
        for (std::size_t c = 0; c < empty.size(); ++c) {
          if (empty[c] && counts[c] > 0) seen[c] = counts[c];
        }
      }

      model.iterations_run = iter + 1;
      const double shift = (centroids - before).rowwise().squaredNorm().maxCoeff();
      if (!any_empty && shift <= config.tol) break;
    }
  }

  std::vector<double> dist;
  nearest_centroids(samples, centroids, &dist);
  double inertia = 0.0;
  for (double d : dist) inertia += d;
  model.inertia = inertia;
  return model;
}

ClusterModel fit_clusters(std::span<const VelocityField> fields, Index k, const KMeansConfig& config) {
  if (fields.empty()) throw Error(ErrorCode::TooFewSamples, "no velocity fields given");
  const Index d = fields.front().feature_dim();
  Index rows = 0;
  for (const auto& f : fields) {
    if (f.feature_dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "velocity fields have different feature dimensions");
    }
    rows += f.frame_count();
  }
  if (rows < k) {
    throw Error(ErrorCode::TooFewSamples,
                "need at least " + std::to_string(k) + " frames, got " + std::to_string(rows));
  }
  FrameMatrix samples(rows, d);
  Index at = 0;
  for (const auto& f : fields) {
    samples.middleRows(at, f.frame_count()) = f.velocities;
    at += f.frame_count();
  }
  return fit_clusters(samples, k, config);
}

std::vector<int> assign_labels(const VelocityField& field, const ClusterModel& model) {
  return nearest_centroids(field.velocities, model.centroids);
}

}  // namespace lamof
