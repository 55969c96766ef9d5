#pragma once

// Straightforward reference implementations used to check the library.
// They favour plain loops over speed and share no code with src/.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lamof/codec.hpp"
#include "lamof/kinematics.hpp"
#include "lamof/metrics.hpp"
#include "lamof/motion.hpp"

namespace lamof::oracle {

inline FrameMatrix velocities(const FrameMatrix& f) {
  FrameMatrix v = FrameMatrix::Zero(f.rows(), f.cols());
  for (Index t = 0; t + 1 < f.rows(); ++t)
    for (Index d = 0; d < f.cols(); ++d) v(t, d) = f(t + 1, d) - f(t, d);
  if (f.rows() >= 2) v.row(f.rows() - 1) = v.row(f.rows() - 2);
  return v;
}

inline double sq_dist(const FrameMatrix& a, Index i, const FrameMatrix& b, Index j) {
  double s = 0.0;
  for (Index d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    s += diff * diff;
  }
  return s;
}

inline std::vector<int> nearest(const FrameMatrix& points, const FrameMatrix& centroids) {
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = sq_dist(points, i, centroids, 0);
    for (Index c = 1; c < centroids.rows(); ++c) {
      const double d = sq_dist(points, i, centroids, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

/// Exhaustive Lloyd iteration from a given initialisation. After the mean
/// update, each empty cluster (in index order) takes the point of the
/// currently largest cluster farthest from that cluster's centroid, lowest
/// index on ties. Stops when the assignment repeats.
inline std::vector<int> lloyd(const FrameMatrix& points, FrameMatrix centroids, int max_iters) {
  const Index n = points.rows();
  const Index k = centroids.rows();
  std::vector<int> labels;
  std::vector<int> previous;
  for (int it = 0; it < max_iters; ++it) {
    labels = nearest(points, centroids);
    if (labels == previous) break;
    previous = labels;

    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    FrameMatrix sums = FrameMatrix::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (Index c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);

    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    std::vector<bool> empty(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) empty[static_cast<std::size_t>(c)] = counts[static_cast<std::size_t>(c)] == 0;
    for (Index c = 0; c < k; ++c) {
      if (!empty[static_cast<std::size_t>(c)]) continue;
      Index largest = 0;
      for (Index q = 1; q < k; ++q)
        if (counts[static_cast<std::size_t>(q)] > counts[static_cast<std::size_t>(largest)]) largest = q;
      if (counts[static_cast<std::size_t>(largest)] < 2) break;
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] != largest || taken[static_cast<std::size_t>(i)]) continue;
        const double d = sq_dist(points, i, centroids, largest);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[static_cast<std::size_t>(far)] = true;
      centroids.row(c) = points.row(far);
      labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      --counts[static_cast<std::size_t>(largest)];
      counts[static_cast<std::size_t>(c)] = 1;
    }
  }
  return nearest(points, centroids);
}

inline std::vector<int> majority(const std::vector<int>& labels, int window) {
  const int n = static_cast<int>(labels.size());
  const int half = window / 2;
  std::vector<int> out(labels.size());
  for (int t = 0; t < n; ++t) {
    std::map<int, int> votes;
    for (int o = -half; o <= half; ++o) {
      const int idx = std::clamp(t + o, 0, n - 1);
      ++votes[labels[static_cast<std::size_t>(idx)]];
    }
    int top = 0;
    for (const auto& [label, count] : votes) top = std::max(top, count);
    int pick = -1;
    if (t > 0 && votes[out[static_cast<std::size_t>(t - 1)]] == top) pick = out[static_cast<std::size_t>(t - 1)];
    if (pick < 0) {
      for (const auto& [label, count] : votes) {
        if (count == top) {
          pick = label;
          break;
        }
      }
    }
    out[static_cast<std::size_t>(t)] = pick;
  }
  return out;
}

inline std::vector<Segment> run_lengths(const std::vector<int>& labels) {
  std::vector<Segment> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (t == 0 || labels[t] != labels[t - 1]) {
      out.push_back({labels[t], static_cast<Index>(t), 1});
    } else {
      ++out.back().duration;
    }
  }
  return out;
}

/// Linear interpolation at positions i (N-1) / (L-1).
inline FrameMatrix interpolate(const FrameMatrix& f, Index target) {
  FrameMatrix out(target, f.cols());
  const double n1 = static_cast<double>(f.rows() - 1);
  for (Index i = 0; i < target; ++i) {
    const double pos = target == 1 ? 0.0 : static_cast<double>(i) * n1 / static_cast<double>(target - 1);
    const Index lo = std::min<Index>(static_cast<Index>(std::floor(pos)), f.rows() - 1);
    const Index hi = std::min<Index>(lo + 1, f.rows() - 1);
    const double w = pos - static_cast<double>(lo);
    for (Index d = 0; d < f.cols(); ++d) out(i, d) = (1.0 - w) * f(lo, d) + w * f(hi, d);
  }
  return out;
}

/// Gram-Schmidt on the two stored columns, third column by cross product.
inline Eigen::Matrix3d rot6d_matrix(const double* r) {
  Eigen::Vector3d a(r[0], r[1], r[2]);
  Eigen::Vector3d b(r[3], r[4], r[5]);
  const Eigen::Vector3d c0 = a / a.norm();
  Eigen::Vector3d c1 = b - c0.dot(b) * c0;
  c1 /= c1.norm();
  Eigen::Matrix3d m;
  m.col(0) = c0;
  m.col(1) = c1;
  m.col(2) = c0.cross(c1);
  return m;
}

/// Forward kinematics through explicit 4x4 homogeneous transforms. Each
/// joint's world transform is the product of local transforms along its
/// ancestor chain, root first.
inline PositionMatrix fk(const Skeleton& sk, const FrameVector& pose) {
  const Index j = sk.joint_count();
  PositionMatrix out(j, 3);
  for (Index q = 0; q < j; ++q) {
    std::vector<Index> chain;
    for (Index a = q; a >= 0; a = sk.parents()[static_cast<std::size_t>(a)]) chain.push_back(a);
    Eigen::Matrix4d world = Eigen::Matrix4d::Identity();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
      local.topLeftCorner<3, 3>() = rot6d_matrix(pose.data() + 6 * *it);
      if (*it == 0) {
        local.topRightCorner<3, 1>() = pose.tail<3>().transpose();
      } else {
        local.topRightCorner<3, 1>() = sk.offsets().row(*it).transpose();
      }
      world = world * local;
    }
    out.row(q) = world.topRightCorner<3, 1>().transpose();
  }
  return out;
}

inline double recon(const SuperMotionSequence& a, const SuperMotionSequence& b) {
  double total = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    const auto& x = a.segment(s);
    const auto& y = b.segment(s);
    Eigen::VectorXd va(2 * x.start_pose.size() + 1), vb(2 * y.start_pose.size() + 1);
    va << x.start_pose.transpose(), x.velocity.transpose(), static_cast<double>(x.duration);
    vb << y.start_pose.transpose(), y.velocity.transpose(), static_cast<double>(y.duration);
    total += (va - vb).squaredNorm();
  }
  return total / static_cast<double>(a.segment_count());
}

inline double vel(const SuperMotionSequence& a, const SuperMotionSequence& b) {
  double total = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    for (Index d = 0; d < a.feature_dim(); ++d) {
      const double diff = a.segment(s).velocity[d] - b.segment(s).velocity[d];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(a.segment_count());
}

inline double coherent(const SuperMotionSequence& sm) {
  double total = 0.0;
  for (Index s = 0; s + 1 < sm.segment_count(); ++s) {
    const auto& cur = sm.segment(s);
    const FrameVector gap = sm.segment(s + 1).start_pose - cur.start_pose - cur.velocity * static_cast<double>(cur.duration);
    total += gap.squaredNorm();
  }
  return total / static_cast<double>(sm.segment_count() - 1);
}

inline double joint(const SuperMotionSequence& a, const SuperMotionSequence& b, const Skeleton& sk) {
  double total = 0.0;
  for (Index s = 0; s < a.segment_count(); ++s) {
    const PositionMatrix pa = fk(sk, a.segment(s).start_pose);
    const PositionMatrix pb = fk(sk, b.segment(s).start_pose);
    for (Index q = 0; q < pa.rows(); ++q) total += (pa.row(q) - pb.row(q)).squaredNorm();
  }
  return total / static_cast<double>(a.segment_count());
}

inline double contact(const FrameMatrix& foot_vel, const LabelMatrix& labels) {
  double total = 0.0;
  for (Index s = 0; s < labels.rows(); ++s)
    for (Index f = 0; f < labels.cols(); ++f)
      if (labels(s, f) != 0) total += foot_vel.row(s).segment<3>(3 * f).squaredNorm();
  return total / static_cast<double>(labels.rows());
}

inline double total(const MetricComponents& c, const MetricWeights& w) {
  const Eigen::Matrix<double, 5, 1> comp(c.recon, c.joint, c.vel, c.contact, c.coherent);
  const Eigen::Matrix<double, 5, 1> wt(w.recon, w.joint, w.vel, w.contact, w.coherent);
  return comp.dot(wt);
}

inline double mpjpe(const FrameMatrix& a, const FrameMatrix& b) {
  double total = 0.0;
  const Index joints = a.cols() / 3;
  for (Index t = 0; t < a.rows(); ++t)
    for (Index q = 0; q < joints; ++q) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += std::pow(a(t, 3 * q + c) - b(t, 3 * q + c), 2);
      total += std::sqrt(s);
    }
  return total / static_cast<double>(a.rows() * joints);
}

inline LabelMatrix contacts(const FrameMatrix& f, const std::vector<int>& feet, double max_height, double max_speed,
                            int up) {
  LabelMatrix out(f.rows(), static_cast<Index>(feet.size()));
  for (Index t = 0; t < f.rows(); ++t) {
    const Index a = f.rows() == 1 ? 0 : std::min(t, f.rows() - 2);
    const Index b = f.rows() == 1 ? 0 : a + 1;
    for (std::size_t k = 0; k < feet.size(); ++k) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c)
        if (c != up) s += std::pow(f(b, 3 * feet[k] + c) - f(a, 3 * feet[k] + c), 2);
      const bool low = f(t, 3 * feet[k] + up) <= max_height;
      out(t, static_cast<Index>(k)) = (low && std::sqrt(s) <= max_speed) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace lamof::oracle
