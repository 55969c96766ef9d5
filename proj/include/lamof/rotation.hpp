#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "lamof/error.hpp"

namespace lamof {

/// Continuous 6D rotation: the first two columns of a rotation matrix,
/// stored column after column, i.e. [m00 m10 m20 m01 m11 m21].
template <typename Scalar>
using Rotation6 = Eigen::Matrix<Scalar, 6, 1>;
using Rotation6D = Rotation6<double>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

inline constexpr double kDegenerateNorm = 1e-8;
inline constexpr double kRotationTolerance = 1e-6;

/// Gram-Schmidt with first-column priority. Throws DegenerateRotation when
/// the first triple vanishes or the second is parallel to it.
template <typename Derived>
Matrix3<typename Derived::Scalar> rot6d_to_matrix(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  if (r.size() != 6) {
    throw Error(ErrorCode::DimensionMismatch, "6D rotation needs exactly 6 values");
  }
  const Vec3 a(r(0), r(1), r(2));
  const Vec3 b(r(3), r(4), r(5));
  if (!a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::NonFinite, "6D rotation contains non-finite values");
  }
  const Scalar a_norm = a.norm();
  if (a_norm < Scalar(kDegenerateNorm)) {
    throw Error(ErrorCode::DegenerateRotation, "first column of 6D rotation has zero norm");
  }
  const Vec3 c1 = a / a_norm;
  const Vec3 ortho = b - c1.dot(b) * c1;
  const Scalar ortho_norm = ortho.norm();
  if (ortho_norm < Scalar(kDegenerateNorm)) {
    throw Error(ErrorCode::DegenerateRotation, "6D rotation columns are parallel");
  }
  const Vec3 c2 = ortho / ortho_norm;

  Matrix3<Scalar> m;
  m.col(0) = c1;
  m.col(1) = c2;
  m.col(2) = c1.cross(c2);
  return m;
}

template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& m,
                 typename Derived::Scalar tol = typename Derived::Scalar(kRotationTolerance)) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != 3 || m.cols() != 3 || !m.allFinite()) return false;
  const Matrix3<Scalar> gram = m.transpose() * m;
  if ((gram - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m.determinant() - Scalar(1)) <= tol;
}

/// Throws NotARotation unless m is orthonormal with det +1 (within 1e-6).
template <typename Derived>
Rotation6<typename Derived::Scalar> matrix_to_rot6d(const Eigen::MatrixBase<Derived>& m) {
  if (!is_rotation(m)) {
    throw Error(ErrorCode::NotARotation, "matrix is not a proper rotation");
  }
  Rotation6<typename Derived::Scalar> r;
  r << m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1);
  return r;
}

/// Projects arbitrary 6 values onto the nearest valid 6D encoding in the
/// Gram-Schmidt sense.
template <typename Derived>
Rotation6<typename Derived::Scalar> project_rot6d(const Eigen::MatrixBase<Derived>& r) {
  return matrix_to_rot6d(rot6d_to_matrix(r));
}

}  // namespace lamof
