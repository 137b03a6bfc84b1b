#include "motionstyle/motion/rotation.hpp"

#include "motionstyle/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace motionstyle::motion {

namespace {

// Unit vector orthogonal to u, taken from the coordinate axis least aligned with u.
Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& u) {
  Eigen::Index axis = 0;
  u.cwiseAbs().minCoeff(&axis);
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
  return (e - e.dot(u) * u).normalized();
}

}  // namespace

Eigen::Matrix3d sixd_to_matrix(const Rotation6D& r) {
  const Eigen::Vector3d a1(r[0], r[1], r[2]);
  const Eigen::Vector3d a2(r[3], r[4], r[5]);
  if (!a1.allFinite() || !a2.allFinite())
    raise(ErrorCode::DegenerateRotation, "non-finite 6D rotation");
  const double n1 = a1.norm();
  const double n2 = a2.norm();
  Eigen::Vector3d b1;
  Eigen::Vector3d b2;
  if (n1 > kDegenerateEps) {
    b1 = a1 / n1;
    Eigen::Vector3d p = a2 - b1.dot(a2) * b1;
    const double np = p.norm();
    b2 = np > kDegenerateEps ? Eigen::Vector3d(p / np) : any_orthogonal(b1);
  } else if (n2 > kDegenerateEps) {
    b2 = a2 / n2;
    b1 = any_orthogonal(b2);
  } else {
    raise(ErrorCode::DegenerateRotation, "both 6D columns vanish");
  }
  Eigen::Matrix3d R;
  R.col(0) = b1;
  R.col(1) = b2;
  R.col(2) = b1.cross(b2);
  return R;
}

Rotation6D matrix_to_sixd(const Eigen::Matrix3d& R) {
  if (!R.allFinite()) raise(ErrorCode::NotARotation, "non-finite matrix");
  const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-4 || R.determinant() < 0.0)
    raise(ErrorCode::NotARotation, "matrix is not a proper rotation");
  return {R(0, 0), R(1, 0), R(2, 0), R(0, 1), R(1, 1), R(2, 1)};
}

Eigen::Matrix3d yaw_matrix(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace motionstyle::motion
