#pragma once

#include <Eigen/Core>

#include <array>

namespace motionstyle::motion {

/// First two columns of a rotation matrix, column-major:
/// (R00, R10, R20, R01, R11, R21).
using Rotation6D = std::array<double, 6>;

inline constexpr double kDegenerateEps = 1e-8;

/// Gram-Schmidt reconstruction. A degenerate second column is replaced by a
/// completion of the basis; if the first column is degenerate the second one
/// seeds the basis instead. Throws DegenerateRotation when both vanish.
Eigen::Matrix3d sixd_to_matrix(const Rotation6D& r);

/// Throws NotARotation unless R is orthonormal with det +1 to within 1e-4.
Rotation6D matrix_to_sixd(const Eigen::Matrix3d& R);

/// Rotation about +y (the vertical axis).
Eigen::Matrix3d yaw_matrix(double angle);

/// Relative rotation angle in [0, pi].
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace motionstyle::motion
