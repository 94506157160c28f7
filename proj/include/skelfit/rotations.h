#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skelfit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Continuous 6D rotation representation: two stacked 3-vectors (a, b).
using Cont6D = Eigen::Matrix<double, 6, 1>;

// Intrinsic Euler angles. `convention` lists the rotation axes in application
// order ("x", "zx", "xyz", ...). Three-axis conventions must be Tait-Bryan
// (all axes distinct).
struct EulerAngles {
    std::vector<double> angles;
    std::string convention;
};

// Gram-Schmidt: column 0 = a/|a|, column 1 = b orthogonalized against column 0
// and normalized, column 2 = column 0 x column 1. Throws NumericalError when a is
// zero or b is (nearly) parallel to a.
Mat3 cont6d_to_rotmat(const Cont6D &c);

// First two columns of R, stacked.
Cont6D rotmat_to_cont6d(const Mat3 &R);

Mat3 axis_rotation(char axis, double angle);
Mat3 axis_angle_rotation(const Vec3 &unit_axis, double angle);

// Product of elementary rotations in convention order.
Mat3 euler_to_rotmat(const EulerAngles &e);

// Inverse of euler_to_rotmat. For three axes the middle angle lies in
// [-pi/2, pi/2]; at gimbal lock the third angle is set to 0. For one or two axes
// the result is the closest rotation in that family (twist about the axis, or the
// first two Tait-Bryan angles of the completed sequence).
EulerAngles rotmat_to_euler(const Mat3 &R, std::string_view convention);

// Product of axis-angle rotations R(axes[0], angles[0]) * R(axes[1], angles[1]) * ...
Mat3 dof_rotation(std::span<const Vec3> axes, std::span<const double> angles);

// Geodesic angle of a rotation, in [0, pi].
double rotation_angle(const Mat3 &R);

struct DofDecomposition {
    std::vector<double> angles;
    // Angle of dof_rotation(axes, angles)^T * R: whatever the axes cannot express.
    double residual_angle = 0.0;
};

// Decompose R into rotations about 1-3 mutually orthogonal unit axes, in the
// given order. Throws InputError on non-unit or non-orthogonal axes.
DofDecomposition decompose_dof_rotation(const Mat3 &R, std::span<const Vec3> axes);

void validate_convention(std::string_view convention);

bool is_rotation(const Mat3 &R, double tol = 1e-9);

} // namespace skelfit
