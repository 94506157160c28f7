#include "skelfit/rotations.h"

#include "skelfit/error.h"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace skelfit {

namespace {

int axis_index(char axis) {
    switch (axis) {
    case 'x':
        return 0;
    case 'y':
        return 1;
    case 'z':
        return 2;
    default:
        throw InputError(std::string("invalid rotation axis '") + axis + "', expected one of x, y, z");
    }
}

// +1 for cyclic (xyz, yzx, zxy), -1 otherwise.
double parity(int i, int j) { return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0; }

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi)
        a += 2.0 * std::numbers::pi;
    return a;
}

double twist_angle(const Mat3 &R, const Vec3 &unit_axis) {
    const Eigen::Quaterniond q(R);
    return wrap_angle(2.0 * std::atan2(q.vec().dot(unit_axis), q.w()));
}

// Tait-Bryan decomposition R = R_i(a) R_j(b) R_k(c).
std::array<double, 3> tait_bryan(const Mat3 &R, int i, int j, int k) {
    const double e = parity(i, j);
    const double sb = std::clamp(e * R(i, k), -1.0, 1.0);
    const double cb = std::hypot(R(i, i), R(i, j));
    if (cb > 1e-10) {
        return {std::atan2(-e * R(j, k), R(k, k)), std::atan2(sb, cb), std::atan2(-e * R(i, j), R(i, i))};
    }
    // Gimbal lock: only a + c (or a - c) is observable; pin c to 0.
    return {std::atan2(e * R(k, j), R(j, j)), std::copysign(std::numbers::pi / 2.0, sb), 0.0};
}

void check_axes(std::span<const Vec3> axes) {
    if (axes.empty() || axes.size() > 3)
        throw InputError("expected 1 to 3 rotation axes, got " + std::to_string(axes.size()));
    for (size_t a = 0; a < axes.size(); ++a) {
        if (!axes[a].allFinite() || std::abs(axes[a].norm() - 1.0) > 1e-6)
            throw InputError("rotation axis " + std::to_string(a) + " is not unit length");
    }
}

} // namespace

Mat3 cont6d_to_rotmat(const Cont6D &c) {
    const Vec3 a = c.head<3>();
    const Vec3 b = c.tail<3>();
    if (!c.allFinite())
        throw NumericalError("6D rotation has non-finite entries");
    const double a_norm = a.norm();
    const double b_norm = b.norm();
    if (a_norm == 0.0 || b_norm == 0.0)
        throw NumericalError("6D rotation has a zero vector");
    const Vec3 c0 = a / a_norm;
    const Vec3 b_perp = b - c0.dot(b) * c0;
    const double perp_norm = b_perp.norm();
    if (perp_norm < 1e-8 * b_norm)
        throw NumericalError("6D rotation vectors are parallel");
    const Vec3 c1 = b_perp / perp_norm;
    Mat3 R;
    R.col(0) = c0;
    R.col(1) = c1;
    R.col(2) = c0.cross(c1);
    return R;
}

Cont6D rotmat_to_cont6d(const Mat3 &R) {
    Cont6D c;
    c << R.col(0), R.col(1);
    return c;
}

Mat3 axis_rotation(char axis, double angle) { return axis_angle_rotation(Vec3::Unit(axis_index(axis)), angle); }

Mat3 axis_angle_rotation(const Vec3 &unit_axis, double angle) {
    return Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
}

void validate_convention(std::string_view convention) {
    if (convention.empty() || convention.size() > 3)
        throw InputError("Euler convention must have 1 to 3 axes, got '" + std::string(convention) + "'");
    for (char ch : convention)
        axis_index(ch);
    for (size_t i = 1; i < convention.size(); ++i) {
        if (convention[i] == convention[i - 1])
            throw InputError("Euler convention '" + std::string(convention) + "' repeats an axis consecutively");
    }
    if (convention.size() == 3 && convention[0] == convention[2])
        throw InputError("only Tait-Bryan three-axis conventions are supported, got '" + std::string(convention) +
                         "'");
}

Mat3 euler_to_rotmat(const EulerAngles &e) {
    validate_convention(e.convention);
    if (e.angles.size() != e.convention.size())
        throw InputError("Euler angle count " + std::to_string(e.angles.size()) + " does not match convention '" +
                         e.convention + "'");
    Mat3 R = Mat3::Identity();
    for (size_t n = 0; n < e.angles.size(); ++n)
        R = R * axis_rotation(e.convention[n], e.angles[n]);
    return R;
}

EulerAngles rotmat_to_euler(const Mat3 &R, std::string_view convention) {
    validate_convention(convention);
    EulerAngles out{{}, std::string(convention)};
    const int i = axis_index(convention[0]);
    if (convention.size() == 1) {
        out.angles = {twist_angle(R, Vec3::Unit(i))};
        return out;
    }
    const int j = axis_index(convention[1]);
    const int k = 3 - i - j;
    const auto abc = tait_bryan(R, i, j, k);
    out.angles.assign(abc.begin(), abc.begin() + static_cast<long>(convention.size()));
    return out;
}

Mat3 dof_rotation(std::span<const Vec3> axes, std::span<const double> angles) {
    check_axes(axes);
    if (axes.size() != angles.size())
        throw InputError("axis count " + std::to_string(axes.size()) + " does not match angle count " +
                         std::to_string(angles.size()));
    Mat3 R = Mat3::Identity();
    for (size_t n = 0; n < axes.size(); ++n)
        R = R * axis_angle_rotation(axes[n], angles[n]);
    return R;
}

double rotation_angle(const Mat3 &R) {
    const Vec3 v(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    return std::atan2(0.5 * v.norm(), 0.5 * (R.trace() - 1.0));
}

DofDecomposition decompose_dof_rotation(const Mat3 &R, std::span<const Vec3> axes) {
    check_axes(axes);
    for (size_t a = 0; a < axes.size(); ++a) {
        for (size_t b = a + 1; b < axes.size(); ++b) {
            if (std::abs(axes[a].dot(axes[b])) > 1e-6)
                throw InputError("rotation axes " + std::to_string(a) + " and " + std::to_string(b) +
                                 " are not orthogonal");
        }
    }
    DofDecomposition out;
    if (axes.size() == 1) {
        out.angles = {twist_angle(R, axes[0])};
    } else {
        Mat3 frame;
        frame.col(0) = axes[0];
        frame.col(1) = axes[1];
        frame.col(2) = axes[0].cross(axes[1]);
        const Mat3 local = frame.transpose() * R * frame;
        const auto abc = tait_bryan(local, 0, 1, 2);
        out.angles = {abc[0], abc[1]};
        if (axes.size() == 3)
            out.angles.push_back(axes[2].dot(frame.col(2)) > 0.0 ? abc[2] : -abc[2]);
    }
    out.residual_angle = rotation_angle(dof_rotation(axes, out.angles).transpose() * R);
    return out;
}

bool is_rotation(const Mat3 &R, double tol) {
    return R.allFinite() && (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
}

} // namespace skelfit
