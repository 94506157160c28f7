#pragma once

#include <Eigen/Core>

namespace skelfit {

using Points2D = Eigen::MatrixX2d;

// Weak-perspective camera: orthographic drop of z, then uniform scale and 2D
// shift. Image coordinates are normalized so the longer side of the person box
// spans [-1, 1].
struct WeakPerspectiveCamera {
    double scale = 1.0;
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();
};

// Throws InputError when scale is not positive and finite.
void check_camera(const WeakPerspectiveCamera &cam);

// x_i = s * (X_i.x, X_i.y) + t
Points2D project(const WeakPerspectiveCamera &cam, const Eigen::MatrixX3d &points);

// Backpropagate dE/dx (K x 2) through project.
struct ProjectionGradient {
    Eigen::MatrixX3d points;  // dE/dX
    double scale = 0.0;       // dE/ds
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();
};
ProjectionGradient project_backward(const WeakPerspectiveCamera &cam, const Eigen::MatrixX3d &points,
                                    const Points2D &grad_projected);

} // namespace skelfit
