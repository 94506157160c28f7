#include "skelfit/camera.h"

#include "skelfit/error.h"

#include <cmath>
#include <string>

namespace skelfit {

void check_camera(const WeakPerspectiveCamera &cam) {
    if (!(std::isfinite(cam.scale) && cam.scale > 0.0))
        throw InputError("camera scale must be positive, got " + std::to_string(cam.scale));
    if (!cam.translation.allFinite())
        throw InputError("camera translation is not finite");
}

Points2D project(const WeakPerspectiveCamera &cam, const Eigen::MatrixX3d &points) {
    check_camera(cam);
    Points2D out = cam.scale * points.leftCols<2>();
    out.rowwise() += cam.translation.transpose();
    return out;
}

ProjectionGradient project_backward(const WeakPerspectiveCamera &cam, const Eigen::MatrixX3d &points,
                                    const Points2D &grad_projected) {
    if (grad_projected.rows() != points.rows())
        throw InputError("projection gradient has " + std::to_string(grad_projected.rows()) + " rows, expected " +
                         std::to_string(points.rows()));
    ProjectionGradient g;
    g.points = Eigen::MatrixX3d::Zero(points.rows(), 3);
    g.points.leftCols<2>() = cam.scale * grad_projected;
    g.scale = (grad_projected.array() * points.leftCols<2>().array()).sum();
    g.translation = grad_projected.colwise().sum().transpose();
    return g;
}

} // namespace skelfit
