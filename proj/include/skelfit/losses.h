#pragma once

#include "skelfit/camera.h"
#include "skelfit/rotations.h"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace skelfit {

// Observed 2D keypoints in normalized image units with detector confidences.
struct KeypointSet2D {
    Points2D points;
    Eigen::VectorXd confidence;

    int size() const { return static_cast<int>(points.rows()); }
};

// Throws InputError on size mismatch or confidences outside [0, 1].
void check_keypoints(const KeypointSet2D &kp);

// Sum of squared elementwise differences over all matrices.
double loss_pose(std::span<const Mat3> pred, std::span<const Mat3> target);
std::vector<Mat3> loss_pose_gradient(std::span<const Mat3> pred, std::span<const Mat3> target);

double loss_shape(const Eigen::VectorXd &beta, const Eigen::VectorXd &target);
Eigen::VectorXd loss_shape_gradient(const Eigen::VectorXd &beta, const Eigen::VectorXd &target);

// Mean over points of the L1 distance. The 2D variant weights each point by its
// confidence (the mean still divides by the total point count).
double loss_kp3d(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &target);
Eigen::MatrixX3d loss_kp3d_gradient(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &target);
double loss_kp2d(const Points2D &pred, const Points2D &target, const Eigen::VectorXd &confidence);
Points2D loss_kp2d_gradient(const Points2D &pred, const Points2D &target, const Eigen::VectorXd &confidence);

// Relative weights of the training terms. The defaults are untuned guesses in the
// range commonly used by HMR-style regressors.
struct LossWeights {
    double pose = 1e-3;
    double shape = 5e-4;
    double kp3d = 5e-2;
    double kp2d = 1e-2;
};

struct LossTerms {
    double pose = 0.0;
    double shape = 0.0;
    double kp3d = 0.0;
    double kp2d = 0.0;

    double weighted(const LossWeights &w) const { return w.pose * pose + w.shape * shape + w.kp3d * kp3d + w.kp2d * kp2d; }
};

} // namespace skelfit
