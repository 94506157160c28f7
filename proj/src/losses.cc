#include "skelfit/losses.h"

#include "skelfit/error.h"

#include <string>

namespace skelfit {

namespace {

void check_same_rows(Eigen::Index a, Eigen::Index b, const char *what) {
    if (a != b)
        throw InputError(std::string(what) + ": size mismatch (" + std::to_string(a) + " vs " + std::to_string(b) +
                         ")");
}

double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

} // namespace

void check_keypoints(const KeypointSet2D &kp) {
    check_same_rows(kp.points.rows(), kp.confidence.size(), "keypoint confidences");
    for (Eigen::Index k = 0; k < kp.confidence.size(); ++k) {
        if (!(kp.confidence[k] >= 0.0 && kp.confidence[k] <= 1.0))
            throw InputError("keypoint " + std::to_string(k) + ": confidence outside [0, 1]");
    }
    if (!kp.points.allFinite())
        throw InputError("keypoints contain non-finite coordinates");
}

double loss_pose(std::span<const Mat3> pred, std::span<const Mat3> target) {
    check_same_rows(static_cast<Eigen::Index>(pred.size()), static_cast<Eigen::Index>(target.size()), "loss_pose");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        sum += (pred[i] - target[i]).squaredNorm();
    return sum;
}

std::vector<Mat3> loss_pose_gradient(std::span<const Mat3> pred, std::span<const Mat3> target) {
    check_same_rows(static_cast<Eigen::Index>(pred.size()), static_cast<Eigen::Index>(target.size()), "loss_pose");
    std::vector<Mat3> g(pred.size());
    for (size_t i = 0; i < pred.size(); ++i)
        g[i] = 2.0 * (pred[i] - target[i]);
    return g;
}

double loss_shape(const Eigen::VectorXd &beta, const Eigen::VectorXd &target) {
    check_same_rows(beta.size(), target.size(), "loss_shape");
    return (beta - target).squaredNorm();
}

Eigen::VectorXd loss_shape_gradient(const Eigen::VectorXd &beta, const Eigen::VectorXd &target) {
    check_same_rows(beta.size(), target.size(), "loss_shape");
    return 2.0 * (beta - target);
}

double loss_kp3d(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &target) {
    check_same_rows(pred.rows(), target.rows(), "loss_kp3d");
    if (pred.rows() == 0)
        return 0.0;
    return (pred - target).cwiseAbs().sum() / static_cast<double>(pred.rows());
}

Eigen::MatrixX3d loss_kp3d_gradient(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &target) {
    check_same_rows(pred.rows(), target.rows(), "loss_kp3d");
    if (pred.rows() == 0)
        return pred;
    return (pred - target).unaryExpr(&sign) / static_cast<double>(pred.rows());
}

double loss_kp2d(const Points2D &pred, const Points2D &target, const Eigen::VectorXd &confidence) {
    check_same_rows(pred.rows(), target.rows(), "loss_kp2d");
    check_same_rows(pred.rows(), confidence.size(), "loss_kp2d confidence");
    if (pred.rows() == 0)
        return 0.0;
    return ((pred - target).cwiseAbs().rowwise().sum().array() * confidence.array()).sum() /
           static_cast<double>(pred.rows());
}

Points2D loss_kp2d_gradient(const Points2D &pred, const Points2D &target, const Eigen::VectorXd &confidence) {
    check_same_rows(pred.rows(), target.rows(), "loss_kp2d");
    check_same_rows(pred.rows(), confidence.size(), "loss_kp2d confidence");
    if (pred.rows() == 0)
        return pred;
    Points2D g = (pred - target).unaryExpr(&sign);
    g.array().colwise() *= confidence.array();
    return g / static_cast<double>(pred.rows());
}

} // namespace skelfit
