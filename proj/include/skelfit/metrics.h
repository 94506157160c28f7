#pragma once

#include "skelfit/body_model.h"
#include "skelfit/camera.h"

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skelfit {

// target ~ scale * rotation * source + translation
struct SimilarityTransform {
    double scale = 1.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Eigen::MatrixX3d apply(const Eigen::MatrixX3d &points) const;
};

// Fraction of visible keypoints with |pred - gt| < threshold * normalizer (strict).
// A keypoint is visible when its entry in `visible` is > 0; an empty span means
// all are visible. Returns 0 when nothing is visible.
double pck(const Points2D &pred, const Points2D &gt, double threshold, double normalizer,
           std::span<const double> visible = {});

// Mean per-joint position error after subtracting each set's root joint; no
// alignment when root_index is empty. Units follow the input.
double mpjpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt, std::optional<int> root_index = 0);

// Least-squares similarity alignment of source onto target (Umeyama), reflections
// excluded. Throws NumericalError for collinear or coincident point sets.
SimilarityTransform procrustes_align(const Eigen::MatrixX3d &source, const Eigen::MatrixX3d &target);

// Mean squared distance between transform.apply(source) and target.
double alignment_residual(const SimilarityTransform &transform, const Eigen::MatrixX3d &source,
                          const Eigen::MatrixX3d &target);

double pa_mpjpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt);
// Per-vertex errors; MPVPE compares vertices as given.
double mpvpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt);
double pa_mpvpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt);

// Rotational DoFs of one joint, in application order.
struct JointDofSpec {
    std::vector<Vec3> axes;
    std::vector<std::optional<double>> lower;
    std::vector<std::optional<double>> upper;
};

JointDofSpec joint_dof_spec(const BodyModel &model, int joint);

struct LimitDecomposition {
    std::vector<double> angles;      // radians, per DoF
    std::vector<double> violations;  // max(0, l - q, q - u), radians, per DoF
    // Rotation the DoFs cannot express. Reported as a violation for joints with
    // fewer than three DoFs (an off-hinge rotation of a 1-DoF knee, say).
    double off_axis = 0.0;

    double max_violation() const;
};

LimitDecomposition decompose_against_limits(const Mat3 &rotation, const JointDofSpec &spec);

// frequencies[joint][threshold] = fraction of samples whose violation exceeds the
// threshold (strictly).
struct ViolationTable {
    std::vector<std::string> joints;
    std::vector<double> thresholds_deg;
    std::vector<std::vector<double>> frequencies;
    int samples = 0;

    std::string render() const;
};

// One sample = one local rotation per model joint.
using PoseSample = std::vector<Mat3>;

// Throws InputError when thresholds are not ascending or a joint name is unknown.
ViolationTable violation_audit(std::span<const PoseSample> poses, const BodyModel &model,
                               std::span<const double> thresholds_deg, std::span<const std::string> joints);

} // namespace skelfit
