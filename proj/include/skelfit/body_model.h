#pragma once

#include "skelfit/rotations.h"

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skelfit {

class SkinnedReadout;

using PoseVector = Eigen::VectorXd;   // q, one entry per degree of freedom (radians / meters)
using ShapeVector = Eigen::VectorXd;  // beta, blendshape coefficients
using JointSet3D = Eigen::MatrixX3d;  // K x 3 model-space points

enum class DofKind { rotation, translation };

struct Dof {
    std::string name;
    DofKind kind = DofKind::rotation;
    Vec3 axis = Vec3::UnitX();
    // Unset limits mean the DoF is unbounded on that side.
    std::optional<double> lower;
    std::optional<double> upper;

    bool bounded() const { return lower.has_value() || upper.has_value(); }
};

struct Joint {
    std::string name;
    int parent = -1;
    // Rest position relative to the parent joint; absolute position for the root.
    Vec3 rest_offset = Vec3::Zero();
    std::vector<Dof> dofs;
};

// Raw model data as loaded from a model-definition document or built in code.
// Wrap it in a BodyModel to validate it and evaluate the model.
struct ModelDefinition {
    std::vector<Joint> joints;
    Eigen::MatrixX3d template_vertices;
    Eigen::MatrixX3i faces;
    std::vector<Eigen::MatrixX3d> shape_blendshapes;  // B entries, each N x 3
    Eigen::MatrixXd skinning_weights;                 // N x J, rows sum to 1
    Eigen::MatrixXd joint_regressor;                  // K x N, rows sum to 1 (keypoints X = W M)
    // J x N regressor giving shape-dependent rest joint locations. Empty means the
    // skeleton does not change with shape.
    Eigen::MatrixXd skeleton_regressor;
    std::vector<std::string> keypoint_names;
};

struct Mesh {
    Eigen::MatrixX3d vertices;
};

// Posed skeleton: per-joint world rotation and origin.
struct Skeleton {
    std::vector<Mat3> rotations;
    JointSet3D positions;       // posed joint origins
    JointSet3D rest_positions;  // shaped rest joint origins

    // Offset that carries a shaped rest-pose point rigidly attached to joint j into the
    // posed frame. Exactly zero when the joint and its ancestors are unposed.
    Vec3 displacement(int j, const Vec3 &rest_point) const {
        const Vec3 origin = rest_positions.row(j).transpose();
        return (rotations[j] - Mat3::Identity()) * (rest_point - origin) + (positions.row(j).transpose() - origin);
    }
    Vec3 rest_to_posed(int j, const Vec3 &rest_point) const { return rest_point + displacement(j, rest_point); }
};

// Validated, immutable body model with precomputed topology.
class BodyModel {
  public:
    // Throws InputError naming the offending field when an invariant fails.
    explicit BodyModel(ModelDefinition def);

    const ModelDefinition &definition() const { return *def_; }

    int num_joints() const { return static_cast<int>(def_->joints.size()); }
    int num_vertices() const { return static_cast<int>(def_->template_vertices.rows()); }
    int num_keypoints() const { return static_cast<int>(def_->joint_regressor.rows()); }
    int pose_dim() const { return pose_dim_; }
    int shape_dim() const { return static_cast<int>(def_->shape_blendshapes.size()); }
    int root() const { return root_; }

    const Joint &joint(int j) const { return def_->joints[j]; }
    // Index of the joint's first DoF in the pose vector.
    int dof_offset(int j) const { return dof_offset_[j]; }
    const Dof &dof(int i) const { return *dof_table_[i]; }
    int dof_joint(int i) const { return dof_joint_[i]; }
    // Parents always precede children in this order.
    std::span<const int> topological_order() const { return order_; }
    std::optional<int> find_joint(std::string_view name) const;

    // Rest joint origins for shape beta.
    JointSet3D rest_joints(const ShapeVector &beta) const;
    // d(rest joint j)/d(beta_b), J x 3 per shape component.
    const std::vector<Eigen::MatrixX3d> &rest_joint_shape_dirs() const { return joint_shape_dirs_; }

    std::vector<Vec3> rotation_axes(int j) const;

    // Precomputed readout of the joint-regressor keypoints.
    const SkinnedReadout &keypoint_readout() const { return *keypoint_readout_; }

    void check_pose(const PoseVector &q) const;
    void check_shape(const ShapeVector &beta) const;

  private:
    std::shared_ptr<const ModelDefinition> def_;
    int pose_dim_ = 0;
    int root_ = -1;
    std::vector<int> dof_offset_;
    std::vector<const Dof *> dof_table_;
    std::vector<int> dof_joint_;
    std::vector<int> order_;
    JointSet3D rest_joints_;
    std::vector<Eigen::MatrixX3d> joint_shape_dirs_;
    std::shared_ptr<const SkinnedReadout> keypoint_readout_;
};

// Throws InputError describing the first violated invariant (cyclic tree, bad rows, ...).
void validate_model(const ModelDefinition &def);

// Rest-pose vertices: template + sum_b beta_b * blendshape_b.
Mesh shape_mesh(const BodyModel &model, const ShapeVector &beta);

Skeleton forward_kinematics(const BodyModel &model, const PoseVector &q, const ShapeVector &beta);

// Linear blend skinning of the shaped rest mesh.
Mesh skin_mesh(const BodyModel &model, const PoseVector &q, const ShapeVector &beta);
Mesh skin_mesh(const BodyModel &model, const Skeleton &skeleton, const Mesh &shaped);

// X = W M.
JointSet3D regress_joints(const BodyModel &model, const Mesh &mesh);

PoseVector clamp_to_limits(const BodyModel &model, const PoseVector &q);

// Local (parent-relative) rotation of every joint from its rotational DoFs.
std::vector<Mat3> local_rotations(const BodyModel &model, const PoseVector &q);

// Inverse of local_rotations: decompose per-joint rotations onto each joint's
// DoF axes. Root translation entries are left at zero.
PoseVector pose_from_local_rotations(const BodyModel &model, std::span<const Mat3> rotations);

} // namespace skelfit
