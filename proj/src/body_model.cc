#include "skelfit/body_model.h"

#include "skelfit/error.h"
#include "skelfit/readout.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace skelfit {

namespace {

constexpr double kRowSumTol = 1e-6;

std::string joint_path(size_t j) { return "joints[" + std::to_string(j) + "]"; }

void check_row_stochastic(const Eigen::MatrixXd &M, const std::string &field, bool require_nonnegative) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        if (!M.row(r).allFinite())
            throw InputError(field + "[" + std::to_string(r) + "]: non-finite entry");
        if (require_nonnegative && M.row(r).minCoeff() < 0.0)
            throw InputError(field + "[" + std::to_string(r) + "]: negative weight");
        const double sum = M.row(r).sum();
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw InputError(field + "[" + std::to_string(r) + "]: row sums to " + std::to_string(sum) +
                             ", expected 1");
    }
}

} // namespace

void validate_model(const ModelDefinition &def) {
    const size_t J = def.joints.size();
    if (J == 0)
        throw InputError("joints: model has no joints");

    int roots = 0;
    std::set<std::string> names;
    for (size_t j = 0; j < J; ++j) {
        const Joint &joint = def.joints[j];
        if (!names.insert(joint.name).second)
            throw InputError(joint_path(j) + ".name: duplicate joint name '" + joint.name + "'");
        if (joint.parent == -1) {
            ++roots;
        } else if (joint.parent < 0 || static_cast<size_t>(joint.parent) >= J) {
            throw InputError(joint_path(j) + ".parent: index " + std::to_string(joint.parent) + " out of range");
        } else if (static_cast<size_t>(joint.parent) == j) {
            throw InputError(joint_path(j) + ".parent: joint is its own parent (cycle)");
        }
        if (!joint.rest_offset.allFinite())
            throw InputError(joint_path(j) + ".offset: non-finite");
        int n_rot = 0;
        int n_trans = 0;
        for (size_t d = 0; d < joint.dofs.size(); ++d) {
            const Dof &dof = joint.dofs[d];
            const std::string path = joint_path(j) + ".dofs[" + std::to_string(d) + "]";
            if (!dof.axis.allFinite() || std::abs(dof.axis.norm() - 1.0) > 1e-6)
                throw InputError(path + ".axis: not unit length");
            if (dof.lower && dof.upper && !(*dof.lower < *dof.upper))
                throw InputError(path + ": lower limit must be below upper limit");
            if (dof.kind == DofKind::translation) {
                if (joint.parent != -1)
                    throw InputError(path + ": translational DoFs are only supported on the root");
                ++n_trans;
            } else {
                ++n_rot;
            }
        }
        if (n_rot > 3)
            throw InputError(joint_path(j) + ".dofs: more than 3 rotational DoFs");
        if (n_trans > 3)
            throw InputError(joint_path(j) + ".dofs: more than 3 translational DoFs");
    }
    for (size_t j = 0; j < J; ++j) {
        size_t steps = 0;
        int cur = static_cast<int>(j);
        while (cur != -1) {
            if (++steps > J)
                throw InputError(joint_path(j) + ".parent: parent chain forms a cycle");
            cur = def.joints[cur].parent;
        }
    }

    if (roots != 1)
        throw InputError("joints: expected exactly one root (parent -1), found " + std::to_string(roots));

    const Eigen::Index N = def.template_vertices.rows();
    if (N == 0)
        throw InputError("template_vertices: empty");
    if (!def.template_vertices.allFinite())
        throw InputError("template_vertices: non-finite entry");
    for (Eigen::Index f = 0; f < def.faces.rows(); ++f) {
        if (def.faces.row(f).minCoeff() < 0 || def.faces.row(f).maxCoeff() >= N)
            throw InputError("faces[" + std::to_string(f) + "]: vertex index out of range");
    }
    for (size_t b = 0; b < def.shape_blendshapes.size(); ++b) {
        if (def.shape_blendshapes[b].rows() != N)
            throw InputError("shape_blendshapes[" + std::to_string(b) + "]: expected " + std::to_string(N) +
                             " vertices");
        if (!def.shape_blendshapes[b].allFinite())
            throw InputError("shape_blendshapes[" + std::to_string(b) + "]: non-finite entry");
    }
    if (def.skinning_weights.rows() != N || def.skinning_weights.cols() != static_cast<Eigen::Index>(J))
        throw InputError("skinning_weights: expected " + std::to_string(N) + " x " + std::to_string(J));
    check_row_stochastic(def.skinning_weights, "skinning_weights", true);
    if (def.joint_regressor.rows() == 0 || def.joint_regressor.cols() != N)
        throw InputError("joint_regressor: expected K x " + std::to_string(N) + " with K >= 1");
    check_row_stochastic(def.joint_regressor, "joint_regressor", false);
    if (def.skeleton_regressor.size() != 0) {
        if (def.skeleton_regressor.rows() != static_cast<Eigen::Index>(J) || def.skeleton_regressor.cols() != N)
            throw InputError("skeleton_regressor: expected " + std::to_string(J) + " x " + std::to_string(N));
        check_row_stochastic(def.skeleton_regressor, "skeleton_regressor", false);
    }
    if (!def.keypoint_names.empty() &&
        def.keypoint_names.size() != static_cast<size_t>(def.joint_regressor.rows()))
        throw InputError("keypoint_names: expected one name per joint_regressor row");
}

BodyModel::BodyModel(ModelDefinition def) {
    validate_model(def);
    def_ = std::make_shared<const ModelDefinition>(std::move(def));
    const ModelDefinition &d = *def_;
    const int J = num_joints();

    std::vector<std::vector<int>> children(J);
    for (int j = 0; j < J; ++j) {
        if (d.joints[j].parent == -1)
            root_ = j;
        else
            children[d.joints[j].parent].push_back(j);
    }
    order_.push_back(root_);
    for (size_t n = 0; n < order_.size(); ++n) {
        for (int c : children[order_[n]])
            order_.push_back(c);
    }

    dof_offset_.resize(J);
    for (int j = 0; j < J; ++j) {
        dof_offset_[j] = pose_dim_;
        for (const Dof &dof : d.joints[j].dofs) {
            dof_table_.push_back(&dof);
            dof_joint_.push_back(j);
        }
        pose_dim_ += static_cast<int>(d.joints[j].dofs.size());
    }

    rest_joints_.resize(J, 3);
    for (int j : order_) {
        const Joint &joint = d.joints[j];
        rest_joints_.row(j) = joint.rest_offset.transpose();
        if (joint.parent != -1)
            rest_joints_.row(j) += rest_joints_.row(joint.parent);
    }
    for (const auto &blend : d.shape_blendshapes) {
        if (d.skeleton_regressor.size() != 0)
            joint_shape_dirs_.push_back(d.skeleton_regressor * blend);
        else
            joint_shape_dirs_.push_back(Eigen::MatrixX3d::Zero(J, 3));
    }
    keypoint_readout_ = std::make_shared<const SkinnedReadout>(SkinnedReadout::keypoints(*this));
}

std::optional<int> BodyModel::find_joint(std::string_view name) const {
    for (int j = 0; j < num_joints(); ++j) {
        if (def_->joints[j].name == name)
            return j;
    }
    return std::nullopt;
}

JointSet3D BodyModel::rest_joints(const ShapeVector &beta) const {
    check_shape(beta);
    JointSet3D out = rest_joints_;
    for (int b = 0; b < shape_dim(); ++b)
        out += beta[b] * joint_shape_dirs_[b];
    return out;
}

std::vector<Vec3> BodyModel::rotation_axes(int j) const {
    std::vector<Vec3> axes;
    for (const Dof &dof : def_->joints[j].dofs) {
        if (dof.kind == DofKind::rotation)
            axes.push_back(dof.axis);
    }
    return axes;
}

void BodyModel::check_pose(const PoseVector &q) const {
    if (q.size() != pose_dim_)
        throw InputError("pose vector has " + std::to_string(q.size()) + " entries, model expects " +
                         std::to_string(pose_dim_));
}

void BodyModel::check_shape(const ShapeVector &beta) const {
    if (beta.size() != shape_dim())
        throw InputError("shape vector has " + std::to_string(beta.size()) + " entries, model expects " +
                         std::to_string(shape_dim()));
}

Mesh shape_mesh(const BodyModel &model, const ShapeVector &beta) {
    model.check_shape(beta);
    const ModelDefinition &def = model.definition();
    Mesh mesh{def.template_vertices};
    for (int b = 0; b < model.shape_dim(); ++b)
        mesh.vertices += beta[b] * def.shape_blendshapes[b];
    return mesh;
}

Skeleton forward_kinematics(const BodyModel &model, const PoseVector &q, const ShapeVector &beta) {
    model.check_pose(q);
    const int J = model.num_joints();
    Skeleton sk;
    sk.rest_positions = model.rest_joints(beta);
    sk.rotations.resize(J);
    sk.positions.resize(J, 3);
    const std::vector<Mat3> local = local_rotations(model, q);
    for (int j : model.topological_order()) {
        const Joint &joint = model.joint(j);
        if (joint.parent == -1) {
            Vec3 origin = sk.rest_positions.row(j).transpose();
            for (size_t d = 0; d < joint.dofs.size(); ++d) {
                if (joint.dofs[d].kind == DofKind::translation)
                    origin += q[model.dof_offset(j) + static_cast<int>(d)] * joint.dofs[d].axis;
            }
            sk.rotations[j] = local[j];
            sk.positions.row(j) = origin.transpose();
        } else {
            const int p = joint.parent;
            const Vec3 offset = (sk.rest_positions.row(j) - sk.rest_positions.row(p)).transpose();
            sk.rotations[j] = sk.rotations[p] * local[j];
            // Accumulate the displacement from the rest origin so an unposed chain stays exact.
            const Vec3 shift = (sk.positions.row(p) - sk.rest_positions.row(p)).transpose() +
                               (sk.rotations[p] - Mat3::Identity()) * offset;
            sk.positions.row(j) = sk.rest_positions.row(j) + shift.transpose();
        }
    }
    return sk;
}

Mesh skin_mesh(const BodyModel &model, const Skeleton &skeleton, const Mesh &shaped) {
    const ModelDefinition &def = model.definition();
    const int N = model.num_vertices();
    if (shaped.vertices.rows() != N)
        throw InputError("mesh has " + std::to_string(shaped.vertices.rows()) + " vertices, model expects " +
                         std::to_string(N));
    Mesh out{Eigen::MatrixX3d::Zero(N, 3)};
    for (int v = 0; v < N; ++v) {
        const Vec3 rest = shaped.vertices.row(v).transpose();
        Vec3 acc = Vec3::Zero();
        for (int j = 0; j < model.num_joints(); ++j) {
            const double w = def.skinning_weights(v, j);
            if (w != 0.0)
                acc += w * skeleton.displacement(j, rest);
        }
        out.vertices.row(v) = (rest + acc).transpose();
    }
    return out;
}

Mesh skin_mesh(const BodyModel &model, const PoseVector &q, const ShapeVector &beta) {
    return skin_mesh(model, forward_kinematics(model, q, beta), shape_mesh(model, beta));
}

JointSet3D regress_joints(const BodyModel &model, const Mesh &mesh) {
    const Eigen::MatrixXd &W = model.definition().joint_regressor;
    if (mesh.vertices.rows() != W.cols())
        throw InputError("mesh has " + std::to_string(mesh.vertices.rows()) + " vertices, regressor expects " +
                         std::to_string(W.cols()));
    return W * mesh.vertices;
}

PoseVector clamp_to_limits(const BodyModel &model, const PoseVector &q) {
    model.check_pose(q);
    PoseVector out = q;
    for (int i = 0; i < model.pose_dim(); ++i) {
        const Dof &dof = model.dof(i);
        if (dof.lower)
            out[i] = std::max(out[i], *dof.lower);
        if (dof.upper)
            out[i] = std::min(out[i], *dof.upper);
    }
    return out;
}

std::vector<Mat3> local_rotations(const BodyModel &model, const PoseVector &q) {
    model.check_pose(q);
    std::vector<Mat3> out(model.num_joints(), Mat3::Identity());
    for (int j = 0; j < model.num_joints(); ++j) {
        const Joint &joint = model.joint(j);
        for (size_t d = 0; d < joint.dofs.size(); ++d) {
            if (joint.dofs[d].kind == DofKind::rotation)
                out[j] = out[j] * axis_angle_rotation(joint.dofs[d].axis, q[model.dof_offset(j) + static_cast<int>(d)]);
        }
    }
    return out;
}

PoseVector pose_from_local_rotations(const BodyModel &model, std::span<const Mat3> rotations) {
    if (static_cast<int>(rotations.size()) != model.num_joints())
        throw InputError("expected one rotation per joint (" + std::to_string(model.num_joints()) + "), got " +
                         std::to_string(rotations.size()));
    PoseVector q = PoseVector::Zero(model.pose_dim());
    for (int j = 0; j < model.num_joints(); ++j) {
        const std::vector<Vec3> axes = model.rotation_axes(j);
        if (axes.empty())
            continue;
        const DofDecomposition dec = decompose_dof_rotation(rotations[j], axes);
        const Joint &joint = model.joint(j);
        size_t r = 0;
        for (size_t d = 0; d < joint.dofs.size(); ++d) {
            if (joint.dofs[d].kind == DofKind::rotation)
                q[model.dof_offset(j) + static_cast<int>(d)] = dec.angles[r++];
        }
    }
    return q;
}

} // namespace skelfit
