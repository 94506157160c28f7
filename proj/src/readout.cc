#include "skelfit/readout.h"

#include "skelfit/error.h"

namespace skelfit {

SkinnedReadout::SkinnedReadout(const BodyModel &model, const Eigen::MatrixXd *regressor) {
    const ModelDefinition &def = model.definition();
    const int J = model.num_joints();
    const int N = model.num_vertices();
    const Eigen::MatrixXd &w = def.skinning_weights;
    const Eigen::Index K = regressor ? regressor->rows() : N;

    c_ = regressor ? Eigen::MatrixXd(*regressor * w) : w;
    auto fold = [&](const Eigen::MatrixX3d &verts) {
        Eigen::MatrixXd out(K, 3 * J);
        for (int j = 0; j < J; ++j) {
            const Eigen::MatrixX3d weighted = verts.array().colwise() * w.col(j).array();
            if (regressor)
                out.middleCols<3>(3 * j) = *regressor * weighted;
            else
                out.middleCols<3>(3 * j) = weighted;
        }
        return out;
    };
    m0_ = fold(def.template_vertices);
    for (const auto &blend : def.shape_blendshapes)
        dm_.push_back(fold(blend));
}

SkinnedReadout SkinnedReadout::keypoints(const BodyModel &model) {
    return SkinnedReadout(model, &model.definition().joint_regressor);
}

SkinnedReadout SkinnedReadout::vertices(const BodyModel &model) { return SkinnedReadout(model, nullptr); }

Eigen::MatrixX3d SkinnedReadout::evaluate(const Skeleton &skeleton, const ShapeVector &beta) const {
    if (beta.size() != static_cast<Eigen::Index>(dm_.size()))
        throw InputError("shape vector has " + std::to_string(beta.size()) + " entries, readout expects " +
                         std::to_string(dm_.size()));
    const Eigen::Index J = c_.cols();
    Eigen::MatrixXd m = m0_;
    for (size_t b = 0; b < dm_.size(); ++b)
        m += beta[static_cast<Eigen::Index>(b)] * dm_[b];
    Eigen::MatrixX3d X = Eigen::MatrixX3d::Zero(c_.rows(), 3);
    for (Eigen::Index j = 0; j < J; ++j) {
        const Eigen::RowVector3d rest = skeleton.rest_positions.row(j);
        const Eigen::RowVector3d pos = skeleton.positions.row(j);
        Eigen::MatrixX3d local = m.middleCols<3>(3 * j) - c_.col(j) * rest;
        X.noalias() += local * skeleton.rotations[j].transpose();
        X.noalias() += c_.col(j) * pos;
    }
    return X;
}

SkinnedReadout::Gradient SkinnedReadout::backward(const BodyModel &model, const PoseVector &q,
                                                  const ShapeVector &beta, const Skeleton &skeleton,
                                                  const Eigen::MatrixX3d &G) const {
    const int J = model.num_joints();
    const int B = model.shape_dim();
    model.check_pose(q);
    model.check_shape(beta);
    if (G.rows() != c_.rows())
        throw InputError("readout gradient has " + std::to_string(G.rows()) + " rows, expected " +
                         std::to_string(c_.rows()));
    Eigen::MatrixXd m = m0_;
    for (int b = 0; b < B; ++b)
        m += beta[b] * dm_[b];

    // Per joint: a_j = sum_k Y_kj x G_k and b_j = sum_k c_kj G_k, where Y_kj is
    // joint j's contribution to point k. A rotation about a world axis w through
    // p_a moves every point contribution of the subtree of a by w x (Y - c p_a).
    std::vector<Vec3> a_sum(J), b_sum(J);
    std::vector<Eigen::MatrixX3d> GR(J);
    for (int j = 0; j < J; ++j) {
        const Eigen::RowVector3d rest = skeleton.rest_positions.row(j);
        const Eigen::RowVector3d pos = skeleton.positions.row(j);
        const Eigen::MatrixX3d local = m.middleCols<3>(3 * j) - c_.col(j) * rest;
        const Eigen::MatrixX3d Y = local * skeleton.rotations[j].transpose() + c_.col(j) * pos;
        a_sum[j] = Vec3(Y.col(1).dot(G.col(2)) - Y.col(2).dot(G.col(1)),
                        Y.col(2).dot(G.col(0)) - Y.col(0).dot(G.col(2)),
                        Y.col(0).dot(G.col(1)) - Y.col(1).dot(G.col(0)));
        b_sum[j] = G.transpose() * c_.col(j);
        GR[j] = G * skeleton.rotations[j];
    }
    const std::vector<Vec3> b_joint = b_sum;

    const auto order = model.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int parent = model.joint(*it).parent;
        if (parent != -1) {
            a_sum[parent] += a_sum[*it];
            b_sum[parent] += b_sum[*it];
        }
    }

    Gradient grad;
    grad.pose = Eigen::VectorXd::Zero(model.pose_dim());
    for (int j = 0; j < J; ++j) {
        const Joint &joint = model.joint(j);
        const Vec3 p = skeleton.positions.row(j).transpose();
        const Vec3 moment = a_sum[j] - p.cross(b_sum[j]);
        Mat3 frame = joint.parent == -1 ? Mat3::Identity() : skeleton.rotations[joint.parent];
        for (size_t d = 0; d < joint.dofs.size(); ++d) {
            const int idx = model.dof_offset(j) + static_cast<int>(d);
            const Dof &dof = joint.dofs[d];
            if (dof.kind == DofKind::translation) {
                grad.pose[idx] = dof.axis.dot(b_sum[j]);
            } else {
                grad.pose[idx] = (frame * dof.axis).dot(moment);
                frame = frame * axis_angle_rotation(dof.axis, q[idx]);
            }
        }
    }

    grad.shape = Eigen::VectorXd::Zero(B);
    const auto &joint_dirs = model.rest_joint_shape_dirs();
    Eigen::MatrixX3d dp(J, 3);
    for (int b = 0; b < B; ++b) {
        const Eigen::MatrixX3d &dJ = joint_dirs[b];
        double g = 0.0;
        for (int j : order) {
            const int parent = model.joint(j).parent;
            if (parent == -1)
                dp.row(j) = dJ.row(j);
            else
                dp.row(j) = dp.row(parent) + (dJ.row(j) - dJ.row(parent)) * skeleton.rotations[parent].transpose();
            const Vec3 dJj = dJ.row(j).transpose();
            g += (GR[j].array() * dm_[b].middleCols<3>(3 * j).array()).sum();
            g -= b_joint[j].dot(skeleton.rotations[j] * dJj);
            g += b_joint[j].dot(dp.row(j).transpose());
        }
        grad.shape[b] = g;
    }
    return grad;
}

} // namespace skelfit
