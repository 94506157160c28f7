#pragma once

#include "skelfit/body_model.h"

#include <Eigen/Core>
#include <vector>

namespace skelfit {

// Points that are fixed linear combinations of skinned vertices: keypoints
// (rows of the joint regressor) or the vertices themselves. The regressor and the
// skinning weights are folded together ahead of time, so a readout costs
// O(points x joints) per evaluation instead of a full skinning pass, and it can
// backpropagate a point-space gradient to pose and shape.
//
// For readout point k:  X_k = sum_j R_j (m_kj(beta) - c_kj J_j(beta)) + c_kj p_j
// with c_kj = sum_v A_kv w_vj and m_kj = sum_v A_kv w_vj v_v(beta).
class SkinnedReadout {
  public:
    // Rows of the model's joint regressor.
    static SkinnedReadout keypoints(const BodyModel &model);
    // Every mesh vertex.
    static SkinnedReadout vertices(const BodyModel &model);

    int size() const { return static_cast<int>(c_.rows()); }

    Eigen::MatrixX3d evaluate(const Skeleton &skeleton, const ShapeVector &beta) const;

    struct Gradient {
        Eigen::VectorXd pose;
        Eigen::VectorXd shape;
    };
    // Chain rule from dE/dX (size() x 3) to dE/dq and dE/dbeta.
    Gradient backward(const BodyModel &model, const PoseVector &q, const ShapeVector &beta,
                      const Skeleton &skeleton, const Eigen::MatrixX3d &grad_points) const;

  private:
    SkinnedReadout(const BodyModel &model, const Eigen::MatrixXd *regressor);

    Eigen::MatrixXd c_;                 // K x J
    Eigen::MatrixXd m0_;                // K x 3J, template part of m
    std::vector<Eigen::MatrixXd> dm_;   // per shape component, K x 3J
};

} // namespace skelfit
