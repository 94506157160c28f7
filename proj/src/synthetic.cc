#include "skelfit/synthetic.h"

#include "skelfit/error.h"
#include "skelfit/readout.h"

#include <algorithm>
#include <cstdio>

namespace skelfit {

FitState sample_state(const BodyModel &model, std::mt19937_64 &rng, const SyntheticOptions &opts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n(0.0, opts.shape_sigma);
    FitState s = rest_state(model);
    for (int i = 0; i < model.pose_dim(); ++i) {
        const Dof &dof = model.dof(i);
        if (dof.kind == DofKind::translation)
            continue;
        if (dof.lower && dof.upper) {
            const double mid = 0.5 * (*dof.lower + *dof.upper);
            const double half = 0.5 * opts.limit_fraction * (*dof.upper - *dof.lower);
            s.q[i] = mid + half * u(rng);
        } else if (dof.lower || dof.upper) {
            const double edge = dof.lower ? *dof.lower : *dof.upper;
            const double dir = dof.lower ? 1.0 : -1.0;
            s.q[i] = edge + dir * 0.5 * opts.root_rotation * (u(rng) + 1.0);
        } else {
            s.q[i] = opts.root_rotation * u(rng);
        }
    }
    for (auto &b : s.beta)
        b = n(rng);
    const Eigen::MatrixX3d rest = model.rest_joints(ShapeVector::Zero(model.shape_dim()));
    const Eigen::Vector2d center = 0.5 * (rest.colwise().minCoeff() + rest.colwise().maxCoeff()).head<2>().transpose();
    s.camera.scale = opts.camera_scale;
    s.camera.translation = -opts.camera_scale * center;
    return s;
}

PoseVector perturb_pose(const BodyModel &model, const PoseVector &q, std::mt19937_64 &rng, double amplitude) {
    model.check_pose(q);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    PoseVector out = q;
    for (int i = 0; i < model.pose_dim(); ++i) {
        if (model.dof(i).kind == DofKind::rotation)
            out[i] += u(rng);
    }
    return out;
}

KeypointSet2D render_keypoints(const BodyModel &model, const FitState &state) {
    const Skeleton sk = forward_kinematics(model, state.q, state.beta);
    const Eigen::MatrixX3d X = model.keypoint_readout().evaluate(sk, state.beta);
    return KeypointSet2D{project(state.camera, X), Eigen::VectorXd::Ones(X.rows())};
}

std::vector<DatasetRecord> make_synthetic_dataset(const BodyModel &model, int count, std::uint64_t seed,
                                                  const SyntheticDatasetOptions &opts) {
    if (count < 0)
        throw InputError("synthetic dataset: negative record count");
    std::vector<int> bounded;
    for (int i = 0; i < model.pose_dim(); ++i) {
        if (model.dof(i).lower && model.dof(i).upper)
            bounded.push_back(i);
    }
    std::vector<DatasetRecord> out;
    out.reserve(static_cast<size_t>(count));
    for (int n = 0; n < count; ++n) {
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const FitState truth = sample_state(model, rng, opts.state);

        DatasetRecord r;
        char id[32];
        std::snprintf(id, sizeof id, "synthetic-%06d", n);
        r.example_id = id;
        r.image_id = "none/" + r.example_id;
        r.bbox = {0.0, 0.0, 256.0, 256.0};
        r.keypoints2d = render_keypoints(model, truth);
        if (r.keypoints2d->points.cwiseAbs().maxCoeff() > 1.5)
            throw NumericalError("synthetic dataset: keypoints leave the normalized box; lower the camera scale");
        r.keypoints3d = model.keypoint_readout().evaluate(forward_kinematics(model, truth.q, truth.beta), truth.beta);

        WeakPerspectiveCamera cam = truth.camera;
        cam.scale *= 1.0 + 0.2 * (u(rng) - 0.5);
        cam.translation += Eigen::Vector2d(0.1 * (u(rng) - 0.5), 0.1 * (u(rng) - 0.5));
        r.regressor_estimate = ParamEstimate{perturb_pose(model, truth.q, rng, opts.regressor_noise),
                                             ShapeVector::Zero(model.shape_dim()), cam, std::nullopt};

        PoseVector label = perturb_pose(model, truth.q, rng, opts.pseudo_gt_noise);
        if (u(rng) < opts.corruption_fraction && !bounded.empty()) {
            std::vector<int> pick = bounded;
            std::shuffle(pick.begin(), pick.end(), rng);
            pick.resize(std::min<size_t>(pick.size(), static_cast<size_t>(std::max(opts.corrupted_dofs, 0))));
            for (int i : pick) {
                const Dof &d = model.dof(i);
                label[i] = u(rng) < 0.5 ? *d.lower - opts.corruption_excess : *d.upper + opts.corruption_excess;
            }
        }
        r.pseudo_gt = ParamEstimate{label, ShapeVector::Zero(model.shape_dim()), std::nullopt, std::nullopt};
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace skelfit
