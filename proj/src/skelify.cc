#include "skelfit/skelify.h"

#include "skelfit/error.h"
#include "skelfit/readout.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

namespace skelfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective and (masked) gradient at a packed parameter vector. Returns +inf for
// states outside the domain (non-positive camera scale).
using Evaluator = std::function<double(const Eigen::VectorXd &x, Eigen::VectorXd *grad)>;

struct StageOutcome {
    bool converged = false;
    int iterations = 0;
};

// L-BFGS with backtracking (Armijo) line search. Only steps that lower the
// objective are accepted; `history` receives the objective after each one.
StageOutcome minimize(const Evaluator &eval, Eigen::VectorXd &x, double &f, const StageConfig &stage,
                      const OptimizerSettings &opt, std::vector<double> &history) {
    StageOutcome out;
    Eigen::VectorXd g(x.size());
    f = eval(x, &g);
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
    std::vector<double> stage_values{f};

    for (int it = 0; it < stage.max_iterations; ++it) {
        if (g.norm() <= opt.gradient_tolerance) {
            out.converged = true;
            return out;
        }
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd d;
            if (memory.empty()) {
                // No curvature information yet: a short steepest-descent probe.
                d = -g * (0.1 / g.lpNorm<Eigen::Infinity>());
            } else {
                Eigen::VectorXd r = -g;
                std::vector<double> alpha(memory.size());
                for (size_t m = memory.size(); m-- > 0;) {
                    const auto &[s, y] = memory[m];
                    alpha[m] = s.dot(r) / y.dot(s);
                    r -= alpha[m] * y;
                }
                const auto &[s_last, y_last] = memory.back();
                r *= s_last.dot(y_last) / y_last.squaredNorm();
                for (size_t m = 0; m < memory.size(); ++m) {
                    const auto &[s, y] = memory[m];
                    const double beta = y.dot(r) / y.dot(s);
                    r += (alpha[m] - beta) * s;
                }
                d = r;
            }
            const double slope = g.dot(d);
            if (!(slope < 0.0)) {
                memory.clear();
                continue;
            }
            double step = 1.0;
            for (int ls = 0; ls < opt.max_line_search; ++ls, step *= 0.5) {
                const Eigen::VectorXd x_new = x + step * d;
                Eigen::VectorXd g_new(x.size());
                const double f_new = eval(x_new, &g_new);
                if (std::isfinite(f_new) && f_new < f && f_new <= f + opt.armijo * step * slope) {
                    const Eigen::VectorXd s = x_new - x;
                    const Eigen::VectorXd y = g_new - g;
                    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
                        memory.emplace_back(s, y);
                        if (static_cast<int>(memory.size()) > opt.history)
                            memory.pop_front();
                    }
                    x = x_new;
                    f = f_new;
                    g = g_new;
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                memory.clear();
        }
        if (!accepted) {
            // No descent possible at working precision.
            out.converged = true;
            return out;
        }
        ++out.iterations;
        history.push_back(f);
        stage_values.push_back(f);
        const int window = opt.convergence_window;
        if (static_cast<int>(stage_values.size()) > window) {
            const double f_old = stage_values[stage_values.size() - 1 - window];
            if (f_old - f <= stage.tolerance * std::abs(f_old)) {
                out.converged = true;
                return out;
            }
        }
    }
    out.converged = g.norm() <= opt.gradient_tolerance;
    return out;
}

ObjectiveValue combine(const ObjectiveTerms &raw, const TermWeights &w) {
    ObjectiveValue v;
    v.raw = raw;
    v.weighted = {w.data * raw.data, w.shape * raw.shape, w.pose * raw.pose};
    v.total = v.weighted.data + v.weighted.shape + v.weighted.pose;
    return v;
}

void check_state(const BodyModel &model, const FitState &state) {
    model.check_pose(state.q);
    model.check_shape(state.beta);
}

void check_keypoint_count(const BodyModel &model, const KeypointSet2D &keypoints) {
    check_keypoints(keypoints);
    if (keypoints.size() != model.num_keypoints())
        throw InputError("got " + std::to_string(keypoints.size()) + " keypoints, model regresses " +
                         std::to_string(model.num_keypoints()));
}

struct Kp2dEval {
    double value = 0.0;
    Points2D grad;  // dE/dx, only when requested
};

Kp2dEval kp2d_term(const Points2D &projected, const KeypointSet2D &keypoints, double sigma, double min_confidence,
                   bool want_grad) {
    Kp2dEval out;
    const double s2 = sigma * sigma;
    if (want_grad)
        out.grad = Points2D::Zero(projected.rows(), 2);
    for (Eigen::Index k = 0; k < projected.rows(); ++k) {
        const double conf = keypoints.confidence[k];
        if (conf <= 0.0 || conf < min_confidence)
            continue;
        const Eigen::RowVector2d diff = projected.row(k) - keypoints.points.row(k);
        const double u = diff.squaredNorm();
        out.value += conf * u * s2 / (u + s2);
        if (want_grad)
            out.grad.row(k) = conf * 2.0 * s2 * s2 / ((u + s2) * (u + s2)) * diff;
    }
    return out;
}

ObjectiveGradient keypoint_objective(const BodyModel &model, const FitState &state, const KeypointSet2D &keypoints,
                                     const FitConfig &config, const Eigen::VectorXd *mask) {
    const Skeleton sk = forward_kinematics(model, state.q, state.beta);
    const SkinnedReadout &readout = model.keypoint_readout();
    const Eigen::MatrixX3d X = readout.evaluate(sk, state.beta);
    const Points2D x = project(state.camera, X);
    const Kp2dEval kp = kp2d_term(x, keypoints, config.sigma, config.min_confidence, mask != nullptr);

    ObjectiveGradient out;
    out.value = combine({kp.value, e_shape(state.beta), e_pose(model, state.q)}, config.weights);
    if (!mask)
        return out;

    const TermWeights &w = config.weights;
    const ProjectionGradient pg = project_backward(state.camera, X, kp.grad);
    const SkinnedReadout::Gradient rg = readout.backward(model, state.q, state.beta, sk, pg.points);
    const int D = model.pose_dim();
    const int B = model.shape_dim();
    out.gradient.resize(parameter_count(model));
    out.gradient.head(D) = w.data * rg.pose + w.pose * e_pose_gradient(model, state.q);
    out.gradient.segment(D, B) = w.data * rg.shape + w.shape * 2.0 * state.beta;
    out.gradient[D + B] = w.data * pg.scale;
    out.gradient.tail<2>() = w.data * pg.translation;
    out.gradient = out.gradient.cwiseProduct(*mask);
    return out;
}

ObjectiveGradient vertex_objective(const BodyModel &model, const SkinnedReadout &readout, const FitState &state,
                                   const Mesh &target, const FitConfig &config, const Eigen::VectorXd *mask) {
    const Skeleton sk = forward_kinematics(model, state.q, state.beta);
    const Eigen::MatrixX3d V = readout.evaluate(sk, state.beta);
    const Eigen::MatrixX3d diff = V - target.vertices;
    const double n = static_cast<double>(V.rows());

    ObjectiveGradient out;
    out.value = combine({diff.squaredNorm() / n, e_shape(state.beta), e_pose(model, state.q)}, config.weights);
    if (!mask)
        return out;

    const TermWeights &w = config.weights;
    const SkinnedReadout::Gradient rg = readout.backward(model, state.q, state.beta, sk, (2.0 / n) * diff);
    const int D = model.pose_dim();
    const int B = model.shape_dim();
    out.gradient = Eigen::VectorXd::Zero(parameter_count(model));
    out.gradient.head(D) = w.data * rg.pose + w.pose * e_pose_gradient(model, state.q);
    out.gradient.segment(D, B) = w.data * rg.shape + w.shape * 2.0 * state.beta;
    out.gradient = out.gradient.cwiseProduct(*mask);
    return out;
}

template <typename Objective>
FitResult run_stages(const BodyModel &model, const FitState &init, const FitConfig &config, Objective objective) {
    FitResult result;
    result.initial_objective = objective(init, nullptr).value;
    if (!std::isfinite(result.initial_objective.total))
        throw NumericalError("objective at the initial state is not finite");
    result.history.push_back(result.initial_objective.total);

    Eigen::VectorXd x = pack_state(init);
    double f = result.initial_objective.total;
    result.converged = true;
    for (const StageConfig &stage : config.stages) {
        const Eigen::VectorXd mask = group_mask(model, stage.groups);
        const Evaluator eval = [&](const Eigen::VectorXd &xv, Eigen::VectorXd *grad) {
            const FitState s = unpack_state(model, xv);
            if (!(s.camera.scale > 0.0) || !xv.allFinite())
                return kInf;
            const ObjectiveGradient og = objective(s, grad ? &mask : nullptr);
            if (grad)
                *grad = og.gradient;
            return og.value.total;
        };
        const StageOutcome o = minimize(eval, x, f, stage, config.optimizer, result.history);
        result.iterations += o.iterations;
        result.converged = result.converged && o.converged;
    }
    result.state = unpack_state(model, x);
    result.objective = objective(result.state, nullptr).value;
    return result;
}

} // namespace

FitConfig FitConfig::keypoint_defaults() {
    FitConfig c;
    c.stages = {{{ParamGroup::camera, ParamGroup::root}, 200, 1e-6},
                {{ParamGroup::camera, ParamGroup::root, ParamGroup::pose, ParamGroup::shape}, 1000, 1e-6}};
    c.weights = {1.0, 5e-3, 1e-2};
    return c;
}

FitConfig FitConfig::mesh_defaults() {
    FitConfig c;
    c.stages = {{{ParamGroup::root}, 200, 1e-6}, {{ParamGroup::root, ParamGroup::pose, ParamGroup::shape}, 2000, 1e-7}};
    c.weights = {1.0, 1e-6, 1e-6};
    return c;
}

void FitConfig::validate() const {
    if (stages.empty())
        throw InputError("fit config: at least one stage is required");
    for (size_t s = 0; s < stages.size(); ++s) {
        if (stages[s].groups.empty())
            throw InputError("fit config: stage " + std::to_string(s) + " frees no parameter groups");
        if (stages[s].max_iterations < 0 || !(stages[s].tolerance >= 0.0))
            throw InputError("fit config: stage " + std::to_string(s) + " has invalid limits");
    }
    if (!(weights.data >= 0.0 && weights.shape >= 0.0 && weights.pose >= 0.0))
        throw InputError("fit config: term weights must be non-negative");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InputError("fit config: sigma must be positive");
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
        throw InputError("fit config: min_confidence must lie in [0, 1]");
    if (optimizer.history < 1 || optimizer.max_line_search < 1 || optimizer.convergence_window < 1 ||
        !(optimizer.armijo > 0.0 && optimizer.armijo < 1.0))
        throw InputError("fit config: invalid optimizer settings");
}

double geman_mcclure(double r, double sigma) {
    const double r2 = r * r;
    const double s2 = sigma * sigma;
    if (std::isinf(r2))
        return s2;
    return r2 * s2 / (r2 + s2);
}

double e_kp2d(const BodyModel &model, const PoseVector &q, const ShapeVector &beta, const WeakPerspectiveCamera &cam,
              const KeypointSet2D &keypoints, double sigma, double min_confidence) {
    check_keypoint_count(model, keypoints);
    if (!(sigma > 0.0))
        throw InputError("sigma must be positive");
    const Skeleton sk = forward_kinematics(model, q, beta);
    const Points2D x = project(cam, model.keypoint_readout().evaluate(sk, beta));
    return kp2d_term(x, keypoints, sigma, min_confidence, false).value;
}

double e_shape(const ShapeVector &beta) { return beta.squaredNorm(); }

double e_pose(const BodyModel &model, const PoseVector &q) {
    model.check_pose(q);
    double sum = 0.0;
    for (int i = 0; i < model.pose_dim(); ++i) {
        const Dof &dof = model.dof(i);
        if (dof.lower)
            sum += std::exp(*dof.lower - q[i]);
        if (dof.upper)
            sum += std::exp(q[i] - *dof.upper);
    }
    return sum;
}

Eigen::VectorXd e_pose_gradient(const BodyModel &model, const PoseVector &q) {
    model.check_pose(q);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.pose_dim());
    for (int i = 0; i < model.pose_dim(); ++i) {
        const Dof &dof = model.dof(i);
        if (dof.lower)
            g[i] -= std::exp(*dof.lower - q[i]);
        if (dof.upper)
            g[i] += std::exp(q[i] - *dof.upper);
    }
    return g;
}

ObjectiveValue total_objective(const BodyModel &model, const FitState &state, const KeypointSet2D &keypoints,
                               const FitConfig &config) {
    config.validate();
    check_state(model, state);
    check_keypoint_count(model, keypoints);
    return keypoint_objective(model, state, keypoints, config, nullptr).value;
}

int parameter_count(const BodyModel &model) { return model.pose_dim() + model.shape_dim() + 3; }

Eigen::VectorXd pack_state(const FitState &state) {
    Eigen::VectorXd x(state.q.size() + state.beta.size() + 3);
    x << state.q, state.beta, state.camera.scale, state.camera.translation;
    return x;
}

FitState unpack_state(const BodyModel &model, const Eigen::VectorXd &x) {
    if (x.size() != parameter_count(model))
        throw InputError("packed state has wrong size");
    const int D = model.pose_dim();
    const int B = model.shape_dim();
    FitState s;
    s.q = x.head(D);
    s.beta = x.segment(D, B);
    s.camera.scale = x[D + B];
    s.camera.translation = x.tail<2>();
    return s;
}

Eigen::VectorXd group_mask(const BodyModel &model, const std::vector<ParamGroup> &groups) {
    const int D = model.pose_dim();
    const int B = model.shape_dim();
    Eigen::VectorXd mask = Eigen::VectorXd::Zero(parameter_count(model));
    for (ParamGroup g : groups) {
        switch (g) {
        case ParamGroup::camera:
            mask.tail<3>().setOnes();
            break;
        case ParamGroup::shape:
            mask.segment(D, B).setOnes();
            break;
        case ParamGroup::root:
        case ParamGroup::pose:
            for (int i = 0; i < D; ++i) {
                const bool is_root = model.dof_joint(i) == model.root();
                if (is_root == (g == ParamGroup::root))
                    mask[i] = 1.0;
            }
            break;
        }
    }
    return mask;
}

ObjectiveGradient objective_gradient(const BodyModel &model, const FitState &state, const KeypointSet2D &keypoints,
                                     const FitConfig &config, const std::vector<ParamGroup> &free_groups) {
    config.validate();
    check_state(model, state);
    check_keypoint_count(model, keypoints);
    check_camera(state.camera);
    const Eigen::VectorXd mask = group_mask(model, free_groups);
    return keypoint_objective(model, state, keypoints, config, &mask);
}

FitResult fit(const BodyModel &model, const KeypointSet2D &keypoints, const FitState &init, const FitConfig &config) {
    config.validate();
    check_state(model, init);
    check_keypoint_count(model, keypoints);
    check_camera(init.camera);
    return run_stages(model, init, config, [&](const FitState &s, const Eigen::VectorXd *mask) {
        return keypoint_objective(model, s, keypoints, config, mask);
    });
}

namespace {

void check_mesh_target(const BodyModel &model, const Mesh &target) {
    if (target.vertices.rows() != model.num_vertices())
        throw InputError("target mesh has " + std::to_string(target.vertices.rows()) + " vertices, model has " +
                         std::to_string(model.num_vertices()));
    if (!target.vertices.allFinite())
        throw InputError("target mesh has non-finite vertices");
}

} // namespace

ObjectiveValue mesh_objective(const BodyModel &model, const FitState &state, const Mesh &target,
                              const FitConfig &config) {
    config.validate();
    check_state(model, state);
    check_mesh_target(model, target);
    return vertex_objective(model, SkinnedReadout::vertices(model), state, target, config, nullptr).value;
}

ObjectiveGradient mesh_objective_gradient(const BodyModel &model, const FitState &state, const Mesh &target,
                                          const FitConfig &config, const std::vector<ParamGroup> &free_groups) {
    config.validate();
    check_state(model, state);
    check_mesh_target(model, target);
    const Eigen::VectorXd mask = group_mask(model, free_groups);
    return vertex_objective(model, SkinnedReadout::vertices(model), state, target, config, &mask);
}

FitResult fit_to_mesh(const BodyModel &model, const Mesh &target, const FitState &init, const FitConfig &config) {
    config.validate();
    check_state(model, init);
    check_mesh_target(model, target);
    const SkinnedReadout readout = SkinnedReadout::vertices(model);
    return run_stages(model, init, config, [&](const FitState &s, const Eigen::VectorXd *mask) {
        return vertex_objective(model, readout, s, target, config, mask);
    });
}

double mean_vertex_error(const Mesh &a, const Mesh &b) {
    if (a.vertices.rows() != b.vertices.rows())
        throw InputError("meshes differ in vertex count");
    if (a.vertices.rows() == 0)
        return 0.0;
    return (a.vertices - b.vertices).rowwise().norm().mean();
}

WeakPerspectiveCamera estimate_camera(const BodyModel &model, const PoseVector &q, const ShapeVector &beta,
                                      const KeypointSet2D &keypoints, double min_confidence) {
    check_keypoint_count(model, keypoints);
    const Eigen::MatrixX3d X = model.keypoint_readout().evaluate(forward_kinematics(model, q, beta), beta);
    Eigen::VectorXd w = keypoints.confidence;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (w[k] < min_confidence)
            w[k] = 0.0;
    }
    const double total = w.sum();
    if (!(total > 0.0))
        throw InputError("estimate_camera: no keypoint passes the confidence cut");
    const Eigen::RowVector2d mc = (w.asDiagonal() * X.leftCols<2>()).colwise().sum() / total;
    const Eigen::RowVector2d oc = (w.asDiagonal() * keypoints.points).colwise().sum() / total;
    const Eigen::MatrixX2d dm = X.leftCols<2>().rowwise() - mc;
    const Eigen::MatrixX2d dx = keypoints.points.rowwise() - oc;
    const double model_spread = (w.asDiagonal() * dm.rowwise().squaredNorm()).sum();
    if (!(model_spread > 0.0))
        throw NumericalError("estimate_camera: model keypoints are coincident in the image plane");
    double s = (w.asDiagonal() * (dm.array() * dx.array()).matrix()).sum() / model_spread;
    if (!(s > 0.0)) {
        const double obs_spread = (w.asDiagonal() * dx.rowwise().squaredNorm()).sum();
        s = obs_spread > 0.0 ? std::sqrt(obs_spread / model_spread) : 1.0;
    }
    WeakPerspectiveCamera cam;
    cam.scale = s;
    cam.translation = (oc - s * mc).transpose();
    return cam;
}

FitState rest_state(const BodyModel &model) {
    return FitState{PoseVector::Zero(model.pose_dim()), ShapeVector::Zero(model.shape_dim()), {}};
}

} // namespace skelfit
