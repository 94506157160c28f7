#pragma once

#include "skelfit/body_model.h"
#include "skelfit/camera.h"
#include "skelfit/losses.h"

#include <Eigen/Core>
#include <vector>

namespace skelfit {

enum class ParamGroup { camera, root, pose, shape };

struct StageConfig {
    std::vector<ParamGroup> groups;
    int max_iterations = 200;
    // Stage ends when the objective drops by less than tolerance (relative) over
    // OptimizerSettings::convergence_window accepted iterations.
    double tolerance = 1e-6;
};

struct TermWeights {
    double data = 1.0;  // E_kp2D for keypoint fits, mean squared vertex distance for mesh fits
    double shape = 5e-3;
    double pose = 1e-2;
};

struct OptimizerSettings {
    int history = 10;          // L-BFGS memory
    int max_line_search = 40;  // backtracking halvings before giving up on a direction
    double armijo = 1e-4;
    int convergence_window = 5;
    double gradient_tolerance = 1e-10;
};

struct FitConfig {
    std::vector<StageConfig> stages;
    TermWeights weights;
    double sigma = 0.1;           // Geman-McClure scale, normalized image units
    double min_confidence = 0.3;  // keypoints below this are ignored
    OptimizerSettings optimizer;

    // Keypoint fitting: (camera + root) then everything.
    static FitConfig keypoint_defaults();
    // Mesh fitting: root then (root + pose + shape), with light priors.
    static FitConfig mesh_defaults();

    // Throws InputError on an empty stage list, negative weights or sigma <= 0.
    void validate() const;
};

struct FitState {
    PoseVector q;
    ShapeVector beta;
    WeakPerspectiveCamera camera;
};

struct ObjectiveTerms {
    double data = 0.0;
    double shape = 0.0;
    double pose = 0.0;
};

struct ObjectiveValue {
    ObjectiveTerms raw;       // unweighted E terms
    ObjectiveTerms weighted;  // lambda * E
    double total = 0.0;       // sum of the weighted terms
};

struct FitResult {
    FitState state;
    ObjectiveValue objective;
    ObjectiveValue initial_objective;
    bool converged = false;
    int iterations = 0;
    // Total objective at the start and after every accepted iterate.
    std::vector<double> history;
};

// rho(r) = r^2 sigma^2 / (r^2 + sigma^2)
double geman_mcclure(double r, double sigma);

double e_kp2d(const BodyModel &model, const PoseVector &q, const ShapeVector &beta, const WeakPerspectiveCamera &cam,
              const KeypointSet2D &keypoints, double sigma, double min_confidence = 0.0);
double e_shape(const ShapeVector &beta);
// sum over bounded DoFs of exp(l - q) + exp(q - u); missing limits contribute nothing.
double e_pose(const BodyModel &model, const PoseVector &q);
Eigen::VectorXd e_pose_gradient(const BodyModel &model, const PoseVector &q);

ObjectiveValue total_objective(const BodyModel &model, const FitState &state, const KeypointSet2D &keypoints,
                               const FitConfig &config);

// Gradient over every parameter, packed as [q | beta | scale, tx, ty].
struct ObjectiveGradient {
    ObjectiveValue value;
    Eigen::VectorXd gradient;
};
int parameter_count(const BodyModel &model);
Eigen::VectorXd pack_state(const FitState &state);
FitState unpack_state(const BodyModel &model, const Eigen::VectorXd &x);
// 1 for parameters in any of the groups, 0 otherwise.
Eigen::VectorXd group_mask(const BodyModel &model, const std::vector<ParamGroup> &groups);

// Masked entries of the gradient are exactly zero.
ObjectiveGradient objective_gradient(const BodyModel &model, const FitState &state, const KeypointSet2D &keypoints,
                                     const FitConfig &config, const std::vector<ParamGroup> &free_groups);

// Stage-wise descent on total_objective. Throws NumericalError if the objective at
// init is not finite.
FitResult fit(const BodyModel &model, const KeypointSet2D &keypoints, const FitState &init, const FitConfig &config);

// Mesh target: data term is the mean squared vertex distance. Camera is ignored.
ObjectiveValue mesh_objective(const BodyModel &model, const FitState &state, const Mesh &target,
                              const FitConfig &config);
ObjectiveGradient mesh_objective_gradient(const BodyModel &model, const FitState &state, const Mesh &target,
                                          const FitConfig &config, const std::vector<ParamGroup> &free_groups);
FitResult fit_to_mesh(const BodyModel &model, const Mesh &target, const FitState &init, const FitConfig &config);

// Mean Euclidean distance between corresponding vertices.
double mean_vertex_error(const Mesh &a, const Mesh &b);

FitState rest_state(const BodyModel &model);

// Weighted least-squares (s, t) mapping the model keypoints' (x, y) onto the
// observations; keypoints below min_confidence are ignored. Falls back to the
// ratio of spreads when the fitted scale is not positive.
WeakPerspectiveCamera estimate_camera(const BodyModel &model, const PoseVector &q, const ShapeVector &beta,
                                      const KeypointSet2D &keypoints, double min_confidence = 0.0);

} // namespace skelfit
