#pragma once

#include "skelfit/body_model.h"
#include "skelfit/dataset.h"
#include "skelfit/losses.h"
#include "skelfit/skelify.h"

#include <random>

namespace skelfit {

// Seeded generators for self-consistency experiments. All randomness comes from
// the caller's engine.

struct SyntheticOptions {
    double limit_fraction = 0.8;   // bounded DoFs are drawn from this central fraction of their range
    double root_rotation = 0.5;    // unbounded root rotations drawn from [-r, r]
    double shape_sigma = 0.5;      // beta* ~ N(0, sigma^2)
    double camera_scale = 1.0;     // weak-perspective scale of the true camera
};

// Ground-truth state within limits. Translations stay at zero; the camera centers
// the rest skeleton in the normalized image.
FitState sample_state(const BodyModel &model, std::mt19937_64 &rng, const SyntheticOptions &opts = {});

// Adds uniform noise in [-amplitude, amplitude] to every rotational DoF.
PoseVector perturb_pose(const BodyModel &model, const PoseVector &q, std::mt19937_64 &rng, double amplitude);

// Noise-free projected keypoints with unit confidence.
KeypointSet2D render_keypoints(const BodyModel &model, const FitState &state);

struct SyntheticDatasetOptions {
    SyntheticOptions state;
    double regressor_noise = 0.3;      // rad, uniform per rotational DoF
    double pseudo_gt_noise = 0.1;      // rad, for clean initial pseudo-labels
    double corruption_fraction = 0.25; // share of records whose pseudo-label violates joint limits
    double corruption_excess = 0.6;    // rad past the nearest limit for corrupted DoFs
    int corrupted_dofs = 4;
};

// Records with exact keypoints of a sampled ground truth, a noisy regressor
// estimate and an "initial-conversion" pseudo-label. Corrupted labels push a few
// bounded DoFs past their limits. Records are reproducible from (seed, index).
std::vector<DatasetRecord> make_synthetic_dataset(const BodyModel &model, int count, std::uint64_t seed,
                                                  const SyntheticDatasetOptions &opts = {});

} // namespace skelfit
