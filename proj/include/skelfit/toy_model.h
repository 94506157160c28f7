#pragma once

#include "skelfit/body_model.h"

namespace skelfit {

// Desk-scale biped used in place of licensed body-model assets.
//
// Layout (y up, facing +z, left = +x): a pelvis root with three translational and
// three rotational unbounded DoFs, a spine chain of (joint_count - 11) joints, a
// 2-DoF head, 3-DoF hips and shoulders, 1-DoF knees and elbows limited to
// [0, 3pi/4], and 2-DoF ankles. Every bone is a tube of rings with four vertices
// each; keypoints are ring centroids at each joint plus the head, foot and hand tips.
struct ToyModelSpec {
    int joint_count = 14;        // >= 13
    int vertices_per_bone = 16; // multiple of 4, >= 8
    int shape_dim = 10;
};

// Deterministic: the same spec always yields an identical model.
ModelDefinition make_toy_model_definition(const ToyModelSpec &spec = {});
BodyModel make_toy_model(const ToyModelSpec &spec = {});

} // namespace skelfit
