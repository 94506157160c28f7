#pragma once

#include "skelfit/body_model.h"

#include <filesystem>
#include <string>
#include <string_view>

namespace skelfit {

// Model-definition documents are JSON:
//
//   {
//     "format": "skelfit-model", "version": 1,
//     "joints": [{"name": str, "parent": int (-1 = root), "offset": [x, y, z],
//                 "dofs": [{"name": str, "type": "rotation" | "translation",
//                           "axis": [x, y, z], "lower": rad | null, "upper": rad | null}]}],
//     "template_vertices": [[x, y, z], ...],            // meters
//     "faces": [[i, j, k], ...],
//     "shape_blendshapes": [[[dx, dy, dz], ...], ...],  // B x N x 3
//     "skinning_weights": [row, ...],                    // N rows over J joints
//     "joint_regressor": [row, ...],                     // K rows over N vertices
//     "skeleton_regressor": [row, ...],                  // optional, J rows over N vertices
//     "keypoint_names": [str, ...],                      // optional
//     "pose_blendshapes": null                           // reserved, must be null or empty
//   }
//
// A matrix row is either a dense array or {"indices": [...], "values": [...]}.
inline constexpr int kModelFormatVersion = 1;

// Schema-level parse; throws InputError with the JSON path of the bad field.
ModelDefinition parse_model_definition(std::string_view document);
std::string serialize_model_definition(const ModelDefinition &def);

// Parse and validate.
BodyModel load_model(const std::filesystem::path &path);
void save_model_definition(const ModelDefinition &def, const std::filesystem::path &path);

} // namespace skelfit
