#pragma once

#include "skelfit/losses.h"
#include "skelfit/skelify.h"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skelfit {

// Parameters attached to a record: a pseudo-label or a regressor estimate.
struct ParamEstimate {
    PoseVector q;
    ShapeVector beta;
    std::optional<WeakPerspectiveCamera> camera;
    std::optional<double> objective;  // total fit objective when known
};

struct DatasetRecord {
    std::string example_id;
    std::string image_id;
    std::array<double, 4> bbox{};  // x, y, width, height in pixels
    std::optional<KeypointSet2D> keypoints2d;  // normalized to the box, within [-1.5, 1.5]
    std::optional<Eigen::MatrixX3d> keypoints3d;
    std::optional<ParamEstimate> pseudo_gt;
    std::optional<ParamEstimate> regressor_estimate;
    std::string provenance = "initial-conversion";  // or "refined-round-<k>"
};

// Dataset files are JSON Lines, one record per line:
//
//   {"version": 1, "example_id": str, "image_id": str, "bbox": [x, y, w, h],
//    "keypoints2d": {"points": [[x, y], ...], "confidence": [c, ...]} | null,
//    "keypoints3d": [[x, y, z], ...] | null,
//    "pseudo_gt": {"q": [...], "beta": [...], "camera": {...} | null, "objective": real | null} | null,
//    "regressor_estimate": same shape as pseudo_gt | null,
//    "provenance": "initial-conversion" | "refined-round-<k>"}
//
// Blank lines are ignored.
inline constexpr int kDatasetVersion = 1;

// Throws InputError naming the 1-based line number.
std::vector<DatasetRecord> parse_dataset(std::string_view text);
std::string serialize_dataset(const std::vector<DatasetRecord> &records);
std::vector<DatasetRecord> load_dataset(const std::filesystem::path &path);
void save_dataset(const std::vector<DatasetRecord> &records, const std::filesystem::path &path);

DatasetRecord parse_record(std::string_view line);
std::string serialize_record(const DatasetRecord &record);

// Checks record invariants that need no model: keypoint range and shapes.
void check_record(const DatasetRecord &record);

std::string refined_provenance(int round);
// Round number of a "refined-round-<k>" tag, 0 for "initial-conversion".
int provenance_round(std::string_view provenance);

} // namespace skelfit
