#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>

namespace skelfit {

// Triangle mesh in Wavefront OBJ form: "v x y z" and "f i j k" lines (1-based).
struct TriangleMesh {
    Eigen::MatrixX3d vertices;
    Eigen::MatrixX3i faces;  // 0-based
};

std::string write_obj(const TriangleMesh &mesh);
// Accepts v and f lines (f entries may carry /vt/vn suffixes, polygons are fanned);
// other statements are ignored. Throws InputError naming the line.
TriangleMesh read_obj(std::string_view text);

void save_obj(const TriangleMesh &mesh, const std::filesystem::path &path);
TriangleMesh load_obj(const std::filesystem::path &path);

} // namespace skelfit
