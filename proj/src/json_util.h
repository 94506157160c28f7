#pragma once

// Shared JSON plumbing for the file formats. Errors carry a JSON path.

#include "skelfit/error.h"
#include "skelfit/rotations.h"

#include <Eigen/Core>
#include <filesystem>
#include <json.hpp>
#include <string>

namespace skelfit::detail {

using nlohmann::json;

inline const json &field(const json &obj, const char *key, const std::string &path) {
    if (!obj.is_object() || !obj.contains(key))
        throw InputError(path + "." + key + ": missing");
    return obj.at(key);
}

inline bool has(const json &obj, const char *key) { return obj.is_object() && obj.contains(key) && !obj.at(key).is_null(); }

inline double number(const json &j, const std::string &path) {
    if (!j.is_number())
        throw InputError(path + ": expected a number");
    return j.get<double>();
}

inline int integer(const json &j, const std::string &path) {
    if (!j.is_number_integer())
        throw InputError(path + ": expected an integer");
    return j.get<int>();
}

inline std::string string(const json &j, const std::string &path) {
    if (!j.is_string())
        throw InputError(path + ": expected a string");
    return j.get<std::string>();
}

inline const json &array(const json &j, const std::string &path) {
    if (!j.is_array())
        throw InputError(path + ": expected an array");
    return j;
}

inline Eigen::VectorXd vector(const json &j, const std::string &path) {
    array(j, path);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

inline Vec3 vec3(const json &j, const std::string &path) {
    if (!j.is_array() || j.size() != 3)
        throw InputError(path + ": expected [x, y, z]");
    return Vec3(number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]"));
}

// K x C matrix from an array of C-element rows.
inline Eigen::MatrixXd rows(const json &j, Eigen::Index cols, const std::string &path) {
    array(j, path);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(j.size()), cols);
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
            throw InputError(rp + ": expected " + std::to_string(cols) + " numbers");
        for (Eigen::Index c = 0; c < cols; ++c)
            out(static_cast<Eigen::Index>(i), c) = number(j[i][static_cast<size_t>(c)], rp + "[" + std::to_string(c) + "]");
    }
    return out;
}

inline Eigen::MatrixX3d points(const json &j, const std::string &path) { return rows(j, 3, path); }

inline json vector_json(const Eigen::VectorXd &v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json rows_json(const Eigen::MatrixXd &M) {
    json out = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            row.push_back(M(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

inline json points_json(const Eigen::MatrixX3d &P) { return rows_json(P); }

inline json parse(std::string_view text, const std::string &what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(what + " is not valid JSON: " + e.what());
    }
}

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace skelfit::detail
