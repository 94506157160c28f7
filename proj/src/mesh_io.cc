#include "skelfit/mesh_io.h"

#include "json_util.h"
#include "skelfit/error.h"

#include <charconv>
#include <cstdio>
#include <vector>

namespace skelfit {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view s, size_t line_no) {
    // strtod needs a terminated buffer; tokens are short.
    const std::string buf(s);
    char *end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size())
        throw InputError("obj line " + std::to_string(line_no) + ": bad number '" + buf + "'");
    return v;
}

long parse_index(std::string_view s, size_t line_no, long vertex_count) {
    const std::string_view head = s.substr(0, s.find('/'));
    long v = 0;
    const auto [end, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
    if (ec != std::errc() || end != head.data() + head.size() || v == 0)
        throw InputError("obj line " + std::to_string(line_no) + ": bad face index '" + std::string(s) + "'");
    const long idx = v > 0 ? v - 1 : vertex_count + v;
    if (idx < 0 || idx >= vertex_count)
        throw InputError("obj line " + std::to_string(line_no) + ": face index out of range");
    return idx;
}

} // namespace

std::string write_obj(const TriangleMesh &mesh) {
    std::string out;
    char buf[128];
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", mesh.vertices(v, 0), mesh.vertices(v, 1),
                      mesh.vertices(v, 2));
        out += buf;
    }
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", mesh.faces(f, 0) + 1, mesh.faces(f, 1) + 1, mesh.faces(f, 2) + 1);
        out += buf;
    }
    return out;
}

TriangleMesh read_obj(std::string_view text) {
    std::vector<Eigen::Vector3d> verts;
    std::vector<Eigen::Vector3i> faces;
    size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        const auto tok = tokens(line);
        if (tok.empty())
            continue;
        if (tok[0] == "v") {
            if (tok.size() < 4)
                throw InputError("obj line " + std::to_string(line_no) + ": vertex needs three coordinates");
            verts.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                               parse_double(tok[3], line_no));
        } else if (tok[0] == "f") {
            if (tok.size() < 4)
                throw InputError("obj line " + std::to_string(line_no) + ": face needs at least three vertices");
            const long n = static_cast<long>(verts.size());
            const int first = static_cast<int>(parse_index(tok[1], line_no, n));
            int prev = static_cast<int>(parse_index(tok[2], line_no, n));
            for (size_t k = 3; k < tok.size(); ++k) {
                const int cur = static_cast<int>(parse_index(tok[k], line_no, n));
                faces.emplace_back(first, prev, cur);
                prev = cur;
            }
        }
    }
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i)
        mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t i = 0; i < faces.size(); ++i)
        mesh.faces.row(static_cast<Eigen::Index>(i)) = faces[i].transpose();
    return mesh;
}

void save_obj(const TriangleMesh &mesh, const std::filesystem::path &path) {
    detail::write_text_file(path, write_obj(mesh));
}

TriangleMesh load_obj(const std::filesystem::path &path) {
    try {
        return read_obj(detail::read_text_file(path));
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace skelfit
