#include "skelfit/model_io.h"

#include "json_util.h"

namespace skelfit {

using namespace detail;

namespace {

Eigen::MatrixXd matrix_rows(const json &j, Eigen::Index cols, const std::string &path) {
    array(j, path);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(j.size()), cols);
    for (size_t r = 0; r < j.size(); ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        const json &row = j[r];
        if (row.is_array()) {
            if (static_cast<Eigen::Index>(row.size()) != cols)
                throw InputError(rp + ": expected " + std::to_string(cols) + " entries");
            for (size_t c = 0; c < row.size(); ++c)
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    number(row[c], rp + "[" + std::to_string(c) + "]");
        } else if (row.is_object()) {
            const json &idx = array(field(row, "indices", rp), rp + ".indices");
            const json &val = array(field(row, "values", rp), rp + ".values");
            if (idx.size() != val.size())
                throw InputError(rp + ": indices and values differ in length");
            for (size_t n = 0; n < idx.size(); ++n) {
                if (!idx[n].is_number_integer())
                    throw InputError(rp + ".indices[" + std::to_string(n) + "]: expected an integer");
                const auto c = idx[n].get<Eigen::Index>();
                if (c < 0 || c >= cols)
                    throw InputError(rp + ".indices[" + std::to_string(n) + "]: out of range");
                out(static_cast<Eigen::Index>(r), c) = number(val[n], rp + ".values[" + std::to_string(n) + "]");
            }
        } else {
            throw InputError(rp + ": expected a dense array or {indices, values}");
        }
    }
    return out;
}

json limit_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

json row_json(const Eigen::MatrixXd &M, Eigen::Index r) {
    // Sparse encoding when it is shorter.
    std::vector<Eigen::Index> idx;
    std::vector<double> val;
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        if (M(r, c) != 0.0) {
            idx.push_back(c);
            val.push_back(M(r, c));
        }
    }
    if (2 * static_cast<Eigen::Index>(idx.size()) < M.cols())
        return json{{"indices", idx}, {"values", val}};
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c)
        row.push_back(M(r, c));
    return row;
}

} // namespace

ModelDefinition parse_model_definition(std::string_view document) {
    const json doc = parse(document, "model document");
    const std::string root = "$";
    const json &format = field(doc, "format", root);
    if (!format.is_string() || format.get<std::string>() != "skelfit-model")
        throw InputError("$.format: expected \"skelfit-model\"");
    const json &version = field(doc, "version", root);
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
        throw InputError("$.version: unsupported version, expected " + std::to_string(kModelFormatVersion));

    ModelDefinition def;
    const json &joints = array(field(doc, "joints", root), "$.joints");
    for (size_t j = 0; j < joints.size(); ++j) {
        const std::string jp = "$.joints[" + std::to_string(j) + "]";
        const json &jj = joints[j];
        Joint joint;
        const json &name = field(jj, "name", jp);
        if (!name.is_string())
            throw InputError(jp + ".name: expected a string");
        joint.name = name.get<std::string>();
        const json &parent = field(jj, "parent", jp);
        if (!parent.is_number_integer())
            throw InputError(jp + ".parent: expected an integer");
        joint.parent = parent.get<int>();
        joint.rest_offset = vec3(field(jj, "offset", jp), jp + ".offset");
        const json &dofs = array(field(jj, "dofs", jp), jp + ".dofs");
        for (size_t d = 0; d < dofs.size(); ++d) {
            const std::string dp = jp + ".dofs[" + std::to_string(d) + "]";
            const json &dd = dofs[d];
            Dof dof;
            if (dd.contains("name") && dd.at("name").is_string())
                dof.name = dd.at("name").get<std::string>();
            const std::string type = dd.value("type", std::string("rotation"));
            if (type == "rotation")
                dof.kind = DofKind::rotation;
            else if (type == "translation")
                dof.kind = DofKind::translation;
            else
                throw InputError(dp + ".type: expected \"rotation\" or \"translation\"");
            dof.axis = vec3(field(dd, "axis", dp), dp + ".axis");
            if (dd.contains("lower") && !dd.at("lower").is_null())
                dof.lower = number(dd.at("lower"), dp + ".lower");
            if (dd.contains("upper") && !dd.at("upper").is_null())
                dof.upper = number(dd.at("upper"), dp + ".upper");
            joint.dofs.push_back(std::move(dof));
        }
        def.joints.push_back(std::move(joint));
    }

    def.template_vertices = points(field(doc, "template_vertices", root), "$.template_vertices");
    const auto N = def.template_vertices.rows();
    const auto J = static_cast<Eigen::Index>(def.joints.size());

    const json &faces = array(field(doc, "faces", root), "$.faces");
    def.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t f = 0; f < faces.size(); ++f) {
        const std::string fp = "$.faces[" + std::to_string(f) + "]";
        if (!faces[f].is_array() || faces[f].size() != 3)
            throw InputError(fp + ": expected [i, j, k]");
        for (int c = 0; c < 3; ++c) {
            if (!faces[f][c].is_number_integer())
                throw InputError(fp + ": expected integer vertex indices");
            def.faces(static_cast<Eigen::Index>(f), c) = faces[f][c].get<int>();
        }
    }

    const json &blends = array(field(doc, "shape_blendshapes", root), "$.shape_blendshapes");
    for (size_t b = 0; b < blends.size(); ++b)
        def.shape_blendshapes.push_back(points(blends[b], "$.shape_blendshapes[" + std::to_string(b) + "]"));

    def.skinning_weights = matrix_rows(field(doc, "skinning_weights", root), J, "$.skinning_weights");
    def.joint_regressor = matrix_rows(field(doc, "joint_regressor", root), N, "$.joint_regressor");
    if (doc.contains("skeleton_regressor") && !doc.at("skeleton_regressor").is_null())
        def.skeleton_regressor = matrix_rows(doc.at("skeleton_regressor"), N, "$.skeleton_regressor");
    if (doc.contains("keypoint_names") && !doc.at("keypoint_names").is_null()) {
        const json &names = array(doc.at("keypoint_names"), "$.keypoint_names");
        for (size_t k = 0; k < names.size(); ++k) {
            if (!names[k].is_string())
                throw InputError("$.keypoint_names[" + std::to_string(k) + "]: expected a string");
            def.keypoint_names.push_back(names[k].get<std::string>());
        }
    }
    if (doc.contains("pose_blendshapes")) {
        const json &pb = doc.at("pose_blendshapes");
        if (!pb.is_null() && !(pb.is_array() && pb.empty()))
            throw InputError("$.pose_blendshapes: pose-corrective blendshapes are not supported");
    }
    return def;
}

std::string serialize_model_definition(const ModelDefinition &def) {
    json doc;
    doc["format"] = "skelfit-model";
    doc["version"] = kModelFormatVersion;
    json joints = json::array();
    for (const Joint &joint : def.joints) {
        json dofs = json::array();
        for (const Dof &dof : joint.dofs) {
            dofs.push_back({{"name", dof.name},
                            {"type", dof.kind == DofKind::rotation ? "rotation" : "translation"},
                            {"axis", {dof.axis.x(), dof.axis.y(), dof.axis.z()}},
                            {"lower", limit_json(dof.lower)},
                            {"upper", limit_json(dof.upper)}});
        }
        joints.push_back({{"name", joint.name},
                          {"parent", joint.parent},
                          {"offset", {joint.rest_offset.x(), joint.rest_offset.y(), joint.rest_offset.z()}},
                          {"dofs", dofs}});
    }
    doc["joints"] = joints;
    doc["template_vertices"] = points_json(def.template_vertices);
    json faces = json::array();
    for (Eigen::Index f = 0; f < def.faces.rows(); ++f)
        faces.push_back({def.faces(f, 0), def.faces(f, 1), def.faces(f, 2)});
    doc["faces"] = faces;
    json blends = json::array();
    for (const auto &b : def.shape_blendshapes)
        blends.push_back(points_json(b));
    doc["shape_blendshapes"] = blends;
    auto rows = [](const Eigen::MatrixXd &M) {
        json out = json::array();
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            out.push_back(row_json(M, r));
        return out;
    };
    doc["skinning_weights"] = rows(def.skinning_weights);
    doc["joint_regressor"] = rows(def.joint_regressor);
    doc["skeleton_regressor"] = def.skeleton_regressor.size() ? rows(def.skeleton_regressor) : json(nullptr);
    doc["keypoint_names"] = def.keypoint_names;
    doc["pose_blendshapes"] = nullptr;
    return doc.dump();
}

BodyModel load_model(const std::filesystem::path &path) {
    return BodyModel(parse_model_definition(read_text_file(path)));
}

void save_model_definition(const ModelDefinition &def, const std::filesystem::path &path) {
    write_text_file(path, serialize_model_definition(def) + "\n");
}

} // namespace skelfit
