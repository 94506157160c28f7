#include "skelfit/dataset.h"

#include "json_util.h"

#include <charconv>

namespace skelfit {

using namespace detail;

namespace {

constexpr double kKeypointRange = 1.5;

json camera_json(const WeakPerspectiveCamera &c) {
    return {{"scale", c.scale}, {"translation", {c.translation.x(), c.translation.y()}}};
}

json estimate_json(const std::optional<ParamEstimate> &e) {
    if (!e)
        return nullptr;
    return {{"q", vector_json(e->q)},
            {"beta", vector_json(e->beta)},
            {"camera", e->camera ? camera_json(*e->camera) : json(nullptr)},
            {"objective", e->objective ? json(*e->objective) : json(nullptr)}};
}

std::optional<ParamEstimate> parse_estimate(const json &doc, const char *key) {
    if (!has(doc, key))
        return std::nullopt;
    const std::string path = std::string("$.") + key;
    const json &j = doc.at(key);
    ParamEstimate e;
    e.q = vector(field(j, "q", path), path + ".q");
    e.beta = vector(field(j, "beta", path), path + ".beta");
    if (has(j, "camera")) {
        const std::string cp = path + ".camera";
        const json &c = j.at("camera");
        WeakPerspectiveCamera cam;
        cam.scale = number(field(c, "scale", cp), cp + ".scale");
        const Eigen::VectorXd t = vector(field(c, "translation", cp), cp + ".translation");
        if (t.size() != 2)
            throw InputError(cp + ".translation: expected [tx, ty]");
        cam.translation = t;
        e.camera = cam;
    }
    if (has(j, "objective"))
        e.objective = number(j.at("objective"), path + ".objective");
    return e;
}

} // namespace

std::string refined_provenance(int round) { return "refined-round-" + std::to_string(round); }

int provenance_round(std::string_view provenance) {
    if (provenance == "initial-conversion")
        return 0;
    constexpr std::string_view prefix = "refined-round-";
    if (provenance.substr(0, prefix.size()) == prefix) {
        const std::string_view digits = provenance.substr(prefix.size());
        int k = 0;
        const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc() && end == digits.data() + digits.size() && k >= 1)
            return k;
    }
    throw InputError("unknown provenance tag '" + std::string(provenance) + "'");
}

void check_record(const DatasetRecord &r) {
    if (r.keypoints2d) {
        check_keypoints(*r.keypoints2d);
        if (!r.keypoints2d->points.allFinite() || r.keypoints2d->points.cwiseAbs().maxCoeff() > kKeypointRange)
            throw InputError("keypoints2d: normalized coordinates must lie within [-1.5, 1.5]");
    }
    for (const auto *e : {&r.pseudo_gt, &r.regressor_estimate}) {
        if (*e && (!(*e)->q.allFinite() || !(*e)->beta.allFinite()))
            throw InputError("parameter estimate has non-finite entries");
        if (*e && (*e)->camera)
            check_camera(*(*e)->camera);
    }
    provenance_round(r.provenance);
}

DatasetRecord parse_record(std::string_view line) {
    const json doc = parse(line, "record");
    if (!doc.is_object())
        throw InputError("$: record must be an object");
    if (integer(field(doc, "version", "$"), "$.version") != kDatasetVersion)
        throw InputError("$.version: unsupported version, expected " + std::to_string(kDatasetVersion));
    DatasetRecord r;
    r.example_id = string(field(doc, "example_id", "$"), "$.example_id");
    r.image_id = has(doc, "image_id") ? string(doc.at("image_id"), "$.image_id") : std::string();
    if (has(doc, "bbox")) {
        const Eigen::VectorXd b = vector(doc.at("bbox"), "$.bbox");
        if (b.size() != 4)
            throw InputError("$.bbox: expected [x, y, width, height]");
        for (int i = 0; i < 4; ++i)
            r.bbox[static_cast<size_t>(i)] = b[i];
    }
    if (has(doc, "keypoints2d")) {
        const json &k = doc.at("keypoints2d");
        KeypointSet2D kp;
        kp.points = rows(field(k, "points", "$.keypoints2d"), 2, "$.keypoints2d.points");
        kp.confidence = vector(field(k, "confidence", "$.keypoints2d"), "$.keypoints2d.confidence");
        r.keypoints2d = std::move(kp);
    }
    if (has(doc, "keypoints3d"))
        r.keypoints3d = points(doc.at("keypoints3d"), "$.keypoints3d");
    r.pseudo_gt = parse_estimate(doc, "pseudo_gt");
    r.regressor_estimate = parse_estimate(doc, "regressor_estimate");
    if (has(doc, "provenance"))
        r.provenance = string(doc.at("provenance"), "$.provenance");
    check_record(r);
    return r;
}

std::string serialize_record(const DatasetRecord &r) {
    json doc;
    doc["version"] = kDatasetVersion;
    doc["example_id"] = r.example_id;
    doc["image_id"] = r.image_id;
    doc["bbox"] = r.bbox;
    if (r.keypoints2d)
        doc["keypoints2d"] = {{"points", rows_json(r.keypoints2d->points)},
                              {"confidence", vector_json(r.keypoints2d->confidence)}};
    else
        doc["keypoints2d"] = nullptr;
    doc["keypoints3d"] = r.keypoints3d ? points_json(*r.keypoints3d) : json(nullptr);
    doc["pseudo_gt"] = estimate_json(r.pseudo_gt);
    doc["regressor_estimate"] = estimate_json(r.regressor_estimate);
    doc["provenance"] = r.provenance;
    return doc.dump();
}

std::vector<DatasetRecord> parse_dataset(std::string_view text) {
    std::vector<DatasetRecord> out;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos)
            continue;
        try {
            out.push_back(parse_record(line));
        } catch (const InputError &e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string serialize_dataset(const std::vector<DatasetRecord> &records) {
    std::string out;
    for (const DatasetRecord &r : records) {
        out += serialize_record(r);
        out += '\n';
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path &path) {
    try {
        return parse_dataset(read_text_file(path));
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void save_dataset(const std::vector<DatasetRecord> &records, const std::filesystem::path &path) {
    write_text_file(path, serialize_dataset(records));
}

} // namespace skelfit
