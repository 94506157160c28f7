#include "skelfit/fit_io.h"

#include "json_util.h"

namespace skelfit {

using namespace detail;

namespace {

json objective_json(const ObjectiveValue &v) {
    return {{"total", v.total},
            {"data", v.raw.data},
            {"shape", v.raw.shape},
            {"pose", v.raw.pose},
            {"weighted", {{"data", v.weighted.data}, {"shape", v.weighted.shape}, {"pose", v.weighted.pose}}}};
}

} // namespace

const char *to_string(ParamGroup group) {
    switch (group) {
    case ParamGroup::camera:
        return "camera";
    case ParamGroup::root:
        return "root";
    case ParamGroup::pose:
        return "pose";
    case ParamGroup::shape:
        return "shape";
    }
    return "?";
}

ParamGroup parse_param_group(std::string_view name) {
    for (ParamGroup g : {ParamGroup::camera, ParamGroup::root, ParamGroup::pose, ParamGroup::shape}) {
        if (name == to_string(g))
            return g;
    }
    throw InputError("unknown parameter group '" + std::string(name) + "'");
}

FitConfig parse_fit_config(std::string_view document, const FitConfig &base) {
    const json doc = parse(document, "fit config");
    if (!doc.is_object())
        throw InputError("$: fit config must be an object");
    if (has(doc, "format") && string(doc.at("format"), "$.format") != "skelfit-fit-config")
        throw InputError("$.format: expected \"skelfit-fit-config\"");
    if (has(doc, "version") && integer(doc.at("version"), "$.version") != kFitConfigVersion)
        throw InputError("$.version: unsupported version, expected " + std::to_string(kFitConfigVersion));

    FitConfig c = base;
    if (has(doc, "stages")) {
        const json &stages = array(doc.at("stages"), "$.stages");
        c.stages.clear();
        for (size_t s = 0; s < stages.size(); ++s) {
            const std::string sp = "$.stages[" + std::to_string(s) + "]";
            StageConfig stage;
            const json &groups = array(field(stages[s], "groups", sp), sp + ".groups");
            for (size_t g = 0; g < groups.size(); ++g) {
                try {
                    stage.groups.push_back(parse_param_group(string(groups[g], sp + ".groups")));
                } catch (const InputError &e) {
                    throw InputError(sp + ".groups[" + std::to_string(g) + "]: " + e.what());
                }
            }
            if (has(stages[s], "max_iterations"))
                stage.max_iterations = integer(stages[s].at("max_iterations"), sp + ".max_iterations");
            if (has(stages[s], "tolerance"))
                stage.tolerance = number(stages[s].at("tolerance"), sp + ".tolerance");
            c.stages.push_back(std::move(stage));
        }
    }
    if (has(doc, "weights")) {
        const json &w = doc.at("weights");
        if (has(w, "data"))
            c.weights.data = number(w.at("data"), "$.weights.data");
        if (has(w, "shape"))
            c.weights.shape = number(w.at("shape"), "$.weights.shape");
        if (has(w, "pose"))
            c.weights.pose = number(w.at("pose"), "$.weights.pose");
    }
    if (has(doc, "sigma"))
        c.sigma = number(doc.at("sigma"), "$.sigma");
    if (has(doc, "min_confidence"))
        c.min_confidence = number(doc.at("min_confidence"), "$.min_confidence");
    if (has(doc, "optimizer")) {
        const json &o = doc.at("optimizer");
        if (has(o, "history"))
            c.optimizer.history = integer(o.at("history"), "$.optimizer.history");
        if (has(o, "max_line_search"))
            c.optimizer.max_line_search = integer(o.at("max_line_search"), "$.optimizer.max_line_search");
        if (has(o, "armijo"))
            c.optimizer.armijo = number(o.at("armijo"), "$.optimizer.armijo");
        if (has(o, "convergence_window"))
            c.optimizer.convergence_window = integer(o.at("convergence_window"), "$.optimizer.convergence_window");
        if (has(o, "gradient_tolerance"))
            c.optimizer.gradient_tolerance = number(o.at("gradient_tolerance"), "$.optimizer.gradient_tolerance");
    }
    c.validate();
    return c;
}

std::string serialize_fit_config(const FitConfig &config) {
    json stages = json::array();
    for (const StageConfig &s : config.stages) {
        json groups = json::array();
        for (ParamGroup g : s.groups)
            groups.push_back(to_string(g));
        stages.push_back({{"groups", groups}, {"max_iterations", s.max_iterations}, {"tolerance", s.tolerance}});
    }
    const OptimizerSettings &o = config.optimizer;
    const json doc = {{"format", "skelfit-fit-config"},
                      {"version", kFitConfigVersion},
                      {"stages", stages},
                      {"weights", {{"data", config.weights.data}, {"shape", config.weights.shape}, {"pose", config.weights.pose}}},
                      {"sigma", config.sigma},
                      {"min_confidence", config.min_confidence},
                      {"optimizer",
                       {{"history", o.history},
                        {"max_line_search", o.max_line_search},
                        {"armijo", o.armijo},
                        {"convergence_window", o.convergence_window},
                        {"gradient_tolerance", o.gradient_tolerance}}}};
    return doc.dump(2);
}

FitConfig load_fit_config(const std::filesystem::path &path, const FitConfig &base) {
    try {
        return parse_fit_config(read_text_file(path), base);
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

json fit_state_json(const FitState &state) {
    return {{"q", vector_json(state.q)},
            {"beta", vector_json(state.beta)},
            {"camera",
             {{"scale", state.camera.scale},
              {"translation", {state.camera.translation.x(), state.camera.translation.y()}}}}};
}

FitState parse_fit_state(const json &j, const std::string &path) {
    FitState s;
    s.q = vector(field(j, "q", path), path + ".q");
    s.beta = vector(field(j, "beta", path), path + ".beta");
    if (has(j, "camera")) {
        const json &cam = j.at("camera");
        const std::string cp = path + ".camera";
        s.camera.scale = number(field(cam, "scale", cp), cp + ".scale");
        const Eigen::VectorXd t = vector(field(cam, "translation", cp), cp + ".translation");
        if (t.size() != 2)
            throw InputError(cp + ".translation: expected [tx, ty]");
        s.camera.translation = t;
    }
    return s;
}

json fit_result_json(const FitResult &result) {
    json j = fit_state_json(result.state);
    j["objective"] = objective_json(result.objective);
    j["initial_objective"] = objective_json(result.initial_objective);
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["history"] = result.history;
    return j;
}

} // namespace skelfit
