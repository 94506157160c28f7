// skelfit command-line front end. See README.md for the subcommands and file formats.

#include "skelfit/dataset.h"
#include "skelfit/error.h"
#include "skelfit/fit_io.h"
#include "skelfit/mesh_io.h"
#include "skelfit/metrics.h"
#include "skelfit/model_io.h"
#include "skelfit/parallel.h"
#include "skelfit/refine.h"
#include "skelfit/synthetic.h"
#include "skelfit/toy_model.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace skelfit;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string model_path;
    bool toy_model = false;
    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string in;
    std::string out;
    std::string thresholds = "10,20,30";

    // Fit-config overrides; unset values leave the config file / defaults alone.
    std::optional<double> sigma, min_confidence, weight_data, weight_shape, weight_pose;
    std::optional<int> max_iterations;

    // Subcommand-specific.
    std::string init = "regressor-estimate";
    double perturb = 0.0;
    std::string mesh_dir;
    std::string export_path;
    double residual_threshold = 0.01;
    std::string report;
    int round = 0;
    std::string policy = "best-of-both";
    std::string gt;
    double unit_scale = 1000.0;
    int root_index = 0;
    std::string joints;
    std::string kind = "dataset";
    int count = 100;
    double corruption = 0.25;
};

std::string env_or(const char *name, const std::string &flag) {
    if (!flag.empty())
        return flag;
    const char *v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

BodyModel resolve_model(const Options &o) {
    const std::string path = env_or("SKELFIT_MODEL", o.model_path);
    if (o.toy_model && !o.model_path.empty())
        throw InputError("--model and --toy-model are mutually exclusive");
    if (o.toy_model)
        return make_toy_model();
    if (path.empty())
        throw InputError("no body model: pass --model PATH, set SKELFIT_MODEL, or use --toy-model");
    return load_model(path);
}

FitConfig resolve_config(const Options &o, FitConfig base) {
    const std::string path = env_or("SKELFIT_CONFIG", o.config_path);
    FitConfig c = path.empty() ? base : load_fit_config(path, base);
    if (o.sigma)
        c.sigma = *o.sigma;
    if (o.min_confidence)
        c.min_confidence = *o.min_confidence;
    if (o.weight_data)
        c.weights.data = *o.weight_data;
    if (o.weight_shape)
        c.weights.shape = *o.weight_shape;
    if (o.weight_pose)
        c.weights.pose = *o.weight_pose;
    if (o.max_iterations) {
        for (StageConfig &s : c.stages)
            s.max_iterations = *o.max_iterations;
    }
    c.validate();
    std::cerr << "effective fit config:\n" << serialize_fit_config(c) << "\n";
    return c;
}

void require(const std::string &value, const char *flag) {
    if (value.empty())
        throw InputError(std::string("missing required ") + flag);
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush())
        throw InputError("cannot write " + path);
}

std::string read_input(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size())
            throw InputError("bad number '" + item + "' in list");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> parse_names(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

TriangleMesh posed_mesh(const BodyModel &model, const PoseVector &q, const ShapeVector &beta) {
    return TriangleMesh{skin_mesh(model, q, beta).vertices, model.definition().faces};
}

// --- fit -------------------------------------------------------------------

int cmd_fit(const Options &o) {
    require(o.in, "--in");
    require(o.out, "--out");
    const BodyModel model = resolve_model(o);
    const FitConfig cfg = resolve_config(o, FitConfig::keypoint_defaults());
    const auto records = load_dataset(o.in);
    if (o.init != "regressor-estimate" && o.init != "existing-pseudo-gt" && o.init != "rest")
        throw InputError("--init must be regressor-estimate, existing-pseudo-gt or rest");

    // Validate everything before any work.
    for (const DatasetRecord &r : records) {
        if (r.keypoints2d && r.keypoints2d->size() != model.num_keypoints())
            throw InputError("record " + r.example_id + ": " + std::to_string(r.keypoints2d->size()) +
                             " keypoints, model regresses " + std::to_string(model.num_keypoints()));
        const ParamEstimate *e = o.init == "regressor-estimate"   ? (r.regressor_estimate ? &*r.regressor_estimate : nullptr)
                                 : o.init == "existing-pseudo-gt" ? (r.pseudo_gt ? &*r.pseudo_gt : nullptr)
                                                                  : nullptr;
        if (e && (e->q.size() != model.pose_dim() || e->beta.size() != model.shape_dim()))
            throw InputError("record " + r.example_id + ": " + o.init + " does not match the model dimensions");
    }

    std::vector<std::string> lines(records.size());
    std::vector<double> before(records.size(), 0.0), after(records.size(), 0.0);
    std::vector<char> fitted(records.size(), 0);
    parallel_for(records.size(), o.jobs, [&](std::size_t i) {
        const DatasetRecord &r = records[i];
        json j = {{"example_id", r.example_id}};
        const ParamEstimate *e = o.init == "regressor-estimate"   ? (r.regressor_estimate ? &*r.regressor_estimate : nullptr)
                                 : o.init == "existing-pseudo-gt" ? (r.pseudo_gt ? &*r.pseudo_gt : nullptr)
                                                                  : nullptr;
        if (!r.keypoints2d || (o.init != "rest" && !e)) {
            j["status"] = "skipped";
            j["note"] = !r.keypoints2d ? "no keypoints" : "no " + o.init + " to start from";
            lines[i] = j.dump();
            return;
        }
        FitState init = e ? FitState{e->q, e->beta, {}} : rest_state(model);
        if (o.perturb > 0.0) {
            std::mt19937_64 rng(o.seed * 1000003ULL + i);
            init.q = perturb_pose(model, init.q, rng, o.perturb);
        }
        init.camera = e && e->camera ? *e->camera
                                     : estimate_camera(model, init.q, init.beta, *r.keypoints2d, cfg.min_confidence);
        const FitResult res = fit(model, *r.keypoints2d, init, cfg);
        j["status"] = "ok";
        j["result"] = fit_result_json(res);
        before[i] = res.initial_objective.raw.data;
        after[i] = res.objective.raw.data;
        fitted[i] = 1;
        lines[i] = j.dump();
        if (!o.mesh_dir.empty())
            save_obj(posed_mesh(model, res.state.q, res.state.beta),
                     std::filesystem::path(o.mesh_dir) / (r.example_id + ".obj"));
    });
    std::string text;
    for (const auto &l : lines)
        text += l + "\n";
    write_output(o.out, text);

    int n = 0;
    double sb = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (fitted[i]) {
            ++n;
            sb += before[i];
            sa += after[i];
        }
    }
    std::fprintf(stderr, "fit: %d of %zu records fitted", n, records.size());
    if (n > 0)
        std::fprintf(stderr, "; mean E_kp2D %.6g -> %.6g", sb / n, sa / n);
    std::fprintf(stderr, "\n");
    return 0;
}

// --- convert ---------------------------------------------------------------

int cmd_convert(const Options &o) {
    require(o.in, "--in");
    require(o.out, "--out");
    const BodyModel model = resolve_model(o);
    const FitConfig cfg = resolve_config(o, FitConfig::mesh_defaults());
    const TriangleMesh target = load_obj(o.in);
    if (target.vertices.rows() != model.num_vertices())
        throw InputError("target mesh has " + std::to_string(target.vertices.rows()) + " vertices, model has " +
                         std::to_string(model.num_vertices()));
    if (target.faces.rows() > 0 && target.faces != model.definition().faces)
        throw InputError("target mesh faces differ from the model topology");

    const FitResult res = fit_to_mesh(model, Mesh{target.vertices}, rest_state(model), cfg);
    const double err = mean_vertex_error(skin_mesh(model, res.state.q, res.state.beta), Mesh{target.vertices});
    json j = fit_result_json(res);
    j.erase("camera");
    j["mean_vertex_error"] = err;
    j["residual_threshold"] = o.residual_threshold;
    j["suspect_local_minimum"] = err > o.residual_threshold;
    write_output(o.out, j.dump(2) + "\n");
    if (!o.export_path.empty())
        save_obj(posed_mesh(model, res.state.q, res.state.beta), o.export_path);
    std::fprintf(stderr, "convert: mean vertex error %.6g%s\n", err,
                 err > o.residual_threshold ? " (above threshold: likely a local minimum, inspect the result)" : "");
    return 0;
}

// --- refine ----------------------------------------------------------------

int cmd_refine(const Options &o) {
    require(o.in, "--in");
    require(o.out, "--out");
    const BodyModel model = resolve_model(o);
    const FitConfig cfg = resolve_config(o, FitConfig::keypoint_defaults());
    const auto records = load_dataset(o.in);
    int round = o.round;
    if (round <= 0) {
        round = 1;
        for (const DatasetRecord &r : records)
            round = std::max(round, provenance_round(r.provenance) + 1);
    }
    const RefineOutput res = refine_batch(records, model, cfg, {parse_init_policy(o.policy), round, o.jobs});
    save_dataset(res.records, o.out);
    const std::string report = res.report.to_json().dump(2) + "\n";
    if (!o.report.empty())
        write_output(o.report, report);
    std::fprintf(stderr, "refine round %d: %d accepted, %d rejected, %d skipped, %d passed through\n", round,
                 res.report.count(RecordStatus::accepted), res.report.count(RecordStatus::rejected),
                 res.report.count(RecordStatus::skipped), res.report.count(RecordStatus::passthrough));
    return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalView {
    std::optional<Points2D> kp2d;
    std::optional<Eigen::MatrixX3d> kp3d;
    std::optional<Eigen::MatrixX3d> vertices;
};

EvalView eval_view(const DatasetRecord &r, const std::optional<BodyModel> &model) {
    EvalView v;
    if (r.keypoints2d)
        v.kp2d = r.keypoints2d->points;
    if (r.keypoints3d)
        v.kp3d = *r.keypoints3d;
    if (model && r.pseudo_gt) {
        model->check_pose(r.pseudo_gt->q);
        model->check_shape(r.pseudo_gt->beta);
        const Skeleton sk = forward_kinematics(*model, r.pseudo_gt->q, r.pseudo_gt->beta);
        const Mesh m = skin_mesh(*model, sk, shape_mesh(*model, r.pseudo_gt->beta));
        v.vertices = m.vertices;
        if (!v.kp3d)
            v.kp3d = regress_joints(*model, m);
        if (!v.kp2d && r.pseudo_gt->camera)
            v.kp2d = project(*r.pseudo_gt->camera, *v.kp3d);
    }
    return v;
}

int cmd_eval(const Options &o) {
    require(o.in, "--in");
    require(o.gt, "--gt");
    std::optional<BodyModel> model;
    if (o.toy_model || !env_or("SKELFIT_MODEL", o.model_path).empty())
        model = resolve_model(o);
    const auto pred = load_dataset(o.in);
    const auto gt = load_dataset(o.gt);
    if (pred.size() != gt.size())
        throw InputError("prediction file has " + std::to_string(pred.size()) + " records, ground truth has " +
                         std::to_string(gt.size()));

    struct Acc {
        double sum = 0.0;
        int n = 0;
        void add(double v) {
            sum += v;
            ++n;
        }
    };
    Acc pck05, pck10, mpjpe_acc, pa_mpjpe_acc, mpvpe_acc, pa_mpvpe_acc;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i].example_id != gt[i].example_id)
            throw InputError("record " + std::to_string(i + 1) + ": example ids differ ('" + pred[i].example_id +
                             "' vs '" + gt[i].example_id + "')");
        const EvalView p = eval_view(pred[i], model), g = eval_view(gt[i], model);
        if (p.kp2d && g.kp2d) {
            std::vector<double> vis;
            if (gt[i].keypoints2d)
                vis.assign(gt[i].keypoints2d->confidence.data(),
                           gt[i].keypoints2d->confidence.data() + gt[i].keypoints2d->confidence.size());
            // Normalized coordinates: the longer box side spans 2 units.
            pck05.add(pck(*p.kp2d, *g.kp2d, 0.05, 2.0, vis));
            pck10.add(pck(*p.kp2d, *g.kp2d, 0.1, 2.0, vis));
        }
        if (p.kp3d && g.kp3d) {
            mpjpe_acc.add(o.unit_scale * mpjpe(*p.kp3d, *g.kp3d, o.root_index));
            pa_mpjpe_acc.add(o.unit_scale * pa_mpjpe(*p.kp3d, *g.kp3d));
        }
        if (p.vertices && g.vertices) {
            mpvpe_acc.add(o.unit_scale * mpvpe(*p.vertices, *g.vertices));
            pa_mpvpe_acc.add(o.unit_scale * pa_mpvpe(*p.vertices, *g.vertices));
        }
    }
    json metrics = json::object();
    std::string table = "metric          value        records\n";
    char buf[128];
    for (const auto &[name, acc] : std::vector<std::pair<std::string, Acc>>{{"pck@0.05", pck05},
                                                                             {"pck@0.1", pck10},
                                                                             {"mpjpe", mpjpe_acc},
                                                                             {"pa_mpjpe", pa_mpjpe_acc},
                                                                             {"mpvpe", mpvpe_acc},
                                                                             {"pa_mpvpe", pa_mpvpe_acc}}) {
        if (acc.n == 0) {
            metrics[name] = nullptr;
            std::snprintf(buf, sizeof buf, "%-12s %12s %10d\n", name.c_str(), "n/a", 0);
        } else {
            metrics[name] = acc.sum / acc.n;
            std::snprintf(buf, sizeof buf, "%-12s %12.4f %10d\n", name.c_str(), acc.sum / acc.n, acc.n);
        }
        table += buf;
    }
    const json doc = {{"format", "skelfit-eval"},
                      {"version", 1},
                      {"records", pred.size()},
                      {"unit_scale", o.unit_scale},
                      {"root_index", o.root_index},
                      {"metrics", metrics}};
    std::cout << table;
    if (!o.out.empty())
        write_output(o.out, doc.dump(2) + "\n");
    return 0;
}

// --- audit -----------------------------------------------------------------

// Pose files: JSON Lines with either {"q": [...]} or {"rotations": [[9 row-major entries] per joint]}.
std::vector<PoseSample> load_poses(const std::string &path, const BodyModel &model) {
    std::vector<PoseSample> out;
    std::stringstream ss(read_input(path));
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::string where = path + ": line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw InputError(where + ": " + e.what());
        }
        if (j.contains("rotations")) {
            const json &rots = j.at("rotations");
            if (!rots.is_array() || static_cast<int>(rots.size()) != model.num_joints())
                throw InputError(where + ": expected one rotation per joint");
            PoseSample s;
            for (const json &r : rots) {
                if (!r.is_array() || r.size() != 9)
                    throw InputError(where + ": rotation needs 9 numbers");
                Mat3 R;
                for (int k = 0; k < 9; ++k) {
                    if (!r[static_cast<size_t>(k)].is_number())
                        throw InputError(where + ": rotation entries must be numbers");
                    R(k / 3, k % 3) = r[static_cast<size_t>(k)].get<double>();
                }
                if (!is_rotation(R, 1e-6))
                    throw InputError(where + ": matrix is not a rotation");
                s.push_back(R);
            }
            out.push_back(std::move(s));
        } else if (j.contains("q")) {
            if (!j.at("q").is_array())
                throw InputError(where + ": q must be an array");
            PoseVector q(static_cast<Eigen::Index>(j.at("q").size()));
            for (std::size_t k = 0; k < j.at("q").size(); ++k) {
                if (!j.at("q")[k].is_number())
                    throw InputError(where + ": q entries must be numbers");
                q[static_cast<Eigen::Index>(k)] = j.at("q")[k].get<double>();
            }
            if (q.size() != model.pose_dim())
                throw InputError(where + ": q has " + std::to_string(q.size()) + " entries, model has " +
                                 std::to_string(model.pose_dim()));
            out.push_back(local_rotations(model, q));
        } else {
            throw InputError(where + ": expected \"q\" or \"rotations\"");
        }
    }
    return out;
}

int cmd_audit(const Options &o) {
    require(o.in, "--in");
    const BodyModel model = resolve_model(o);
    const std::vector<double> thresholds = parse_list(o.thresholds);
    std::vector<std::string> joints = parse_names(o.joints);
    if (joints.empty()) {
        for (int j = 0; j < model.num_joints(); ++j) {
            if (j == model.root())
                continue;
            const JointDofSpec spec = joint_dof_spec(model, j);
            if (!spec.axes.empty())
                joints.push_back(model.joint(j).name);
        }
    }
    const auto poses = load_poses(o.in, model);
    const ViolationTable table = violation_audit(poses, model, thresholds, joints);
    std::string text = table.render();
    text += "samples: " + std::to_string(table.samples) + "\n";
    write_output(o.out, text);
    return 0;
}

// --- export ----------------------------------------------------------------

int cmd_export(const Options &o) {
    require(o.out, "--out");
    const BodyModel model = resolve_model(o);
    FitState s = rest_state(model);
    if (!o.in.empty()) {
        json j;
        try {
            j = json::parse(read_input(o.in));
        } catch (const json::parse_error &e) {
            throw InputError(o.in + ": " + e.what());
        }
        // Accept a bare state, a fit result, or a fit-command output line.
        if (j.contains("result"))
            j = j.at("result");
        s = parse_fit_state(j, "$");
    }
    model.check_pose(s.q);
    model.check_shape(s.beta);
    save_obj(posed_mesh(model, s.q, s.beta), o.out);
    std::fprintf(stderr, "export: %d vertices, %d faces\n", model.num_vertices(),
                 static_cast<int>(model.definition().faces.rows()));
    return 0;
}

// --- synth -----------------------------------------------------------------

int cmd_synth(const Options &o) {
    require(o.out, "--out");
    if (o.kind == "model") {
        if (!o.model_path.empty())
            throw InputError("synth --kind model writes the toy model; drop --model");
        save_model_definition(make_toy_model_definition(), o.out);
        return 0;
    }
    const BodyModel model = resolve_model(o);
    if (o.kind == "dataset") {
        SyntheticDatasetOptions opts;
        opts.corruption_fraction = o.corruption;
        save_dataset(make_synthetic_dataset(model, o.count, o.seed, opts), o.out);
    } else if (o.kind == "mesh") {
        std::mt19937_64 rng(o.seed);
        const FitState s = sample_state(model, rng);
        save_obj(posed_mesh(model, s.q, s.beta), o.out);
    } else {
        throw InputError("--kind must be dataset, mesh or model");
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"skelfit: biomechanical body-model fitting, pseudo-label refinement and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--model", o.model_path, "Body model JSON file (env SKELFIT_MODEL)");
    app.add_flag("--toy-model", o.toy_model, "Use the built-in toy skeleton model");
    app.add_option("--config", o.config_path, "Fit config JSON file (env SKELFIT_CONFIG)");
    app.add_option("--seed", o.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--jobs", o.jobs, "Worker threads (<= 0: all cores)")->capture_default_str();
    app.add_option("--in", o.in, "Input file");
    app.add_option("--out", o.out, "Output file ('-' for stdout where supported)");
    app.add_option("--thresholds", o.thresholds, "Comma-separated audit thresholds in degrees")->capture_default_str();
    app.add_option("--sigma", o.sigma, "Override: robustifier scale");
    app.add_option("--min-confidence", o.min_confidence, "Override: keypoint confidence cut");
    app.add_option("--weight-data", o.weight_data, "Override: data term weight");
    app.add_option("--weight-shape", o.weight_shape, "Override: shape prior weight");
    app.add_option("--weight-pose", o.weight_pose, "Override: joint-limit prior weight");
    app.add_option("--max-iterations", o.max_iterations, "Override: iteration cap of every stage");

    auto *fit_cmd = app.add_subcommand("fit", "Fit the model to the 2D keypoints of every dataset record");
    fit_cmd->add_option("--init", o.init, "regressor-estimate | existing-pseudo-gt | rest")->capture_default_str();
    fit_cmd->add_option("--perturb", o.perturb, "Uniform init noise per rotational DoF (rad), seeded");
    fit_cmd->add_option("--mesh-dir", o.mesh_dir, "Also write one OBJ per fitted record here");

    auto *convert_cmd = app.add_subcommand("convert", "Fit the model to a target mesh (OBJ, model topology)");
    convert_cmd->add_option("--export", o.export_path, "Also write the fitted mesh as OBJ");
    convert_cmd->add_option("--residual-threshold", o.residual_threshold,
                            "Mean vertex error above which the result is flagged")
        ->capture_default_str();

    auto *refine_cmd = app.add_subcommand("refine", "One refinement round over a dataset");
    refine_cmd->add_option("--report", o.report, "Write the refinement report (JSON) here");
    refine_cmd->add_option("--round", o.round, "Round number (default: one past the newest provenance)");
    refine_cmd->add_option("--policy", o.policy, "regressor-estimate | existing-pseudo-gt | best-of-both")
        ->capture_default_str();

    auto *eval_cmd = app.add_subcommand("eval", "Compare predictions (--in) against ground truth (--gt)");
    eval_cmd->add_option("--gt", o.gt, "Ground-truth dataset");
    eval_cmd->add_option("--unit-scale", o.unit_scale, "Multiplier from model units to report units")
        ->capture_default_str();
    eval_cmd->add_option("--root-index", o.root_index, "Keypoint used for root alignment in MPJPE")
        ->capture_default_str();

    auto *audit_cmd = app.add_subcommand("audit", "Joint-limit violation frequencies of a pose file");
    audit_cmd->add_option("--joints", o.joints, "Comma-separated joint names (default: all limited joints)");

    auto *export_cmd = app.add_subcommand("export", "Write the posed mesh of a parameter file as OBJ");

    auto *synth_cmd = app.add_subcommand("synth", "Write synthetic data: a dataset, a target mesh, or the toy model");
    synth_cmd->add_option("--kind", o.kind, "dataset | mesh | model")->capture_default_str();
    synth_cmd->add_option("--count", o.count, "Records in a synthetic dataset")->capture_default_str();
    synth_cmd->add_option("--corruption", o.corruption, "Share of limit-violating pseudo-labels")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*fit_cmd)
            return cmd_fit(o);
        if (*convert_cmd)
            return cmd_convert(o);
        if (*refine_cmd)
            return cmd_refine(o);
        if (*eval_cmd)
            return cmd_eval(o);
        if (*audit_cmd)
            return cmd_audit(o);
        if (*export_cmd)
            return cmd_export(o);
        if (*synth_cmd)
            return cmd_synth(o);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
