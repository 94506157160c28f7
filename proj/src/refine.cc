#include "skelfit/refine.h"

#include "skelfit/error.h"
#include "skelfit/parallel.h"

#include <cmath>
#include <limits>

namespace skelfit {

namespace {

struct Candidate {
    const char *name;
    FitState state;
};

void check_estimate(const ParamEstimate &e, const BodyModel &model, const char *what) {
    if (e.q.size() != model.pose_dim() || e.beta.size() != model.shape_dim())
        throw InputError(std::string(what) + " has " + std::to_string(e.q.size()) + " pose / " +
                         std::to_string(e.beta.size()) + " shape entries, model expects " +
                         std::to_string(model.pose_dim()) + " / " + std::to_string(model.shape_dim()));
}

// State for an estimate. A missing camera is fitted with q and beta frozen.
FitState complete_state(const ParamEstimate &e, const BodyModel &model, const KeypointSet2D &kp,
                        const FitConfig &config) {
    FitState s{e.q, e.beta, {}};
    if (e.camera) {
        s.camera = *e.camera;
        return s;
    }
    s.camera = estimate_camera(model, e.q, e.beta, kp, config.min_confidence);
    FitConfig cam_only = config;
    cam_only.stages = {{{ParamGroup::camera}, 200, 1e-9}};
    return fit(model, kp, s, cam_only).state;
}

RecordOutcome refine_one(const DatasetRecord &in, DatasetRecord &out, const BodyModel &model, const FitConfig &config,
                         const RefineOptions &options) {
    RecordOutcome o;
    o.example_id = in.example_id;
    out = in;
    if (!in.keypoints2d)
        return o;
    try {
        const KeypointSet2D &kp = *in.keypoints2d;
        if (kp.size() != model.num_keypoints())
            throw InputError("record has " + std::to_string(kp.size()) + " keypoints, model regresses " +
                             std::to_string(model.num_keypoints()));
        if (in.pseudo_gt)
            check_estimate(*in.pseudo_gt, model, "pseudo_gt");
        if (in.regressor_estimate)
            check_estimate(*in.regressor_estimate, model, "regressor_estimate");

        std::vector<Candidate> candidates;
        std::optional<FitState> existing;
        if (in.pseudo_gt) {
            existing = complete_state(*in.pseudo_gt, model, kp, config);
            o.objective_before = total_objective(model, *existing, kp, config).total;
        }
        const bool want_reg = options.policy != InitPolicy::existing_pseudo_gt;
        const bool want_pgt = options.policy != InitPolicy::regressor_estimate;
        if (want_reg && in.regressor_estimate)
            candidates.push_back({"regressor-estimate", complete_state(*in.regressor_estimate, model, kp, config)});
        if (want_pgt && existing)
            candidates.push_back({"existing-pseudo-gt", *existing});
        if (candidates.empty())
            throw InputError(std::string("no initialization available for policy ") + to_string(options.policy));

        // Start from the candidate with the lower objective; ties keep the first.
        size_t best = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < candidates.size(); ++c) {
            const double v = total_objective(model, candidates[c].state, kp, config).total;
            if (v < best_value) {
                best_value = v;
                best = c;
            }
        }
        o.init = candidates[best].name;
        const FitResult result = fit(model, kp, candidates[best].state, config);
        o.objective_after = result.objective.total;

        if (std::isfinite(result.objective.total) &&
            (!o.objective_before || result.objective.total < *o.objective_before)) {
            o.status = RecordStatus::accepted;
            out.pseudo_gt = ParamEstimate{result.state.q, result.state.beta, result.state.camera, result.objective.total};
            out.provenance = refined_provenance(options.round);
        } else {
            o.status = RecordStatus::rejected;
        }
    } catch (const Error &e) {
        out = in;
        o.status = RecordStatus::skipped;
        o.note = e.what();
    }
    return o;
}

} // namespace

const char *to_string(InitPolicy policy) {
    switch (policy) {
    case InitPolicy::regressor_estimate:
        return "regressor-estimate";
    case InitPolicy::existing_pseudo_gt:
        return "existing-pseudo-gt";
    case InitPolicy::best_of_both:
        return "best-of-both";
    }
    return "?";
}

InitPolicy parse_init_policy(std::string_view name) {
    for (InitPolicy p : {InitPolicy::regressor_estimate, InitPolicy::existing_pseudo_gt, InitPolicy::best_of_both}) {
        if (name == to_string(p))
            return p;
    }
    throw InputError("unknown init policy '" + std::string(name) +
                     "' (expected regressor-estimate, existing-pseudo-gt or best-of-both)");
}

const char *to_string(RecordStatus status) {
    switch (status) {
    case RecordStatus::accepted:
        return "accepted";
    case RecordStatus::rejected:
        return "rejected";
    case RecordStatus::skipped:
        return "skipped";
    case RecordStatus::passthrough:
        return "passthrough";
    }
    return "?";
}

int RefinementReport::count(RecordStatus status) const {
    int n = 0;
    for (const RecordOutcome &r : records)
        n += r.status == status;
    return n;
}

double RefinementReport::acceptance_rate() const {
    const int fitted = count(RecordStatus::accepted) + count(RecordStatus::rejected);
    return fitted == 0 ? 0.0 : static_cast<double>(count(RecordStatus::accepted)) / fitted;
}

nlohmann::json RefinementReport::to_json() const {
    using nlohmann::json;
    auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    json rows = json::array();
    for (const RecordOutcome &r : records) {
        rows.push_back({{"example_id", r.example_id},
                        {"status", to_string(r.status)},
                        {"accepted", r.accepted()},
                        {"objective_before", opt(r.objective_before)},
                        {"objective_after", opt(r.objective_after)},
                        {"init", r.init.empty() ? json(nullptr) : json(r.init)},
                        {"note", r.note.empty() ? json(nullptr) : json(r.note)}});
    }
    return {{"format", "skelfit-refinement-report"},
            {"version", 1},
            {"round", round},
            {"accepted", count(RecordStatus::accepted)},
            {"rejected", count(RecordStatus::rejected)},
            {"skipped", count(RecordStatus::skipped)},
            {"passthrough", count(RecordStatus::passthrough)},
            {"acceptance_rate", acceptance_rate()},
            {"records", rows}};
}

std::optional<double> pseudo_gt_objective(const DatasetRecord &record, const BodyModel &model, const FitConfig &config) {
    if (!record.keypoints2d || !record.pseudo_gt)
        return std::nullopt;
    check_estimate(*record.pseudo_gt, model, "pseudo_gt");
    const FitState s = complete_state(*record.pseudo_gt, model, *record.keypoints2d, config);
    return total_objective(model, s, *record.keypoints2d, config).total;
}

RefineOutput refine_batch(std::span<const DatasetRecord> records, const BodyModel &model, const FitConfig &config,
                          const RefineOptions &options) {
    config.validate();
    if (options.round < 1)
        throw InputError("refinement round must be at least 1");
    RefineOutput out;
    out.records.resize(records.size());
    out.report.round = options.round;
    out.report.records.resize(records.size());

    parallel_for(records.size(), options.jobs, [&](size_t i) {
        out.report.records[i] = refine_one(records[i], out.records[i], model, config, options);
    });
    return out;
}

} // namespace skelfit
