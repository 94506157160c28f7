#pragma once

#include "skelfit/dataset.h"
#include "skelfit/skelify.h"

#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skelfit {

enum class InitPolicy { regressor_estimate, existing_pseudo_gt, best_of_both };

const char *to_string(InitPolicy policy);
InitPolicy parse_init_policy(std::string_view name);

struct RefineOptions {
    InitPolicy policy = InitPolicy::best_of_both;
    int round = 1;  // written into the provenance of accepted records
    int jobs = 1;   // worker threads; <= 0 uses the hardware concurrency
};

enum class RecordStatus { accepted, rejected, skipped, passthrough };
const char *to_string(RecordStatus status);

struct RecordOutcome {
    std::string example_id;
    RecordStatus status = RecordStatus::passthrough;
    std::optional<double> objective_before;  // existing pseudo-label under the run's config
    std::optional<double> objective_after;   // fit result
    std::string init;                        // which estimate seeded the fit
    std::string note;                        // reason for skipping

    bool accepted() const { return status == RecordStatus::accepted; }
};

struct RefinementReport {
    int round = 1;
    std::vector<RecordOutcome> records;

    int count(RecordStatus status) const;
    // accepted / (accepted + rejected); 0 when nothing was fitted.
    double acceptance_rate() const;
    nlohmann::json to_json() const;
};

struct RefineOutput {
    std::vector<DatasetRecord> records;
    RefinementReport report;
};

// Objective of the record's pseudo-label under `config`. When the label carries no
// camera, the camera is fitted with pose and shape held fixed. Empty when the
// record has no keypoints or no pseudo-label.
std::optional<double> pseudo_gt_objective(const DatasetRecord &record, const BodyModel &model, const FitConfig &config);

// Fits every record with keypoints and replaces its pseudo-label only when the new
// objective is strictly lower. Records that cannot be initialized under the policy
// are skipped and reported; records without keypoints pass through. Output order
// matches input order for any number of jobs.
RefineOutput refine_batch(std::span<const DatasetRecord> records, const BodyModel &model, const FitConfig &config,
                          const RefineOptions &options);

} // namespace skelfit
