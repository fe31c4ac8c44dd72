#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reveal/align.hpp"
#include "reveal/cohort.hpp"
#include "reveal/downstream.hpp"
#include "reveal/narrative.hpp"

namespace reveal::experiments {

// Worker count for seed repeats and sweep cells; REVEAL_THREADS caps it.
std::size_t thread_budget();

// Deterministic task dispatch: results land by index, so parallel and
// serial execution produce identical output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct PipelineConfig {
    cohort::SplitConfig split;
    align::TrainConfig train;
    narrative::TextFeaturizerConfig text;
    downstream::FeatureVariant variant = downstream::FeatureVariant::joint;
    std::vector<double> c_grid = {0.1, 1.0, 10.0, 100.0};
    std::vector<double> gamma_scales = {0.1, 1.0, 10.0}; // divided by feature width
    std::size_t cv_folds = 5;
};

struct Prediction {
    std::string subject_id;
    int label = 0;
    double score = 0.0;
    double probability = 0.0;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    metrics::BinaryMetrics test;
    double c = 0.0;
    double gamma = 0.0;
    double tau_f_used = 0.0;
    double tau_t_used = 0.0;
    double seconds = 0.0;
    std::vector<Prediction> predictions;
};

// One full stage-1 + stage-2 run: split, impute where needed, train the
// alignment heads, build the variant features, grid-search the SVM with
// cross-validation, and evaluate once on the held-out test split.
// `text_features` must hold one row per subject. A pretrained model skips
// stage-1 training and is used as-is.
SeedOutcome run_pipeline_once(const std::vector<cohort::Subject>& subjects,
                              const Matrix& text_features, const PipelineConfig& config,
                              std::uint64_t seed,
                              const align::AlignmentModel* pretrained = nullptr);

enum class ExperimentKind {
    main,
    ablate_gacl,
    ablate_combiner,
    ablate_similarity_source,
    ablate_components,
    threshold_sweep,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::main;
    std::string task = "ad"; // ad | dementia; label carried into reports
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 1;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // NaN for single-seed runs
};

struct ArmResult {
    std::string name;
    std::vector<SeedOutcome> seeds;
    MetricSummary auroc, balanced_accuracy, f1, mcc;
};

struct ArmComparison {
    std::string arm; // compared against the reference (last) arm
    double p_auroc = 1.0, g_auroc = 0.0;
    double p_ba = 1.0, g_ba = 0.0;
    double p_f1 = 1.0, g_f1 = 0.0;
    double p_mcc = 1.0, g_mcc = 0.0;
};

struct ExperimentReport {
    std::string kind;
    std::string task;
    std::vector<ArmResult> arms; // reference arm last, mirroring the tables
    std::vector<ArmComparison> comparisons;
};

// Runs every arm of the chosen experiment over n_seeds seeds.
// threshold_sweep is served by run_threshold_sweep instead.
ExperimentReport run_experiment(const std::vector<cohort::Subject>& subjects,
                                const PipelineConfig& config, const ExperimentSpec& spec);

struct SweepCell {
    std::string modality; // "image" (tau_F varied) or "text" (tau_T varied)
    double tau = 0.0;
    double pct_auroc = 0.0;
    double pct_ba = 0.0;
    double pct_f1 = 0.0;
    double pct_mcc = 0.0;
};

struct SweepReport {
    std::string task;
    double tau_f_opt = 0.0;
    double tau_t_opt = 0.0;
    metrics::BinaryMetrics reference; // seed-mean at the optimal thresholds
    std::vector<SweepCell> cells;     // |grid_F| + |grid_T| rows
};

// Fixes one threshold at its optimum and varies the other over the
// quartiles of the development-set similarity distribution (plus the
// optimum itself), retraining per cell; reports relative % differences
// against the optimum-vs-optimum run.
SweepReport run_threshold_sweep(const std::vector<cohort::Subject>& subjects,
                                const PipelineConfig& config, const ExperimentSpec& spec);

// Writers: machine-readable JSON/CSV plus an aligned text table.
void write_experiment_report(const ExperimentReport& report, const std::string& out_dir);
void write_sweep_report(const SweepReport& report, const std::string& out_dir);
std::string experiment_report_text(const ExperimentReport& report);
std::string sweep_report_text(const SweepReport& report);

} // namespace reveal::experiments
