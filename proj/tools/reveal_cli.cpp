// Command-line front end for the full pipeline: cohort generation, report
// rendering, alignment training, downstream evaluation, and the experiment
// battery. Every command writes a manifest sufficient to replay the run.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reveal/align.hpp"
#include "reveal/cohort.hpp"
#include "reveal/config_io.hpp"
#include "reveal/downstream.hpp"
#include "reveal/error.hpp"
#include "reveal/experiments.hpp"
#include "reveal/manifest.hpp"
#include "reveal/narrative.hpp"

namespace {

using nlohmann::json;
using namespace reveal;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

std::optional<std::uint64_t> env_seed() {
    if (const char* env = std::getenv("REVEAL_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        throw ConfigError("REVEAL_SEED is not an integer");
    }
    return std::nullopt;
}

void require_file(const std::string& path, const char* what) {
    if (!std::filesystem::exists(path))
        throw ConfigError(std::string(what) + " not found: " + path);
}

// Shared experiment/pipeline options resolved as: config file < environment
// < explicit flags.
struct PipelineCli {
    std::string config_path;
    std::string cohort_path;
    std::string out;
    std::string task = "ad";
    std::string loss;
    std::string combiner;
    std::string similarity_source;
    std::string variant;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::size_t n_seeds = 10;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    double tau_f = std::numeric_limits<double>::quiet_NaN();
    double tau_t = std::numeric_limits<double>::quiet_NaN();
    bool quantile_thresholds = false;

    void add_common(CLI::App* cmd, bool with_variant) {
        cmd->add_option("--config", config_path, "pipeline config JSON");
        cmd->add_option("--cohort", cohort_path, "cohort CSV")->required();
        cmd->add_option("--out", out, "output directory")->required();
        cmd->add_option("--task", task, "task label: ad | dementia")
            ->check(CLI::IsMember({"ad", "dementia"}));
        cmd->add_option("--loss", loss, "gacl | infonce")
            ->check(CLI::IsMember({"gacl", "infonce"}));
        cmd->add_option("--combiner", combiner, "or | and")->check(CLI::IsMember({"or", "and"}));
        cmd->add_option("--similarity-source", similarity_source, "morphometry | latent")
            ->check(CLI::IsMember({"morphometry", "latent"}));
        if (with_variant)
            cmd->add_option("--variant", variant,
                            "joint | image_only | text_only | image_plus_table | tabular");
        cmd->add_option("--seed", seed, "base seed")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--seeds", n_seeds, "number of seed repeats");
        cmd->add_option("--epochs", epochs, "alignment training epochs");
        cmd->add_option("--batch-size", batch_size, "alignment batch size");
        cmd->add_option("--tau-f", tau_f, "morphometry similarity threshold");
        cmd->add_option("--tau-t", tau_t, "text similarity threshold");
        cmd->add_flag("--quantile-thresholds", quantile_thresholds,
                      "derive thresholds from dev-set Q3");
    }

    experiments::PipelineConfig resolve() const {
        experiments::PipelineConfig cfg;
        if (!config_path.empty())
            cfg = experiments::pipeline_config_from_json(load_json_file(config_path));
        if (const auto s = env_seed()) cfg.train.seed = *s;
        if (seed_set) cfg.train.seed = seed;
        if (!loss.empty())
            cfg.train.loss = loss == "gacl" ? align::LossKind::gacl : align::LossKind::infonce;
        if (!combiner.empty())
            cfg.train.combiner = combiner == "or" ? gacl::Combiner::OR : gacl::Combiner::AND;
        if (!similarity_source.empty())
            cfg.train.image_similarity_source = similarity_source == "latent"
                                                    ? gacl::SimilaritySource::image_latent
                                                    : gacl::SimilaritySource::morphometry;
        if (!variant.empty()) cfg.variant = downstream::variant_from_name(variant);
        if (epochs > 0) cfg.train.epochs = epochs;
        if (batch_size > 0) cfg.train.batch_size = batch_size;
        if (!std::isnan(tau_f)) cfg.train.tau_f = tau_f;
        if (!std::isnan(tau_t)) cfg.train.tau_t = tau_t;
        if (quantile_thresholds) cfg.train.thresholds_from_quantiles = true;
        return cfg;
    }

    std::uint64_t base_seed(const experiments::PipelineConfig& cfg) const {
        return seed_set ? seed : (env_seed() ? *env_seed() : cfg.train.seed ? cfg.train.seed : 1);
    }
};

int cmd_gen_cohort(const std::string& config_path, const std::string& out,
                   std::optional<std::size_t> n, std::optional<double> prevalence,
                   std::optional<double> rho, std::optional<std::uint64_t> seed,
                   const std::string& task) {
    cohort::CohortConfig cfg;
    if (!config_path.empty()) cfg = cohort::cohort_config_from_json(load_json_file(config_path));
    if (const auto s = env_seed()) cfg.seed = *s;
    // Task presets set the onset-year window; an explicit config keeps its
    // own values unless --task is given.
    if (task == "ad") {
        cfg.onset_years_lo = 2.38;
        cfg.onset_years_hi = 11.58;
    } else if (task == "dementia") {
        cfg.onset_years_lo = 1.50;
        cfg.onset_years_hi = 11.58;
    }
    if (n) cfg.n_subjects = *n;
    if (prevalence) cfg.prevalence = *prevalence;
    if (rho) cfg.signal_strength = *rho;
    if (seed) cfg.seed = *seed;
    cfg.validate();

    manifest::RunManifest run("gen-cohort", cohort::cohort_config_to_json(cfg));
    const std::vector<cohort::Subject> subjects = cohort::generate_cohort(cfg);
    cohort::save_cohort_csv(subjects, out);
    run.add_output(out);

    std::size_t cases = 0;
    for (const auto& s : subjects) cases += s.is_case;
    run.set("task", task.empty() ? "default" : task);
    run.set("n_cases", cases);
    run.set("realized_prevalence", double(cases) / double(subjects.size()));
    run.write(std::filesystem::path(out).parent_path().empty()
                  ? "."
                  : std::filesystem::path(out).parent_path().string());
    std::cout << "wrote " << subjects.size() << " subjects (" << cases << " cases) to " << out
              << "\n";
    return 0;
}

int cmd_render_reports(const std::string& cohort_path, const std::string& out,
                       const std::string& per_subject_dir) {
    require_file(cohort_path, "cohort file");
    const std::vector<cohort::Subject> subjects = cohort::load_cohort_csv(cohort_path);
    manifest::RunManifest run("render-reports", json{{"cohort", cohort_path}});
    run.add_input(cohort_path);

    std::ostringstream lines;
    for (const cohort::Subject& s : subjects) {
        const narrative::ClinicalReport report = narrative::render_report(s.id, s.profile);
        lines << json{{"id", report.subject_id}, {"text", report.text}}.dump() << "\n";
        if (!per_subject_dir.empty()) {
            std::filesystem::create_directories(per_subject_dir);
            std::ofstream txt(per_subject_dir + "/" + report.subject_id + ".txt",
                              std::ios::binary);
            txt << report.text << "\n";
        }
    }
    manifest::atomic_write(out, lines.str());
    run.add_output(out);
    run.set("report_count", subjects.size());
    run.write(std::filesystem::path(out).parent_path().empty()
                  ? "."
                  : std::filesystem::path(out).parent_path().string());
    std::cout << "rendered " << subjects.size() << " reports to " << out << "\n";
    return 0;
}

int cmd_train_align(const PipelineCli& cli, std::size_t tune_trials) {
    require_file(cli.cohort_path, "cohort file");
    const std::vector<cohort::Subject> subjects = cohort::load_cohort_csv(cli.cohort_path);
    experiments::PipelineConfig cfg = cli.resolve();
    cfg.train.seed = cli.base_seed(cfg);

    std::vector<narrative::ClinicalReport> reports;
    for (const cohort::Subject& s : subjects)
        reports.push_back(narrative::render_report(s.id, s.profile));
    const Matrix text_features = narrative::embed_batch(reports, cfg.text);

    const cohort::CohortSplits splits = cohort::split_cohort(subjects, cfg.split, cfg.train.seed);
    align::TrainInputs inputs;
    inputs.subjects = &subjects;
    inputs.text_features = &text_features;
    inputs.align_train = splits.align_train;
    inputs.align_val = splits.align_val;

    manifest::RunManifest run("train-align", experiments::pipeline_config_to_json(cfg));
    run.add_input(cli.cohort_path);

    if (tune_trials > 0) {
        std::vector<align::SearchTrial> table;
        cfg.train = align::tune(inputs, cfg.train, align::TuneSpace{}, tune_trials, cfg.train.seed,
                                {}, &table);
        json trials = json::array();
        for (const auto& t : table)
            trials.push_back({{"point", t.point}, {"objective", t.objective}});
        run.set("tune_trials", trials);
    }

    align::TrainLog log;
    const align::AlignmentModel model = align::train(inputs, cfg.train, &log);

    std::filesystem::create_directories(cli.out);
    const std::string ckpt_path = cli.out + "/checkpoint.json";
    const std::string log_path = cli.out + "/trainlog.csv";
    align::save_checkpoint(model, cfg.train, ckpt_path);
    align::save_train_log_csv(log, log_path);
    run.add_output(ckpt_path);
    run.add_output(log_path);
    run.set("tau_f_used", log.tau_f_used);
    run.set("tau_t_used", log.tau_t_used);
    run.set("aborted", log.aborted);
    run.set("align_train_size", splits.align_train.size());
    run.set("align_val_size", splits.align_val.size());
    run.write(cli.out);
    if (log.aborted) {
        std::cerr << "training diverged; checkpoint holds the last finite state\n";
        return 1;
    }
    std::cout << "checkpoint written to " << ckpt_path << " (final train loss "
              << (log.epochs.empty() ? 0.0 : log.epochs.back().train_loss) << ")\n";
    return 0;
}

int cmd_evaluate(const PipelineCli& cli, const std::string& experiment,
                 const std::string& checkpoint_path) {
    require_file(cli.cohort_path, "cohort file");
    const std::vector<cohort::Subject> subjects = cohort::load_cohort_csv(cli.cohort_path);
    experiments::PipelineConfig cfg = cli.resolve();

    std::optional<align::Checkpoint> ckpt;
    if (!checkpoint_path.empty()) {
        require_file(checkpoint_path, "checkpoint");
        ckpt = align::load_checkpoint(checkpoint_path);
        cfg.train = ckpt->config; // checkpoint carries the training recipe
        if (!cli.loss.empty() || !cli.combiner.empty() || !cli.similarity_source.empty())
            throw ConfigError("--checkpoint fixes the training config; drop the overriding flags");
    }

    experiments::ExperimentSpec spec;
    spec.kind = experiments::kind_from_name(experiment);
    spec.task = cli.task;
    spec.n_seeds = cli.n_seeds;
    spec.base_seed = cli.base_seed(cfg);

    manifest::RunManifest run("evaluate", experiments::pipeline_config_to_json(cfg));
    run.add_input(cli.cohort_path);
    run.set("experiment", experiments::kind_name(spec.kind));
    run.set("task", spec.task);
    run.set("n_seeds", spec.n_seeds);
    run.set("base_seed", spec.base_seed);

    if (spec.kind == experiments::ExperimentKind::threshold_sweep) {
        const experiments::SweepReport report = experiments::run_threshold_sweep(subjects, cfg, spec);
        experiments::write_sweep_report(report, cli.out);
        run.add_output(cli.out + "/sweep.json");
        run.add_output(cli.out + "/sweep.csv");
        run.add_output(cli.out + "/sweep.txt");
        run.write(cli.out);
        std::cout << experiments::sweep_report_text(report);
        return 0;
    }

    // With a checkpoint and a single seed the stored weights are evaluated
    // as-is; otherwise each seed retrains from the recorded recipe.
    experiments::ExperimentReport report;
    if (ckpt && spec.n_seeds == 1 && spec.kind == experiments::ExperimentKind::main) {
        std::vector<narrative::ClinicalReport> reports;
        for (const cohort::Subject& s : subjects)
            reports.push_back(narrative::render_report(s.id, s.profile));
        const Matrix text_features = narrative::embed_batch(reports, cfg.text);
        experiments::ArmResult arm;
        arm.name = "joint_gacl";
        arm.seeds.push_back(experiments::run_pipeline_once(subjects, text_features, cfg,
                                                           spec.base_seed, &ckpt->model));
        const auto& m = arm.seeds[0].test;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        arm.auroc = {m.auroc, nan};
        arm.balanced_accuracy = {m.balanced_accuracy, nan};
        arm.f1 = {m.f1, nan};
        arm.mcc = {m.mcc, nan};
        report.kind = experiments::kind_name(spec.kind);
        report.task = spec.task;
        report.arms.push_back(std::move(arm));
    } else {
        report = experiments::run_experiment(subjects, cfg, spec);
    }
    experiments::write_experiment_report(report, cli.out);
    run.add_output(cli.out + "/report.json");
    run.add_output(cli.out + "/report.csv");
    run.add_output(cli.out + "/report.txt");
    run.add_output(cli.out + "/predictions.csv");

    if (spec.kind == experiments::ExperimentKind::ablate_similarity_source) {
        // The two arm configurations differ only in the similarity source
        // (and its data-derived threshold); record both for audit.
        json arm_configs = json::object();
        for (const char* source : {"latent", "morphometry"}) {
            experiments::PipelineConfig arm_cfg = cfg;
            arm_cfg.train.image_similarity_source = std::string(source) == "latent"
                                                        ? gacl::SimilaritySource::image_latent
                                                        : gacl::SimilaritySource::morphometry;
            arm_configs[source] = experiments::pipeline_config_to_json(arm_cfg);
        }
        run.set("arm_configs", arm_configs);
    }
    run.write(cli.out);
    std::cout << experiments::experiment_report_text(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-aware image-text alignment pipeline"};
    app.require_subcommand(1);

    // gen-cohort
    std::string gen_config, gen_out, gen_task;
    std::optional<std::size_t> gen_n;
    std::optional<double> gen_prev, gen_rho;
    std::optional<std::uint64_t> gen_seed;
    auto* gen = app.add_subcommand("gen-cohort", "generate a synthetic cohort CSV");
    gen->add_option("--config", gen_config, "cohort config JSON");
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--n", gen_n, "number of subjects");
    gen->add_option("--prevalence", gen_prev, "case fraction");
    gen->add_option("--rho", gen_rho, "planted signal strength in [0,1]");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--task", gen_task, "ad | dementia (onset-range preset)")
        ->check(CLI::IsMember({"ad", "dementia"}));

    // render-reports
    std::string rr_cohort, rr_out, rr_dir;
    auto* rr = app.add_subcommand("render-reports", "render clinical reports to JSONL");
    rr->add_option("--cohort", rr_cohort, "cohort CSV")->required();
    rr->add_option("--out", rr_out, "output JSONL path")->required();
    rr->add_option("--per-subject-dir", rr_dir, "also write one .txt per subject");

    // train-align
    PipelineCli train_cli;
    std::size_t tune_trials = 0;
    auto* tr = app.add_subcommand("train-align", "train the alignment projection heads");
    train_cli.add_common(tr, false);
    tr->add_option("--tune", tune_trials, "random-search trials before the final fit");

    // evaluate
    PipelineCli eval_cli;
    std::string experiment = "main", checkpoint;
    auto* ev = app.add_subcommand("evaluate", "run a downstream evaluation experiment");
    eval_cli.add_common(ev, true);
    ev->add_option("--experiment", experiment,
                   "main | ablate_gacl | ablate_combiner | ablate_similarity_source | "
                   "ablate_components | threshold_sweep");
    ev->add_option("--checkpoint", checkpoint, "reuse a trained checkpoint");

    // sweep-thresholds
    PipelineCli sweep_cli;
    auto* sw = app.add_subcommand("sweep-thresholds",
                                  "vary one similarity threshold with the other at its optimum");
    sweep_cli.add_common(sw, false);

    // ablate-similarity
    PipelineCli abl_cli;
    auto* ab = app.add_subcommand("ablate-similarity",
                                  "morphometry- vs latent-similarity group labels");
    abl_cli.add_common(ab, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_cohort(gen_config, gen_out, gen_n, gen_prev, gen_rho, gen_seed, gen_task);
        if (rr->parsed()) return cmd_render_reports(rr_cohort, rr_out, rr_dir);
        if (tr->parsed()) return cmd_train_align(train_cli, tune_trials);
        if (ev->parsed()) return cmd_evaluate(eval_cli, experiment, checkpoint);
        if (sw->parsed()) return cmd_evaluate(sweep_cli, "threshold_sweep", "");
        if (ab->parsed()) return cmd_evaluate(abl_cli, "ablate_similarity_source", "");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
