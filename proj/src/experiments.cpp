#include "reveal/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "reveal/error.hpp"
#include "reveal/manifest.hpp"

namespace reveal::experiments {

using nlohmann::json;

std::size_t thread_budget() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REVEAL_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(parsed));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(thread_budget(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

bool variant_needs_tabular(downstream::FeatureVariant v) {
    return v == downstream::FeatureVariant::image_plus_table ||
           v == downstream::FeatureVariant::tabular;
}

std::vector<double> gamma_grid_for(const PipelineConfig& cfg, std::size_t feature_dim) {
    std::vector<double> grid;
    for (const double s : cfg.gamma_scales) grid.push_back(s / double(feature_dim));
    return grid;
}

} // namespace

SeedOutcome run_pipeline_once(const std::vector<cohort::Subject>& subjects,
                              const Matrix& text_features, const PipelineConfig& config,
                              std::uint64_t seed, const align::AlignmentModel* pretrained) {
    const auto t0 = std::chrono::steady_clock::now();
    const cohort::CohortSplits splits = cohort::split_cohort(subjects, config.split, seed);

    align::TrainConfig train_cfg = config.train;
    train_cfg.seed = seed;

    SeedOutcome out;
    out.seed = seed;

    const align::AlignmentModel* model_ptr = nullptr;
    align::AlignmentModel model;
    align::TrainLog train_log;
    if (config.variant != downstream::FeatureVariant::tabular) {
        if (pretrained) {
            model_ptr = pretrained;
            out.tau_f_used = train_cfg.tau_f;
            out.tau_t_used = train_cfg.tau_t;
        } else {
            align::TrainInputs inputs;
            inputs.subjects = &subjects;
            inputs.text_features = &text_features;
            inputs.align_train = splits.align_train;
            inputs.align_val = splits.align_val;
            model = align::train(inputs, train_cfg, &train_log);
            model_ptr = &model;
            out.tau_f_used = train_log.tau_f_used;
            out.tau_t_used = train_log.tau_t_used;
        }
    }

    // Tabular blocks need complete profiles; imputation statistics come from
    // the alignment training controls.
    const std::vector<cohort::Subject>* eval_subjects = &subjects;
    std::vector<cohort::Subject> imputed;
    if (variant_needs_tabular(config.variant)) {
        imputed = subjects;
        cohort::impute(imputed, splits.align_train);
        eval_subjects = &imputed;
    }

    const Matrix x_train =
        downstream::build_features(model_ptr, *eval_subjects, &text_features, splits.svm_train,
                                   config.variant, splits.svm_train);
    const Matrix x_test =
        downstream::build_features(model_ptr, *eval_subjects, &text_features, splits.svm_test,
                                   config.variant, splits.svm_train);
    std::vector<int> y_train, y_test;
    for (const std::size_t i : splits.svm_train) y_train.push_back(subjects[i].is_case ? 1 : 0);
    for (const std::size_t i : splits.svm_test) y_test.push_back(subjects[i].is_case ? 1 : 0);

    svm::SvmParams base;
    base.balanced_weights = true;
    base.platt_seed = seed ^ 0x9e3779b97f4a7c15ULL;
    const std::vector<double> gammas = gamma_grid_for(config, x_train.cols);
    const downstream::EvalOutcome eval = downstream::fit_and_evaluate(
        x_train, y_train, x_test, y_test, config.c_grid, gammas, config.cv_folds, seed, base);

    out.test = eval.test;
    out.c = eval.c;
    out.gamma = eval.gamma;
    for (std::size_t r = 0; r < splits.svm_test.size(); ++r)
        out.predictions.push_back({subjects[splits.svm_test[r]].id, eval.test_labels[r],
                                   eval.test_scores[r], eval.test_probabilities[r]});
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::main: return "main";
        case ExperimentKind::ablate_gacl: return "ablate_gacl";
        case ExperimentKind::ablate_combiner: return "ablate_combiner";
        case ExperimentKind::ablate_similarity_source: return "ablate_similarity_source";
        case ExperimentKind::ablate_components: return "ablate_components";
        case ExperimentKind::threshold_sweep: return "threshold_sweep";
    }
    return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "main") return ExperimentKind::main;
    if (name == "ablate_gacl") return ExperimentKind::ablate_gacl;
    if (name == "ablate_combiner") return ExperimentKind::ablate_combiner;
    if (name == "ablate_similarity_source") return ExperimentKind::ablate_similarity_source;
    if (name == "ablate_components") return ExperimentKind::ablate_components;
    if (name == "threshold_sweep") return ExperimentKind::threshold_sweep;
    throw ConfigError("unknown experiment kind: " + name);
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.mean = metrics::mean(values);
    s.stddev = values.size() > 1 ? metrics::sample_stddev(values)
                                 : std::numeric_limits<double>::quiet_NaN();
    return s;
}

std::vector<double> metric_series(const ArmResult& arm, double metrics::BinaryMetrics::* field) {
    std::vector<double> v;
    for (const SeedOutcome& s : arm.seeds) v.push_back(s.test.*field);
    return v;
}

ArmResult run_arm(const std::vector<cohort::Subject>& subjects, const Matrix& text_features,
                  const PipelineConfig& config, const ExperimentSpec& spec,
                  const std::string& name) {
    ArmResult arm;
    arm.name = name;
    arm.seeds.resize(spec.n_seeds);
    parallel_for(spec.n_seeds, [&](std::size_t i) {
        arm.seeds[i] = run_pipeline_once(subjects, text_features, config, spec.base_seed + i);
    });
    arm.auroc = summarize(metric_series(arm, &metrics::BinaryMetrics::auroc));
    arm.balanced_accuracy = summarize(metric_series(arm, &metrics::BinaryMetrics::balanced_accuracy));
    arm.f1 = summarize(metric_series(arm, &metrics::BinaryMetrics::f1));
    arm.mcc = summarize(metric_series(arm, &metrics::BinaryMetrics::mcc));
    return arm;
}

// Welch p and Hedges g of an arm against the reference, one row per metric.
ArmComparison compare_arms(const ArmResult& arm, const ArmResult& reference) {
    ArmComparison c;
    c.arm = arm.name;
    auto fill = [&](double metrics::BinaryMetrics::* field, double& p, double& g) {
        const std::vector<double> a = metric_series(arm, field);
        const std::vector<double> b = metric_series(reference, field);
        try {
            const metrics::WelchResult w = metrics::welch_t(a, b);
            p = w.p;
        } catch (const NumericError&) {
            p = 1.0; // degenerate variance: no detectable difference
        }
        try {
            g = metrics::hedges_g(a, b);
        } catch (const NumericError&) {
            g = 0.0;
        }
    };
    fill(&metrics::BinaryMetrics::auroc, c.p_auroc, c.g_auroc);
    fill(&metrics::BinaryMetrics::balanced_accuracy, c.p_ba, c.g_ba);
    fill(&metrics::BinaryMetrics::f1, c.p_f1, c.g_f1);
    fill(&metrics::BinaryMetrics::mcc, c.p_mcc, c.g_mcc);
    return c;
}

Matrix embed_all(const std::vector<cohort::Subject>& subjects,
                 const narrative::TextFeaturizerConfig& text_cfg) {
    std::vector<narrative::ClinicalReport> reports;
    reports.reserve(subjects.size());
    for (const cohort::Subject& s : subjects)
        reports.push_back(narrative::render_report(s.id, s.profile));
    return narrative::embed_batch(reports, text_cfg);
}

} // namespace

ExperimentReport run_experiment(const std::vector<cohort::Subject>& subjects,
                                const PipelineConfig& config, const ExperimentSpec& spec) {
    if (spec.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    if (spec.kind == ExperimentKind::threshold_sweep)
        throw ConfigError("threshold_sweep is served by run_threshold_sweep");

    const Matrix text_features = embed_all(subjects, config.text);

    ExperimentReport report;
    report.kind = kind_name(spec.kind);
    report.task = spec.task;

    // Arms in table order; the reference configuration comes last.
    switch (spec.kind) {
        case ExperimentKind::main: {
            report.arms.push_back(run_arm(subjects, text_features, config, spec, "joint_gacl"));
            break;
        }
        case ExperimentKind::ablate_gacl: {
            PipelineConfig no_gacl = config;
            no_gacl.train.loss = align::LossKind::infonce;
            report.arms.push_back(run_arm(subjects, text_features, no_gacl, spec, "no_gacl"));
            PipelineConfig with_gacl = config;
            with_gacl.train.loss = align::LossKind::gacl;
            report.arms.push_back(run_arm(subjects, text_features, with_gacl, spec, "with_gacl"));
            break;
        }
        case ExperimentKind::ablate_combiner: {
            PipelineConfig and_cfg = config;
            and_cfg.train.combiner = gacl::Combiner::AND;
            report.arms.push_back(run_arm(subjects, text_features, and_cfg, spec, "and"));
            PipelineConfig or_cfg = config;
            or_cfg.train.combiner = gacl::Combiner::OR;
            report.arms.push_back(run_arm(subjects, text_features, or_cfg, spec, "or"));
            break;
        }
        case ExperimentKind::ablate_similarity_source: {
            PipelineConfig latent = config;
            latent.train.image_similarity_source = gacl::SimilaritySource::image_latent;
            report.arms.push_back(run_arm(subjects, text_features, latent, spec, "latent"));
            PipelineConfig morpho = config;
            morpho.train.image_similarity_source = gacl::SimilaritySource::morphometry;
            report.arms.push_back(run_arm(subjects, text_features, morpho, spec, "morphometry"));
            break;
        }
        case ExperimentKind::ablate_components: {
            const std::pair<downstream::FeatureVariant, const char*> variants[] = {
                {downstream::FeatureVariant::tabular, "baseline_tabular"},
                {downstream::FeatureVariant::image_only, "image_only"},
                {downstream::FeatureVariant::image_plus_table, "image_plus_table"},
                {downstream::FeatureVariant::text_only, "text_only"},
                {downstream::FeatureVariant::joint, "image_plus_text"},
            };
            for (const auto& [variant, name] : variants) {
                PipelineConfig c = config;
                c.variant = variant;
                report.arms.push_back(run_arm(subjects, text_features, c, spec, name));
            }
            break;
        }
        case ExperimentKind::threshold_sweep: break; // unreachable
    }

    if (report.arms.size() > 1 && spec.n_seeds > 1) {
        const ArmResult& reference = report.arms.back();
        for (std::size_t a = 0; a + 1 < report.arms.size(); ++a)
            report.comparisons.push_back(compare_arms(report.arms[a], reference));
    }
    return report;
}

SweepReport run_threshold_sweep(const std::vector<cohort::Subject>& subjects,
                                const PipelineConfig& config, const ExperimentSpec& spec) {
    const Matrix text_features = embed_all(subjects, config.text);

    // Threshold candidates come from the quartiles of the dev-set similarity
    // distributions under the first seed's split.
    const cohort::CohortSplits splits = cohort::split_cohort(subjects, config.split, spec.base_seed);
    align::TrainInputs inputs;
    inputs.subjects = &subjects;
    inputs.text_features = &text_features;
    inputs.align_train = splits.align_train;
    inputs.align_val = splits.align_val;
    align::TrainConfig probe = config.train;
    probe.seed = spec.base_seed;
    const align::DevQuantiles dev = align::dev_similarity_quantiles(inputs, probe);

    auto quartile_grid = [](const Matrix& sims) {
        std::vector<double> off;
        for (std::size_t i = 0; i < sims.rows; ++i)
            for (std::size_t j = i + 1; j < sims.cols; ++j) off.push_back(sims(i, j));
        return std::vector<double>{gacl::quantile(off, 0.25), gacl::quantile(off, 0.50),
                                   gacl::quantile(off, 0.75), gacl::quantile(off, 1.00)};
    };
    const std::vector<std::size_t> dev_ids = align::dev_slice_indices(inputs, probe);
    const Matrix morpho_sims =
        gacl::similarity(gacl::z_normalize(cohort::morphometry_matrix(subjects, dev_ids)),
                         !config.train.morphometry_raw_dot);
    Matrix text_rows(dev_ids.size(), text_features.cols);
    for (std::size_t r = 0; r < dev_ids.size(); ++r)
        std::copy(text_features.row(dev_ids[r]), text_features.row(dev_ids[r]) + text_rows.cols,
                  text_rows.row(r));
    const Matrix text_sims = gacl::similarity(text_rows, true);

    SweepReport report;
    report.task = spec.task;
    report.tau_f_opt = config.train.thresholds_from_quantiles ? dev.morphometry.first
                                                              : config.train.tau_f;
    report.tau_t_opt = config.train.thresholds_from_quantiles ? dev.text.first
                                                              : config.train.tau_t;

    auto grid_with_opt = [](std::vector<double> grid, double opt) {
        grid.push_back(opt);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        return grid;
    };
    const std::vector<double> grid_f = grid_with_opt(quartile_grid(morpho_sims), report.tau_f_opt);
    const std::vector<double> grid_t = grid_with_opt(quartile_grid(text_sims), report.tau_t_opt);

    auto mean_metrics = [&](double tau_f, double tau_t) {
        PipelineConfig cell_cfg = config;
        cell_cfg.train.tau_f = tau_f;
        cell_cfg.train.tau_t = tau_t;
        cell_cfg.train.thresholds_from_quantiles = false;
        std::vector<SeedOutcome> seeds(spec.n_seeds);
        parallel_for(spec.n_seeds, [&](std::size_t i) {
            seeds[i] = run_pipeline_once(subjects, text_features, cell_cfg, spec.base_seed + i);
        });
        metrics::BinaryMetrics m;
        for (const SeedOutcome& s : seeds) {
            m.auroc += s.test.auroc / double(spec.n_seeds);
            m.balanced_accuracy += s.test.balanced_accuracy / double(spec.n_seeds);
            m.f1 += s.test.f1 / double(spec.n_seeds);
            m.mcc += s.test.mcc / double(spec.n_seeds);
        }
        return m;
    };

    report.reference = mean_metrics(report.tau_f_opt, report.tau_t_opt);
    auto pct = [](double value, double ref) {
        return ref != 0.0 ? (value - ref) / std::fabs(ref) * 100.0 : 0.0;
    };
    auto add_cells = [&](const std::vector<double>& grid, bool vary_image) {
        for (const double tau : grid) {
            const bool is_opt = tau == (vary_image ? report.tau_f_opt : report.tau_t_opt);
            // Determinism makes the optimum-vs-optimum cell identical to the
            // reference run, so its differences are exactly zero.
            const metrics::BinaryMetrics m =
                is_opt ? report.reference
                       : (vary_image ? mean_metrics(tau, report.tau_t_opt)
                                     : mean_metrics(report.tau_f_opt, tau));
            SweepCell cell;
            cell.modality = vary_image ? "image" : "text";
            cell.tau = tau;
            cell.pct_auroc = pct(m.auroc, report.reference.auroc);
            cell.pct_ba = pct(m.balanced_accuracy, report.reference.balanced_accuracy);
            cell.pct_f1 = pct(m.f1, report.reference.f1);
            cell.pct_mcc = pct(m.mcc, report.reference.mcc);
            report.cells.push_back(cell);
        }
    };
    add_cells(grid_f, true);
    add_cells(grid_t, false);
    return report;
}

namespace {

std::string fmt(double v, int prec = 3) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string mean_std(const MetricSummary& s) {
    if (std::isnan(s.stddev)) return fmt(s.mean);
    return fmt(s.mean) + "±" + fmt(s.stddev);
}

json summary_to_json(const MetricSummary& s) {
    json j{{"mean", s.mean}};
    if (!std::isnan(s.stddev)) j["std"] = s.stddev;
    return j;
}

} // namespace

std::string experiment_report_text(const ExperimentReport& report) {
    std::ostringstream out;
    out << "# experiment: " << report.kind << "  task: " << report.task << "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-20s %-15s %-18s %-15s %-15s\n", "", "AUROC",
                  "Balanced Accuracy", "F1-Score", "MCC");
    out << line;
    for (const ArmResult& arm : report.arms) {
        std::snprintf(line, sizeof(line), "%-20s %-15s %-18s %-15s %-15s\n", arm.name.c_str(),
                      mean_std(arm.auroc).c_str(), mean_std(arm.balanced_accuracy).c_str(),
                      mean_std(arm.f1).c_str(), mean_std(arm.mcc).c_str());
        out << line;
    }
    if (!report.comparisons.empty()) {
        out << "\n# Welch p (Hedges g) vs " << report.arms.back().name << "\n";
        for (const ArmComparison& c : report.comparisons) {
            std::snprintf(line, sizeof(line), "%-20s %.2f (%.2f)      %.2f (%.2f)        "
                                              "%.2f (%.2f)     %.2f (%.2f)\n",
                          c.arm.c_str(), c.p_auroc, c.g_auroc, c.p_ba, c.g_ba, c.p_f1, c.g_f1,
                          c.p_mcc, c.g_mcc);
            out << line;
        }
    }
    return out.str();
}

std::string sweep_report_text(const SweepReport& report) {
    std::ostringstream out;
    out << "# threshold sweep  task: " << report.task << "\n";
    out << "# optimum: tau_F=" << fmt(report.tau_f_opt, 4) << " tau_T=" << fmt(report.tau_t_opt, 4)
        << "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-8s %-10s %-12s %-12s %-12s %-12s\n", "modality", "tau",
                  "auroc_pct", "ba_pct", "f1_pct", "mcc_pct");
    out << line;
    for (const SweepCell& c : report.cells) {
        std::snprintf(line, sizeof(line), "%-8s %-10s %-12s %-12s %-12s %-12s\n",
                      c.modality.c_str(), fmt(c.tau, 4).c_str(), fmt(c.pct_auroc, 2).c_str(),
                      fmt(c.pct_ba, 2).c_str(), fmt(c.pct_f1, 2).c_str(),
                      fmt(c.pct_mcc, 2).c_str());
        out << line;
    }
    return out.str();
}

void write_experiment_report(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    json arms = json::array();
    for (const ArmResult& arm : report.arms) {
        json seeds = json::array();
        // Wall-clock timings stay out of the report so identical runs stay
        // byte-identical; the manifest carries them instead.
        for (const SeedOutcome& s : arm.seeds)
            seeds.push_back({{"seed", s.seed},
                             {"auroc", s.test.auroc},
                             {"balanced_accuracy", s.test.balanced_accuracy},
                             {"f1", s.test.f1},
                             {"mcc", s.test.mcc},
                             {"c", s.c},
                             {"gamma", s.gamma},
                             {"tau_f_used", s.tau_f_used},
                             {"tau_t_used", s.tau_t_used}});
        arms.push_back({{"name", arm.name},
                        {"auroc", summary_to_json(arm.auroc)},
                        {"balanced_accuracy", summary_to_json(arm.balanced_accuracy)},
                        {"f1", summary_to_json(arm.f1)},
                        {"mcc", summary_to_json(arm.mcc)},
                        {"seeds", seeds}});
    }
    json comparisons = json::array();
    for (const ArmComparison& c : report.comparisons)
        comparisons.push_back({{"arm", c.arm},
                               {"auroc", {{"p", c.p_auroc}, {"g", c.g_auroc}}},
                               {"balanced_accuracy", {{"p", c.p_ba}, {"g", c.g_ba}}},
                               {"f1", {{"p", c.p_f1}, {"g", c.g_f1}}},
                               {"mcc", {{"p", c.p_mcc}, {"g", c.g_mcc}}}});
    const json j{{"kind", report.kind},
                 {"task", report.task},
                 {"arms", arms},
                 {"comparisons", comparisons}};
    manifest::atomic_write(out_dir + "/report.json", j.dump(1) + "\n");

    std::ostringstream csv;
    csv << "arm,auroc_mean,auroc_std,ba_mean,ba_std,f1_mean,f1_std,mcc_mean,mcc_std\n";
    for (const ArmResult& arm : report.arms) {
        csv << arm.name << "," << fmt(arm.auroc.mean, 6) << "," << fmt(arm.auroc.stddev, 6) << ","
            << fmt(arm.balanced_accuracy.mean, 6) << "," << fmt(arm.balanced_accuracy.stddev, 6)
            << "," << fmt(arm.f1.mean, 6) << "," << fmt(arm.f1.stddev, 6) << ","
            << fmt(arm.mcc.mean, 6) << "," << fmt(arm.mcc.stddev, 6) << "\n";
    }
    manifest::atomic_write(out_dir + "/report.csv", csv.str());

    std::ostringstream preds;
    preds << "arm,seed,subject_id,label,score,probability\n";
    char buf[160];
    for (const ArmResult& arm : report.arms)
        for (const SeedOutcome& s : arm.seeds)
            for (const Prediction& p : s.predictions) {
                std::snprintf(buf, sizeof(buf), "%s,%llu,%s,%d,%.17g,%.17g\n", arm.name.c_str(),
                              static_cast<unsigned long long>(s.seed), p.subject_id.c_str(),
                              p.label, p.score, p.probability);
                preds << buf;
            }
    manifest::atomic_write(out_dir + "/predictions.csv", preds.str());
    manifest::atomic_write(out_dir + "/report.txt", experiment_report_text(report));
}

void write_sweep_report(const SweepReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    json cells = json::array();
    for (const SweepCell& c : report.cells)
        cells.push_back({{"modality", c.modality},
                         {"tau", c.tau},
                         {"pct_auroc", c.pct_auroc},
                         {"pct_balanced_accuracy", c.pct_ba},
                         {"pct_f1", c.pct_f1},
                         {"pct_mcc", c.pct_mcc}});
    const json j{{"task", report.task},
                 {"tau_f_opt", report.tau_f_opt},
                 {"tau_t_opt", report.tau_t_opt},
                 {"reference",
                  {{"auroc", report.reference.auroc},
                   {"balanced_accuracy", report.reference.balanced_accuracy},
                   {"f1", report.reference.f1},
                   {"mcc", report.reference.mcc}}},
                 {"cells", cells}};
    manifest::atomic_write(out_dir + "/sweep.json", j.dump(1) + "\n");

    std::ostringstream csv;
    csv << "modality,tau,pct_auroc,pct_ba,pct_f1,pct_mcc\n";
    char buf[160];
    for (const SweepCell& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.modality.c_str(),
                      c.tau, c.pct_auroc, c.pct_ba, c.pct_f1, c.pct_mcc);
        csv << buf;
    }
    manifest::atomic_write(out_dir + "/sweep.csv", csv.str());
    manifest::atomic_write(out_dir + "/sweep.txt", sweep_report_text(report));
}

} // namespace reveal::experiments
