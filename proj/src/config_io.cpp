#include "reveal/config_io.hpp"

#include "reveal/error.hpp"

namespace reveal::cohort {

using nlohmann::json;

json cohort_config_to_json(const CohortConfig& c) {
    return json{
        {"n_subjects", c.n_subjects},
        {"prevalence", c.prevalence},
        {"signal_strength", c.signal_strength},
        {"noise_morphometry", c.noise_morphometry},
        {"noise_image", c.noise_image},
        {"noise_risk_factors", c.noise_risk_factors},
        {"image_dim", c.image_dim},
        {"image_nuisance_dims", c.image_nuisance_dims},
        {"missing_rate", c.missing_rate},
        {"onset_years_lo", c.onset_years_lo},
        {"onset_years_hi", c.onset_years_hi},
        {"seed", c.seed},
    };
}

CohortConfig cohort_config_from_json(const json& j) {
    CohortConfig c;
    c.n_subjects = j.value("n_subjects", c.n_subjects);
    c.prevalence = j.value("prevalence", c.prevalence);
    c.signal_strength = j.value("signal_strength", c.signal_strength);
    c.noise_morphometry = j.value("noise_morphometry", c.noise_morphometry);
    c.noise_image = j.value("noise_image", c.noise_image);
    c.noise_risk_factors = j.value("noise_risk_factors", c.noise_risk_factors);
    c.image_dim = j.value("image_dim", c.image_dim);
    c.image_nuisance_dims = j.value("image_nuisance_dims", c.image_nuisance_dims);
    c.missing_rate = j.value("missing_rate", c.missing_rate);
    c.onset_years_lo = j.value("onset_years_lo", c.onset_years_lo);
    c.onset_years_hi = j.value("onset_years_hi", c.onset_years_hi);
    c.seed = j.value("seed", c.seed);
    return c;
}

json split_config_to_json(const SplitConfig& c) {
    return json{
        {"align_train_fraction", c.align_train_fraction},
        {"align_val_fraction", c.align_val_fraction},
        {"eval_prevalence", c.eval_prevalence},
        {"prevalence_tolerance", c.prevalence_tolerance},
        {"svm_test_fraction", c.svm_test_fraction},
    };
}

SplitConfig split_config_from_json(const json& j) {
    SplitConfig c;
    c.align_train_fraction = j.value("align_train_fraction", c.align_train_fraction);
    c.align_val_fraction = j.value("align_val_fraction", c.align_val_fraction);
    c.eval_prevalence = j.value("eval_prevalence", c.eval_prevalence);
    c.prevalence_tolerance = j.value("prevalence_tolerance", c.prevalence_tolerance);
    c.svm_test_fraction = j.value("svm_test_fraction", c.svm_test_fraction);
    return c;
}

} // namespace reveal::cohort

namespace reveal::experiments {

using nlohmann::json;

json pipeline_config_to_json(const PipelineConfig& c) {
    return json{
        {"split", cohort::split_config_to_json(c.split)},
        {"train", align::train_config_to_json(c.train)},
        {"text", {{"dim", c.text.dim}, {"hash_seed", c.text.hash_seed}}},
        {"variant", downstream::variant_name(c.variant)},
        {"c_grid", c.c_grid},
        {"gamma_scales", c.gamma_scales},
        {"cv_folds", c.cv_folds},
    };
}

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig c;
    if (j.contains("split")) c.split = cohort::split_config_from_json(j.at("split"));
    if (j.contains("train")) c.train = align::train_config_from_json(j.at("train"));
    if (j.contains("text")) {
        c.text.dim = j.at("text").value("dim", c.text.dim);
        c.text.hash_seed = j.at("text").value("hash_seed", c.text.hash_seed);
    }
    if (j.contains("variant")) c.variant = downstream::variant_from_name(j.at("variant"));
    if (j.contains("c_grid")) c.c_grid = j.at("c_grid").get<std::vector<double>>();
    if (j.contains("gamma_scales")) c.gamma_scales = j.at("gamma_scales").get<std::vector<double>>();
    c.cv_folds = j.value("cv_folds", c.cv_folds);
    return c;
}

} // namespace reveal::experiments
