#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reveal/fields.hpp"
#include "reveal/matrix.hpp"

namespace reveal::cohort {

inline constexpr std::size_t kMorphometryCount = 17;

// 2 optic-nerve-head features followed by 5 vascular measures for each of
// artery, vein, and both combined.
const std::array<std::string, kMorphometryCount>& morphometry_names();

using MorphometryVector = std::array<double, kMorphometryCount>;

// Throws when a cup-to-disc ratio leaves (0, 1] or any entry is not a
// positive finite value.
void validate_morphometry(const MorphometryVector& m);

struct Subject {
    std::string id;
    RiskFactorProfile profile;
    MorphometryVector morphometry{};
    std::vector<double> image_proxy;
    bool is_case = false;
    std::optional<double> years_to_onset; // present iff is_case
};

struct CohortConfig {
    std::size_t n_subjects = 1000;
    double prevalence = 0.12;
    double signal_strength = 0.0; // rho in [0, 1]: 0 = pure noise cohort
    double noise_morphometry = 0.8;
    double noise_image = 2.0;
    double noise_risk_factors = 1.0;
    std::size_t image_dim = 32;
    std::size_t image_nuisance_dims = 16; // trailing pure-noise columns
    double missing_rate = 0.03;
    double onset_years_lo = 1.5;
    double onset_years_hi = 11.58;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError
};

// Draws a per-subject latent risk z ~ N(0,1); the top-prevalence slice by z
// becomes the incident cases. Morphometry, a subset of risk-factor fields,
// and the image proxy all carry rho-scaled projections of z, so raising
// signal_strength makes every modality more informative of the label.
std::vector<Subject> generate_cohort(const CohortConfig& config);

struct SplitConfig {
    double align_train_fraction = 0.10; // fractions of all controls
    double align_val_fraction = 0.04;
    double eval_prevalence = 0.12;
    double prevalence_tolerance = 0.02;
    double svm_test_fraction = 0.20;

    void validate() const;
};

struct CohortSplits {
    std::vector<std::size_t> align_train; // indices into the subject list
    std::vector<std::size_t> align_val;
    std::vector<std::size_t> eval_pool;
    std::vector<std::size_t> svm_train; // partition of eval_pool
    std::vector<std::size_t> svm_test;
};

// Controls go to the alignment sets by fraction; every case plus age/sex
// matched controls form the evaluation pool at the target prevalence, which
// is then split 80/20 into svm_train/svm_test stratified by label.
// Throws NumericError naming the control shortfall when matching is
// infeasible within the prevalence tolerance.
CohortSplits split_cohort(const std::vector<Subject>& subjects, const SplitConfig& config,
                          std::uint64_t seed);

struct ImputationRecord {
    std::string field;
    std::string value;   // rendered statistic used as the fill value
    std::size_t filled = 0;
};

// Most-frequent fill for categorical fields, median fill for continuous
// ones. Statistics come from `stats_indices` only (the alignment training
// subjects); fills apply to the whole list. Throws when a field that needs
// filling has no observed value in the statistics subset.
std::vector<ImputationRecord> impute(std::vector<Subject>& subjects,
                                     const std::vector<std::size_t>& stats_indices);

void save_cohort_csv(const std::vector<Subject>& subjects, const std::string& path);
std::vector<Subject> load_cohort_csv(const std::string& path);

// N x 17 matrix of raw morphometry rows for the given subjects.
Matrix morphometry_matrix(const std::vector<Subject>& subjects,
                          const std::vector<std::size_t>& indices);

// N x image_dim matrix of image-proxy rows.
Matrix image_proxy_matrix(const std::vector<Subject>& subjects,
                          const std::vector<std::size_t>& indices);

} // namespace reveal::cohort
