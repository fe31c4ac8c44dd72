#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reveal/align.hpp"
#include "reveal/cohort.hpp"
#include "reveal/matrix.hpp"
#include "reveal/metrics.hpp"
#include "reveal/svm.hpp"

namespace reveal::downstream {

enum class FeatureVariant {
    joint,            // image embedding | text embedding
    image_only,
    text_only,
    image_plus_table, // image embedding | z-scored expanded tabular block
    tabular,          // expanded tabular block | z-scored morphometry, no model
};

const char* variant_name(FeatureVariant v);
FeatureVariant variant_from_name(const std::string& name);

// Feature rows for `indices`. Embedding variants need the trained model and
// the per-subject text feature matrix; variants with a tabular block z-score
// it with statistics from `stats_indices` (the SVM training subjects).
// Profiles must be imputed beforehand for tabular variants.
Matrix build_features(const align::AlignmentModel* model,
                      const std::vector<cohort::Subject>& subjects,
                      const Matrix* text_features, const std::vector<std::size_t>& indices,
                      FeatureVariant variant, const std::vector<std::size_t>& stats_indices);

// One-hot expansion of the 48 risk-factor fields (numeric fields stay single
// columns); optionally appends the 17 morphometry columns. No scaling.
Matrix expand_tabular(const std::vector<cohort::Subject>& subjects,
                      const std::vector<std::size_t>& indices, bool include_morphometry);

struct CvCell {
    double c = 0.0;
    double gamma = 0.0;
    double mean_auroc = 0.0;
};

struct CvSelection {
    double c = 0.0;
    double gamma = 0.0;
    std::vector<CvCell> table;
};

// Stratified k-fold grid search maximizing mean fold AUROC; ties prefer the
// smaller C, then the smaller gamma. Fold count shrinks to the minority
// class size when needed; fewer than 2 usable folds is an error.
CvSelection cross_validate(const Matrix& x, const std::vector<int>& y,
                           std::span<const double> c_grid, std::span<const double> gamma_grid,
                           std::size_t folds, std::uint64_t seed, const svm::SvmParams& base);

struct EvalOutcome {
    metrics::BinaryMetrics test;
    double c = 0.0;
    double gamma = 0.0;
    std::vector<double> test_scores;
    std::vector<double> test_probabilities;
    std::vector<int> test_labels;
};

// Grid-search on the training split, refit on all of it, evaluate once on
// the held-out split.
EvalOutcome fit_and_evaluate(const Matrix& x_train, const std::vector<int>& y_train,
                             const Matrix& x_test, const std::vector<int>& y_test,
                             std::span<const double> c_grid, std::span<const double> gamma_grid,
                             std::size_t folds, std::uint64_t seed, const svm::SvmParams& base);

} // namespace reveal::downstream
