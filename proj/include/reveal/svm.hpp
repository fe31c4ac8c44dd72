#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reveal/matrix.hpp"

namespace reveal::svm {

// exp(-gamma * ||x - y||^2)
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

struct SvmParams {
    double c = 1.0;
    double gamma = 0.1;
    // Per-class multipliers on C. With balanced_weights the multipliers are
    // n_total / (2 * n_class); explicit weights apply otherwise.
    bool balanced_weights = true;
    double weight_pos = 1.0;
    double weight_neg = 1.0;
    double tol = 1e-3;
    std::size_t max_iter = 200000;
    // Out-of-fold decision values for the probability calibration.
    std::size_t platt_folds = 5;
    std::uint64_t platt_seed = 0x9e3779b9;
    bool fit_probabilities = true;

    void validate() const;
};

struct SvmModel {
    Matrix support_vectors;         // m x d
    std::vector<double> dual_coef;  // alpha_i * y_i per support vector
    double bias = 0.0;
    double gamma = 0.1;
    double platt_a = 0.0; // p = 1 / (1 + exp(a * f + b))
    double platt_b = 0.0;
    double kkt_residual = 0.0;
    bool probabilities_fitted = false;

    double decision_value(std::span<const double> x) const;
    double probability(std::span<const double> x) const;
};

// Soft-margin RBF SVM trained by sequential minimal optimization with
// per-class box constraints; labels are 0/1. Throws on single-class input
// or when the working-set selection fails to converge.
SvmModel train_svm(const Matrix& x, const std::vector<int>& y, const SvmParams& params);

struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

// Maximum-likelihood sigmoid fit of P(y=1 | f) = 1/(1+exp(a f + b)) with the
// usual smoothed target values; Newton iterations with backtracking.
PlattParams fit_platt(std::span<const double> decision_values, std::span<const int> labels);

// Deterministic stratified fold assignment; per-fold prevalence stays within
// one subject of the global rate.
std::vector<std::size_t> stratified_fold_ids(const std::vector<int>& y, std::size_t folds,
                                             std::uint64_t seed);

} // namespace reveal::svm
