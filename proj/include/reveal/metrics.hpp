#pragma once

#include <span>
#include <vector>

namespace reveal::metrics {

// Rank-statistic AUROC with midrank handling of tied scores. Labels are
// 0/1; throws when only one class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct BinaryMetrics {
    double auroc = 0.0;
    double balanced_accuracy = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;
};

// AUROC from raw scores; thresholded metrics from calibrated probabilities
// at probability > threshold. Degenerate denominators yield 0 (F1, MCC).
BinaryMetrics compute_metrics(std::span<const double> scores,
                              std::span<const double> probabilities,
                              std::span<const int> labels, double threshold = 0.5);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0; // two-sided
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom. Requires n >= 2 per sample and nonzero variance in at least one.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

// Hedges' g: pooled-SD Cohen's d times the small-sample correction
// J = 1 - 3 / (4(n1+n2) - 9).
double hedges_g(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta function I_x(a, b), continued-fraction form.
double incomplete_beta(double a, double b, double x);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v); // n-1 denominator
double sample_stddev(std::span<const double> v);

} // namespace reveal::metrics
