// Test-only reference implementations, kept independent of the library code
// they check: scalar-loop label construction, a plain logistic-regression
// fit, and exhaustive AUROC pair counting.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "reveal/gacl.hpp"
#include "reveal/matrix.hpp"
#include "reveal/rng.hpp"

namespace oracles {

// Entry-wise reimplementation of the z-normalize -> cosine -> threshold ->
// combine chain, all scalar loops.
inline reveal::gacl::LabelMatrix brute_force_labels(const reveal::Matrix& morpho_raw,
                                                    const reveal::Matrix& text_rows, double tau_f,
                                                    double tau_t, bool use_or,
                                                    bool row_normalize_morpho = true) {
    const std::size_t n = morpho_raw.rows;

    // Column z-scores with the n-1 denominator.
    reveal::Matrix f(n, morpho_raw.cols);
    for (std::size_t j = 0; j < morpho_raw.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += morpho_raw(i, j);
        mean /= double(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (morpho_raw(i, j) - mean) * (morpho_raw(i, j) - mean);
        const double sd = std::sqrt(ss / double(n - 1));
        for (std::size_t i = 0; i < n; ++i) f(i, j) = (morpho_raw(i, j) - mean) / sd;
    }

    auto cosine = [](const reveal::Matrix& x, std::size_t a, std::size_t b, bool normalize) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t k = 0; k < x.cols; ++k) {
            dot += x(a, k) * x(b, k);
            na += x(a, k) * x(a, k);
            nb += x(b, k) * x(b, k);
        }
        return normalize ? dot / (std::sqrt(na) * std::sqrt(nb)) : dot;
    };

    reveal::gacl::LabelMatrix labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const bool mf = i == j || cosine(f, i, j, row_normalize_morpho) > tau_f;
            const bool mt = i == j || cosine(text_rows, i, j, true) > tau_t;
            const bool grouped = use_or ? (mf || mt) : (mf && mt);
            labels.set(i, j, i == j || grouped ? +1 : -1);
        }
    }
    return labels;
}

struct LogisticFit {
    std::vector<double> w;
    double b = 0.0;
};

// Plain L2-regularized logistic regression by full-batch gradient descent on
// z-scored features; the independent predictor used to certify planted
// signal.
inline LogisticFit fit_logistic(const reveal::Matrix& x, const std::vector<int>& y,
                                double l2 = 1e-3, int iters = 800, double lr = 0.5) {
    const std::size_t n = x.rows, d = x.cols;
    std::vector<double> mean(d, 0.0), sd(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += x(i, j);
        m /= double(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
        mean[j] = m;
        sd[j] = std::sqrt(ss / double(n)) + 1e-12;
    }

    LogisticFit fit;
    fit.w.assign(d, 0.0);
    std::vector<double> gw(d);
    for (int it = 0; it < iters; ++it) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = fit.b;
            for (std::size_t j = 0; j < d; ++j) z += fit.w[j] * (x(i, j) - mean[j]) / sd[j];
            const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
            const double err = p - (y[i] != 0 ? 1.0 : 0.0);
            for (std::size_t j = 0; j < d; ++j) gw[j] += err * (x(i, j) - mean[j]) / sd[j];
            gb += err;
        }
        for (std::size_t j = 0; j < d; ++j)
            fit.w[j] -= lr * (gw[j] / double(n) + l2 * fit.w[j]);
        fit.b -= lr * gb / double(n);
    }
    // Fold the standardization into the returned coefficients.
    LogisticFit out;
    out.w.assign(d, 0.0);
    out.b = fit.b;
    for (std::size_t j = 0; j < d; ++j) {
        out.w[j] = fit.w[j] / sd[j];
        out.b -= fit.w[j] * mean[j] / sd[j];
    }
    return out;
}

inline double logistic_score(const LogisticFit& fit, const double* row) {
    double z = fit.b;
    for (std::size_t j = 0; j < fit.w.size(); ++j) z += fit.w[j] * row[j];
    return z;
}

// AUROC by exhaustive pair counting with half credit for ties.
inline double pair_count_auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / double(pairs);
}

} // namespace oracles
