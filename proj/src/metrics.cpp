#include "reveal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reveal/error.hpp"

namespace reveal::metrics {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    const double m = mean(v);
    double ss = 0.0;
    for (const double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double sample_stddev(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw NumericError("auroc: scores and labels must be nonempty and equal length");
    std::size_t n_pos = 0;
    for (const int y : labels) n_pos += y != 0;
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw NumericError("auroc: undefined with a single class");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tied score groups; AUROC from the positive rank sum.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] != 0) pos_rank_sum += midrank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

BinaryMetrics compute_metrics(std::span<const double> scores,
                              std::span<const double> probabilities,
                              std::span<const int> labels, double threshold) {
    if (probabilities.size() != labels.size())
        throw NumericError("compute_metrics: probabilities and labels differ in length");
    BinaryMetrics out;
    out.auroc = auroc(scores, labels);

    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred = probabilities[i] > threshold;
        if (labels[i] != 0)
            pred ? ++tp : ++fn;
        else
            pred ? ++fp : ++tn;
    }
    const double sens = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double spec = tn + fp > 0 ? tn / (tn + fp) : 0.0;
    out.balanced_accuracy = 0.5 * (sens + spec);
    out.f1 = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    out.mcc = denom > 0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    return out;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw NumericError("incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw NumericError("welch_t: need n >= 2 per sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = sample_variance(a), vb = sample_variance(b);
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) throw NumericError("welch_t: both samples have zero variance");

    WelchResult r;
    r.t = (mean(a) - mean(b)) / std::sqrt(se2);
    r.df = se2 * se2 /
           (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    // Two-sided p from the Student t CDF via the incomplete beta function.
    r.p = incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    return r;
}

double hedges_g(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw NumericError("hedges_g: need n >= 2 per sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = sample_variance(a), vb = sample_variance(b);
    const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
    const double diff = mean(a) - mean(b);
    if (pooled == 0.0) {
        if (diff == 0.0) return 0.0; // identical constants: no effect
        throw NumericError("hedges_g: zero pooled variance with distinct means");
    }
    const double d = diff / pooled;
    const double j = 1.0 - 3.0 / (4.0 * (na + nb) - 9.0);
    return j * d;
}

} // namespace reveal::metrics
