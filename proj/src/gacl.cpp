#include "reveal/gacl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reveal/error.hpp"

namespace reveal::gacl {

double LabelMatrix::positive_fraction() const {
    if (n == 0) return 0.0;
    std::size_t pos = 0;
    for (const auto v : values)
        if (v > 0) ++pos;
    return static_cast<double>(pos) / static_cast<double>(values.size());
}

Matrix z_normalize(const Matrix& raw, const std::vector<std::string>* feature_names) {
    if (raw.rows < 2) throw NumericError("z_normalize: need at least 2 rows");
    Matrix out = raw;
    for (std::size_t j = 0; j < raw.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < raw.rows; ++i) mean += raw(i, j);
        mean /= static_cast<double>(raw.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < raw.rows; ++i) {
            const double d = raw(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(raw.rows - 1));
        if (sd == 0.0) {
            const std::string name = feature_names && j < feature_names->size()
                                         ? (*feature_names)[j]
                                         : "column " + std::to_string(j);
            throw NumericError("z_normalize: zero variance in feature '" + name + "'");
        }
        for (std::size_t i = 0; i < raw.rows; ++i) out(i, j) = (raw(i, j) - mean) / sd;
    }
    return out;
}

Matrix similarity(const Matrix& x, bool row_normalize) {
    for (const double v : x.data)
        if (!std::isfinite(v)) throw NumericError("similarity: non-finite input");
    if (!row_normalize) return matmul_bt(x, x);
    const Matrix xn = row_unit_normalize(x);
    return matmul_bt(xn, xn);
}

GroupMask threshold_mask(const Matrix& s, double tau) {
    if (s.rows != s.cols) throw NumericError("threshold_mask: matrix is not square");
    if (!std::isfinite(tau)) throw ConfigError("threshold_mask: tau must be finite");
    GroupMask mask(s.rows);
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j) mask.set(i, j, s(i, j) > tau);
    for (std::size_t i = 0; i < s.rows; ++i) mask.set(i, i, true);
    return mask;
}

LabelMatrix group_labels(const GroupMask& mask_f, const GroupMask& mask_t, Combiner combiner) {
    if (mask_f.n != mask_t.n) throw NumericError("group_labels: mask shapes differ");
    LabelMatrix labels(mask_f.n);
    for (std::size_t i = 0; i < mask_f.n; ++i) {
        for (std::size_t j = 0; j < mask_f.n; ++j) {
            const bool grouped = combiner == Combiner::OR ? (mask_f.at(i, j) || mask_t.at(i, j))
                                                          : (mask_f.at(i, j) && mask_t.at(i, j));
            labels.set(i, j, grouped ? +1 : -1);
        }
        labels.set(i, i, +1);
    }
    return labels;
}

double quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw NumericError("quantile: empty sample");
    std::sort(sample.begin(), sample.end());
    const double h = q * static_cast<double>(sample.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sample[lo] + frac * (sample[hi] - sample[lo]);
}

std::pair<double, double> quantile_thresholds(const Matrix& s_dev) {
    if (s_dev.rows != s_dev.cols) throw NumericError("quantile_thresholds: matrix is not square");
    if (s_dev.rows < 3) throw NumericError("quantile_thresholds: need at least 3 rows");
    std::vector<double> off;
    off.reserve(s_dev.rows * (s_dev.rows - 1) / 2);
    for (std::size_t i = 0; i < s_dev.rows; ++i)
        for (std::size_t j = i + 1; j < s_dev.cols; ++j) off.push_back(s_dev(i, j));
    if (off.size() < 4) throw NumericError("quantile_thresholds: need at least 4 off-diagonal entries");
    const double q3 = quantile(off, 0.75);
    const double mx = *std::max_element(off.begin(), off.end());
    return {q3, mx};
}

} // namespace reveal::gacl
