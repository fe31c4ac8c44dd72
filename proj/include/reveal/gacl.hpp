#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "reveal/matrix.hpp"

namespace reveal::gacl {

enum class SimilaritySource { morphometry, text, image_latent };

enum class Combiner { OR, AND };

struct GroupMask {
    std::size_t n = 0;
    std::vector<std::uint8_t> values; // row-major n x n booleans

    GroupMask() = default;
    explicit GroupMask(std::size_t size) : n(size), values(size * size, 0) {}
    bool at(std::size_t i, std::size_t j) const { return values[i * n + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { values[i * n + j] = v ? 1 : 0; }
};

// N x N matrix over {+1, -1}; diagonal always +1.
struct LabelMatrix {
    std::size_t n = 0;
    std::vector<std::int8_t> values;

    LabelMatrix() = default;
    explicit LabelMatrix(std::size_t size) : n(size), values(size * size, -1) {}
    int at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    void set(std::size_t i, std::size_t j, int v) { values[i * n + j] = static_cast<std::int8_t>(v); }
    double positive_fraction() const;
};

// Standardizes each column to mean 0, sample std 1 (n-1 denominator).
// Throws NumericError naming the feature when a column has zero variance.
Matrix z_normalize(const Matrix& raw, const std::vector<std::string>* feature_names = nullptr);

// S = X_hat * X_hat^T with rows unit-normalized when row_normalize is set
// (cosine similarity); plain dot products otherwise.
Matrix similarity(const Matrix& x, bool row_normalize = true);

// mask[i][j] = S[i][j] > tau (strict), with the diagonal forced true.
GroupMask threshold_mask(const Matrix& s, double tau);

// L = +1 where combiner(mask_f, mask_t) is true, -1 elsewhere; diagonal +1.
LabelMatrix group_labels(const GroupMask& mask_f, const GroupMask& mask_t, Combiner combiner);

// (Q3, max) of the off-diagonal upper-triangle entries of a similarity
// matrix, with linearly interpolated quantiles. This is the search range
// for the similarity thresholds; Q3 alone is the latent-similarity default.
std::pair<double, double> quantile_thresholds(const Matrix& s_dev);

// Linearly interpolated quantile (the common "type 7" convention) of an
// unsorted sample. q in [0, 1].
double quantile(std::vector<double> sample, double q);

} // namespace reveal::gacl
