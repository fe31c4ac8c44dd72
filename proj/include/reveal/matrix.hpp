#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "reveal/error.hpp"

namespace reveal {

// Row-major dense matrix of doubles. Deliberately minimal: the batch sizes
// in this project are small enough that plain loops beat pulling in a
// linear-algebra dependency.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

// C = A * B^T. Shapes: (m x k) * (n x k)^T -> (m x n).
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw NumericError("matmul_bt: inner dimensions differ");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j)
            c(i, j) = dot(a.row(i), b.row(j), a.cols);
    return c;
}

// C = A * B. Shapes: (m x k) * (k x n) -> (m x n).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw NumericError("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

// Scales every row to unit Euclidean norm. Throws on a zero row.
inline Matrix row_unit_normalize(const Matrix& x) {
    Matrix out = x;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double n = norm2(x.row(i), x.cols);
        if (n == 0.0)
            throw NumericError("row_unit_normalize: zero row at index " + std::to_string(i));
        double* r = out.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) r[j] /= n;
    }
    return out;
}

inline bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows != m.cols) return false;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i + 1; j < m.cols; ++j)
            if (std::fabs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

} // namespace reveal
