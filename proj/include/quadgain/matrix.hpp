#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace quadgain {

/// Minimal dense row-major matrix of doubles. Dimensions are fixed at
/// construction; entries default to zero.
class Mat {
public:
    Mat() : rows_(1), cols_(1), data_(1, 0.0) {}

    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("Mat: dimensions must be >= 1");
    }

    Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
        : Mat(rows, cols) {
        if (entries.size() != rows * cols)
            throw std::invalid_argument("Mat: entry count does not match dimensions");
        std::size_t i = 0;
        for (double v : entries) data_[i++] = v;
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

inline Mat mat_mul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("mat_mul: inner dimensions do not match");
    Mat out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

inline Mat operator*(const Mat& a, const Mat& b) { return mat_mul(a, b); }

inline Mat operator-(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("operator-: dimensions do not match");
    Mat out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
    return out;
}

/// Numerical rank by Gaussian elimination with partial pivoting. A pivot
/// counts iff its magnitude exceeds tol times the largest absolute entry of
/// the input (or tol itself for an all-zero matrix).
inline std::size_t rank(const Mat& m, double tol = 1e-9) {
    if (!(tol > 0.0)) throw std::invalid_argument("rank: tol must be > 0");
    Mat work = m;
    const double scale = work.max_abs();
    const double threshold = tol * (scale > 0.0 ? scale : 1.0);

    std::size_t r = 0;
    for (std::size_t c = 0; c < work.cols() && r < work.rows(); ++c) {
        std::size_t pivot_row = r;
        double pivot_mag = std::abs(work(r, c));
        for (std::size_t i = r + 1; i < work.rows(); ++i) {
            if (std::abs(work(i, c)) > pivot_mag) {
                pivot_mag = std::abs(work(i, c));
                pivot_row = i;
            }
        }
        if (pivot_mag <= threshold) continue;

        if (pivot_row != r)
            for (std::size_t j = 0; j < work.cols(); ++j)
                std::swap(work(r, j), work(pivot_row, j));

        const double pivot = work(r, c);
        for (std::size_t i = r + 1; i < work.rows(); ++i) {
            const double f = work(i, c) / pivot;
            if (f == 0.0) continue;
            for (std::size_t j = c; j < work.cols(); ++j) work(i, j) -= f * work(r, j);
        }
        ++r;
    }
    return r;
}

}  // namespace quadgain
