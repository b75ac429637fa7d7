#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binfac/errors.hpp"

namespace binfac {

// Dense row-major matrix. Factorization and oracle paths use
// Matrix<double>; the training hot path may use Matrix<float>.
template <typename T>
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    // Construction from explicit data validates shape and finiteness;
    // this is the entry point for externally supplied values.
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                                 " does not match " + std::to_string(rows_) + "x" +
                                 std::to_string(cols_));
        for (const T v : data_)
            if (!std::isfinite(static_cast<double>(v)))
                throw Error("matrix entry is not finite");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* row(std::size_t i) { return data_.data() + i * cols_; }
    const T* row(std::size_t i) const { return data_.data() + i * cols_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    template <typename U>
    Matrix<U> cast() const {
        Matrix<U> out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrixf = Matrix<float>;
using Matrixd = Matrix<double>;

// C = A * B. Per output entry the k-sum runs in ascending order, so the
// result is identical to the naive triple loop and does not depend on
// the thread count.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
    const std::int64_t kk = static_cast<std::int64_t>(a.cols());
    const std::int64_t m = static_cast<std::int64_t>(b.cols());
    Matrix<T> c(a.rows(), b.cols());
#pragma omp parallel for schedule(static) if (n * kk * m > (1 << 21))
    for (std::int64_t i = 0; i < n; ++i) {
        T* crow = c.row(static_cast<std::size_t>(i));
        for (std::int64_t k = 0; k < kk; ++k) {
            const T aik = a(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
            const T* brow = b.row(static_cast<std::size_t>(k));
            for (std::int64_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& a) {
    Matrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

// A * B^T and A^T * B, routed through the same kernel so every product
// in the library shares one summation-order contract.
template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b) {
    return matmul(a, transpose(b));
}

template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b) {
    return matmul(transpose(a), b);
}

// sqrt of the sum of squared entries, accumulated in doubles in data order.
template <typename T>
double frobenius_norm(const Matrix<T>& m) {
    double sum = 0.0;
    for (const T v : m.values()) sum += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(sum);
}

template <typename T>
double l1_norm(const Matrix<T>& m) {
    double sum = 0.0;
    for (const T v : m.values()) sum += std::abs(static_cast<double>(v));
    return sum;
}

template <typename T>
double max_abs(const Matrix<T>& m) {
    double mx = 0.0;
    for (const T v : m.values()) mx = std::max(mx, std::abs(static_cast<double>(v)));
    return mx;
}

// ||a - b||_F / max(||b||_F, 1): the residual convention used by the
// decomposition contracts.
template <typename T>
double relative_residual(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("relative_residual: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]);
        sum += d * d;
    }
    return std::sqrt(sum) / std::max(frobenius_norm(b), 1.0);
}

} // namespace binfac
