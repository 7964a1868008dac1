#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ltml/errors.hpp"

namespace ltml {

/// Dense row-major matrix of 64-bit floats. All numeric state in the
/// project (logits, losses, gradients, features) lives in this type.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool all_finite() const;

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using LogitMatrix = Matrix;

/// Binary per-sample, per-class labels. Entries are exactly 0 or 1.
class LabelMatrix {
public:
    LabelMatrix() = default;
    LabelMatrix(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<std::uint8_t>& raw() const { return data_; }

    bool same_shape(const LabelMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool same_shape(const Matrix& o) const { return rows_ == o.rows() && cols_ == o.cols(); }

    /// Column sums (positives per class).
    std::vector<std::int64_t> column_sums() const;

    bool operator==(const LabelMatrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> data_;
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b))
        throw ShapeMismatch(std::string(where) + ": shape mismatch");
}

inline void require_same_shape(const Matrix& a, const LabelMatrix& b, const char* where) {
    if (!b.same_shape(a))
        throw ShapeMismatch(std::string(where) + ": shape mismatch");
}

}  // namespace ltml
