#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace firn {

/// Dense row-major matrix. Rows are contiguous so that row-wise
/// operations (the multi-right-hand-side solves) vectorize.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }

    std::span<double> data() { return a_; }
    std::span<const double> data() const { return a_; }

    std::vector<double> col(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void fill(double v) { a_.assign(a_.size(), v); }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

} // namespace firn
