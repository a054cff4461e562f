#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "corrdetail/error.hpp"

namespace corrdetail {

// Dense row-major N x d matrix of token embeddings. Rows are tokens, columns
// embedding dimensions. All arithmetic in the project is double precision.
class TokenMatrix {
public:
    TokenMatrix() = default;

    TokenMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    TokenMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ShapeError("TokenMatrix: storage size " + std::to_string(data_.size()) +
                             " does not match " + shape_str());
        }
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw NumericError("TokenMatrix: non-finite entry in " + shape_str());
            }
        }
    }

    static TokenMatrix identity(std::size_t n) {
        TokenMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool operator==(const TokenMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline void require_finite(const TokenMatrix& m, const char* what) {
    if (!m.all_finite()) {
        throw NumericError(std::string(what) + ": non-finite entry in " + m.shape_str() +
                           " input");
    }
}

// max |a - b| over all entries; throws on shape mismatch
inline double max_abs_diff(const TokenMatrix& a, const TokenMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff: " + a.shape_str() + " vs " + b.shape_str());
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    }
    return m;
}

} // namespace corrdetail
