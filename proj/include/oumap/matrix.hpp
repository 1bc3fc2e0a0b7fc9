// matrix.hpp — dense row-major matrix used throughout the toolchain
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oumap {

template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("matrix payload does not match shape");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<float>;
using Int8Matrix = Matrix<std::int8_t>;
using Int64Matrix = Matrix<std::int64_t>;

/// Dense signed product: (batch × m) · (m × n) → (batch × n), exact in 64 bits.
inline Int64Matrix dense_matmul(const Int8Matrix& activations, const Int8Matrix& weights) {
    if (activations.cols() != weights.rows()) {
        throw std::invalid_argument("shape mismatch: activations cols != weight rows");
    }
    Int64Matrix out(activations.rows(), weights.cols(), 0);
    for (std::size_t b = 0; b < activations.rows(); ++b) {
        for (std::size_t i = 0; i < weights.rows(); ++i) {
            const std::int64_t x = activations(b, i);
            if (x == 0) continue;
            for (std::size_t j = 0; j < weights.cols(); ++j) {
                out(b, j) += x * weights(i, j);
            }
        }
    }
    return out;
}

}  // namespace oumap
