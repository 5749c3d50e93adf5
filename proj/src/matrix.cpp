#include "allocbench/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace allocbench {

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw std::out_of_range("Matrix::select_rows: row index out of range");
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols_), cols_,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
}

Matrix Matrix::vstack(const Matrix& top, const Matrix& bottom) {
    if (top.cols_ != bottom.cols_) throw std::invalid_argument("Matrix::vstack: column count mismatch");
    Matrix out;
    out.rows_ = top.rows_ + bottom.rows_;
    out.cols_ = top.cols_;
    out.data_.reserve(top.data_.size() + bottom.data_.size());
    out.data_.insert(out.data_.end(), top.data_.begin(), top.data_.end());
    out.data_.insert(out.data_.end(), bottom.data_.begin(), bottom.data_.end());
    return out;
}

}  // namespace allocbench
