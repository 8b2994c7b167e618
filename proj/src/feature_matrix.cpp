#include "adrem/feature_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adrem {

FeatureMatrix FeatureMatrix::dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols) {
        throw std::invalid_argument("dense matrix: expected " + std::to_string(rows * cols) + " values, got " +
                                    std::to_string(values.size()));
    }
    FeatureMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.values_ = std::move(values);
    return m;
}

FeatureMatrix FeatureMatrix::sparse(std::size_t cols, const std::vector<SparseRow>& rows) {
    FeatureMatrix m;
    m.rows_ = rows.size();
    m.cols_ = cols;
    m.sparse_ = true;
    m.row_ptr_.reserve(rows.size() + 1);
    m.row_ptr_.push_back(0);
    SparseRow scratch;
    for (const auto& row : rows) {
        scratch = row;
        std::stable_sort(scratch.begin(), scratch.end(),
                         [](const SparseEntry& a, const SparseEntry& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < scratch.size();) {
            const FeatureIndex idx = scratch[k].first;
            if (idx >= cols) {
                throw std::invalid_argument("sparse matrix: column index " + std::to_string(idx) +
                                            " out of range for " + std::to_string(cols) + " columns");
            }
            double sum = 0.0;
            for (; k < scratch.size() && scratch[k].first == idx; ++k) sum += scratch[k].second;
            if (sum != 0.0) {
                m.indices_.push_back(idx);
                m.values_.push_back(sum);
            }
        }
        m.row_ptr_.push_back(m.values_.size());
    }
    return m;
}

std::size_t FeatureMatrix::nnz() const {
    if (sparse_) return values_.size();
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

RowView FeatureMatrix::row(std::size_t i) const {
    if (sparse_) {
        const std::size_t b = row_ptr_[i];
        const std::size_t e = row_ptr_[i + 1];
        return RowView::sparse(std::span<const FeatureIndex>(indices_).subspan(b, e - b),
                               std::span<const double>(values_).subspan(b, e - b));
    }
    return RowView::dense(std::span<const double>(values_).subspan(i * cols_, cols_));
}

double FeatureMatrix::at(std::size_t i, std::size_t j) const {
    if (!sparse_) return values_[i * cols_ + j];
    const auto b = indices_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto e = indices_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(b, e, static_cast<FeatureIndex>(j));
    if (it == e || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - indices_.begin())];
}

FeatureMatrix FeatureMatrix::to_dense() const {
    if (!sparse_) return *this;
    std::vector<double> out(rows_ * cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        row(i).for_each_nonzero([&](std::size_t j, double v) { out[i * cols_ + j] = v; });
    }
    return dense(rows_, cols_, std::move(out));
}

FeatureMatrix FeatureMatrix::to_sparse() const {
    if (sparse_) return *this;
    std::vector<SparseRow> rows(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        row(i).for_each_nonzero([&](std::size_t j, double v) { rows[i].emplace_back(static_cast<FeatureIndex>(j), v); });
    }
    return sparse(cols_, rows);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    for (std::size_t idx : indices) {
        if (idx >= rows_) {
            throw std::out_of_range("select_rows: index " + std::to_string(idx) + " out of range for " +
                                    std::to_string(rows_) + " rows");
        }
    }
    FeatureMatrix m;
    m.rows_ = indices.size();
    m.cols_ = cols_;
    m.sparse_ = sparse_;
    if (sparse_) {
        m.row_ptr_.reserve(indices.size() + 1);
        m.row_ptr_.push_back(0);
        for (std::size_t idx : indices) {
            const auto r = row(idx);
            m.indices_.insert(m.indices_.end(), r.indices().begin(), r.indices().end());
            m.values_.insert(m.values_.end(), r.values().begin(), r.values().end());
            m.row_ptr_.push_back(m.values_.size());
        }
    } else {
        m.values_.reserve(indices.size() * cols_);
        for (std::size_t idx : indices) {
            const auto r = row(idx).values();
            m.values_.insert(m.values_.end(), r.begin(), r.end());
        }
    }
    return m;
}

FeatureMatrix FeatureMatrix::vstack(const FeatureMatrix& top, const FeatureMatrix& bottom) {
    if (top.cols_ != bottom.cols_) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(top.cols_) + " vs " +
                                    std::to_string(bottom.cols_) + " columns");
    }
    if (top.sparse_ != bottom.sparse_) {
        return vstack(top.to_sparse(), bottom.to_sparse());
    }
    FeatureMatrix m;
    m.rows_ = top.rows_ + bottom.rows_;
    m.cols_ = top.cols_;
    m.sparse_ = top.sparse_;
    m.values_ = top.values_;
    m.values_.insert(m.values_.end(), bottom.values_.begin(), bottom.values_.end());
    if (m.sparse_) {
        m.indices_ = top.indices_;
        m.indices_.insert(m.indices_.end(), bottom.indices_.begin(), bottom.indices_.end());
        m.row_ptr_.reserve(m.rows_ + 1);
        m.row_ptr_.push_back(0);
        for (std::size_t i = 0; i < top.rows_; ++i) m.row_ptr_.push_back(top.row_ptr_[i + 1]);
        const std::size_t offset = top.values_.size();
        for (std::size_t i = 0; i < bottom.rows_; ++i) m.row_ptr_.push_back(offset + bottom.row_ptr_[i + 1]);
    }
    return m;
}

}  // namespace adrem
