#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace adrem {

using FeatureIndex = std::uint32_t;

// Read-only view of one row, dense or sparse. Sparse views hold sorted
// (index, value) pairs; dense views hold every column.
class RowView {
public:
    static RowView dense(std::span<const double> values) {
        RowView r;
        r.values_ = values;
        return r;
    }
    static RowView sparse(std::span<const FeatureIndex> indices, std::span<const double> values) {
        RowView r;
        r.indices_ = indices;
        r.values_ = values;
        r.sparse_ = true;
        return r;
    }

    bool is_sparse() const { return sparse_; }
    std::size_t nnz() const { return values_.size(); }
    std::span<const FeatureIndex> indices() const { return indices_; }
    std::span<const double> values() const { return values_; }

    double dot(std::span<const double> w) const {
        double s = 0.0;
        if (sparse_) {
            for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * w[indices_[k]];
        } else {
            for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * w[k];
        }
        return s;
    }

    // w += scale * x
    void add_to(std::span<double> w, double scale) const {
        if (sparse_) {
            for (std::size_t k = 0; k < values_.size(); ++k) w[indices_[k]] += scale * values_[k];
        } else {
            for (std::size_t k = 0; k < values_.size(); ++k) w[k] += scale * values_[k];
        }
    }

    double squared_norm() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return s;
    }

    template <typename Fn>
    void for_each_nonzero(Fn&& fn) const {
        if (sparse_) {
            for (std::size_t k = 0; k < values_.size(); ++k) fn(static_cast<std::size_t>(indices_[k]), values_[k]);
        } else {
            for (std::size_t k = 0; k < values_.size(); ++k)
                if (values_[k] != 0.0) fn(k, values_[k]);
        }
    }

private:
    std::span<const FeatureIndex> indices_;
    std::span<const double> values_;
    bool sparse_ = false;
};

using SparseEntry = std::pair<FeatureIndex, double>;
using SparseRow = std::vector<SparseEntry>;

// Row-major feature storage with a fixed column count. Immutable after
// construction; sparse rows are kept sorted with no stored zeros.
class FeatureMatrix {
public:
    FeatureMatrix() = default;

    // `values` is row-major, rows * cols long.
    static FeatureMatrix dense(std::size_t rows, std::size_t cols, std::vector<double> values);

    // Sorts each row, sums duplicate indices and drops zeros.
    static FeatureMatrix sparse(std::size_t cols, const std::vector<SparseRow>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_sparse() const { return sparse_; }
    std::size_t nnz() const;

    RowView row(std::size_t i) const;

    // Value at (i, j); O(log nnz_i) for sparse storage.
    double at(std::size_t i, std::size_t j) const;

    FeatureMatrix to_dense() const;
    FeatureMatrix to_sparse() const;

    // Rows `indices` in order; duplicates allowed.
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

    // Rows of `top` followed by rows of `bottom`. Sparse if either input is.
    static FeatureMatrix vstack(const FeatureMatrix& top, const FeatureMatrix& bottom);

    // Structural and value equality; dense and sparse storage never compare equal.
    bool operator==(const FeatureMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    bool sparse_ = false;
    std::vector<double> values_;
    std::vector<FeatureIndex> indices_;  // sparse only
    std::vector<std::size_t> row_ptr_;   // sparse only, rows_ + 1 entries
};

}  // namespace adrem
