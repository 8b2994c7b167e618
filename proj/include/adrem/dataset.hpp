#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adrem/feature_matrix.hpp"

namespace adrem {

// Class index in 0..K-1.
using Label = std::int32_t;

// Features with one class label per row. Classes may be empty; see empty_classes().
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(FeatureMatrix features, std::vector<Label> labels, int n_classes);

    const FeatureMatrix& features() const { return features_; }
    std::span<const Label> labels() const { return labels_; }
    int n_classes() const { return n_classes_; }
    std::size_t rows() const { return features_.rows(); }
    std::size_t cols() const { return features_.cols(); }

    std::vector<std::size_t> class_counts() const;
    std::vector<Label> empty_classes() const;
    bool has_empty_classes() const { return !empty_classes().empty(); }

    bool operator==(const LabeledDataset&) const = default;

private:
    FeatureMatrix features_;
    std::vector<Label> labels_;
    int n_classes_ = 2;
};

class UnlabeledDataset {
public:
    UnlabeledDataset() = default;
    explicit UnlabeledDataset(FeatureMatrix features) : features_(std::move(features)) {}

    const FeatureMatrix& features() const { return features_; }
    std::size_t rows() const { return features_.rows(); }
    std::size_t cols() const { return features_.cols(); }

    bool operator==(const UnlabeledDataset&) const = default;

private:
    FeatureMatrix features_;
};

// Rows of `a` followed by rows of `b`.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

LabeledDataset select_rows(const LabeledDataset& ds, std::span<const std::size_t> indices);
UnlabeledDataset select_rows(const UnlabeledDataset& ds, std::span<const std::size_t> indices);

// Attaches labels to unlabeled features (pseudo-labelling).
LabeledDataset with_labels(const UnlabeledDataset& ds, std::vector<Label> labels, int n_classes);

}  // namespace adrem
