#include "adrem/dataset.hpp"

#include <stdexcept>
#include <string>

namespace adrem {

LabeledDataset::LabeledDataset(FeatureMatrix features, std::vector<Label> labels, int n_classes)
    : features_(std::move(features)), labels_(std::move(labels)), n_classes_(n_classes) {
    if (n_classes_ < 1) throw std::invalid_argument("n_classes must be at least 1");
    if (labels_.size() != features_.rows()) {
        throw std::invalid_argument("label count " + std::to_string(labels_.size()) + " does not match row count " +
                                    std::to_string(features_.rows()));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= n_classes_) {
            throw std::invalid_argument("label " + std::to_string(labels_[i]) + " at row " + std::to_string(i) +
                                        " outside 0.." + std::to_string(n_classes_ - 1));
        }
    }
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes_), 0);
    for (Label y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

std::vector<Label> LabeledDataset::empty_classes() const {
    std::vector<Label> out;
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0) out.push_back(static_cast<Label>(c));
    return out;
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("concat: dimension mismatch, " + std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.cols()) + " features");
    }
    if (a.n_classes() != b.n_classes()) {
        throw std::invalid_argument("concat: class count mismatch, " + std::to_string(a.n_classes()) + " vs " +
                                    std::to_string(b.n_classes()));
    }
    std::vector<Label> labels(a.labels().begin(), a.labels().end());
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    return LabeledDataset(FeatureMatrix::vstack(a.features(), b.features()), std::move(labels), a.n_classes());
}

LabeledDataset select_rows(const LabeledDataset& ds, std::span<const std::size_t> indices) {
    auto features = ds.features().select_rows(indices);
    std::vector<Label> labels;
    labels.reserve(indices.size());
    for (std::size_t i : indices) labels.push_back(ds.labels()[i]);
    return LabeledDataset(std::move(features), std::move(labels), ds.n_classes());
}

UnlabeledDataset select_rows(const UnlabeledDataset& ds, std::span<const std::size_t> indices) {
    return UnlabeledDataset(ds.features().select_rows(indices));
}

LabeledDataset with_labels(const UnlabeledDataset& ds, std::vector<Label> labels, int n_classes) {
    return LabeledDataset(ds.features(), std::move(labels), n_classes);
}

}  // namespace adrem
