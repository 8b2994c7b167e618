#include "adrem/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adrem {

std::string_view to_string(LearnerKind kind) {
    return kind == LearnerKind::svm ? "svm" : "logreg";
}

LearnerKind parse_learner(std::string_view name) {
    if (name == "svm") return LearnerKind::svm;
    if (name == "logreg" || name == "lr") return LearnerKind::logreg;
    throw std::invalid_argument("unknown learner '" + std::string(name) + "' (expected svm or logreg)");
}

LinearModel LinearModel::zeros(int n_classes, std::size_t dim, LearnerKind kind) {
    LinearModel m;
    m.n_classes = n_classes;
    m.dim = dim;
    m.kind = kind;
    m.weights.assign(m.stored_rows() * dim, 0.0);
    m.biases.assign(m.stored_rows(), 0.0);
    return m;
}

ScoreMatrix decision_values(const LinearModel& model, const FeatureMatrix& x) {
    if (x.cols() != model.dim) {
        throw std::invalid_argument("decision_values: model has " + std::to_string(model.dim) +
                                    " features, data has " + std::to_string(x.cols()));
    }
    ScoreMatrix s;
    s.rows = x.rows();
    s.cols = static_cast<std::size_t>(model.n_classes);
    s.values.assign(s.rows * s.cols, 0.0);
    const std::size_t stored = model.stored_rows();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const RowView r = x.row(i);
        if (stored == 1) {
            const double z = r.dot(model.row(0)) + model.biases[0];
            s.values[i * 2] = -z;
            s.values[i * 2 + 1] = z;
        } else {
            for (std::size_t c = 0; c < stored; ++c) s.values[i * s.cols + c] = r.dot(model.row(c)) + model.biases[c];
        }
    }
    return s;
}

std::vector<Label> predict(const LinearModel& model, const FeatureMatrix& x) {
    const ScoreMatrix s = decision_values(model, x);
    std::vector<Label> out(s.rows, 0);
    for (std::size_t i = 0; i < s.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < s.cols; ++c)
            if (s(i, c) > s(i, best)) best = c;
        out[i] = static_cast<Label>(best);
    }
    return out;
}

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                                    std::to_string(truth.size()) + " labels");
    }
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

LinearModel train(LearnerKind kind, const LabeledDataset& ds, const SolverConfig& cfg,
                  std::span<const double> instance_weights) {
    return kind == LearnerKind::svm ? train_svm(ds, cfg, instance_weights)
                                    : train_logreg(ds, cfg, instance_weights);
}

namespace {

double hinge(double z, double y) { return std::max(0.0, 1.0 - y * z); }

// Summed hinge over every stored separator for one row.
double row_hinge(const LinearModel& model, const RowView& r, Label label) {
    const std::size_t stored = model.stored_rows();
    if (stored == 1) {
        const double z = r.dot(model.row(0)) + model.biases[0];
        return hinge(z, label == 1 ? 1.0 : -1.0);
    }
    double h = 0.0;
    for (std::size_t c = 0; c < stored; ++c) {
        const double z = r.dot(model.row(c)) + model.biases[c];
        h += hinge(z, static_cast<std::size_t>(label) == c ? 1.0 : -1.0);
    }
    return h;
}

double squared_weight_norm(const LinearModel& model) {
    double s = 0.0;
    for (double v : model.weights) s += v * v;
    return s;
}

void check_target(const LinearModel& model, const LabeledDataset& source, const FeatureMatrix& target,
                  std::span<const Label> target_labels) {
    if (source.cols() != model.dim || target.cols() != model.dim) {
        throw std::invalid_argument("loss: dimension mismatch between model (" + std::to_string(model.dim) +
                                    "), source (" + std::to_string(source.cols()) + ") and target (" +
                                    std::to_string(target.cols()) + ")");
    }
    if (target_labels.size() != target.rows()) {
        throw std::invalid_argument("loss: " + std::to_string(target_labels.size()) + " target labels for " +
                                    std::to_string(target.rows()) + " target rows");
    }
}

double source_term(const LinearModel& model, const LabeledDataset& source, double C) {
    double s = 0.0;
    for (std::size_t i = 0; i < source.rows(); ++i) s += C * row_hinge(model, source.features().row(i), source.labels()[i]);
    return s;
}

}  // namespace

double svm_objective(const LinearModel& model, const LabeledDataset& ds, double C,
                     std::span<const double> instance_weights) {
    if (ds.cols() != model.dim) throw std::invalid_argument("svm_objective: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const double w = instance_weights.empty() ? 1.0 : instance_weights[i];
        if (w == 0.0) continue;
        s += C * w * row_hinge(model, ds.features().row(i), ds.labels()[i]);
    }
    return s + squared_weight_norm(model);
}

double svm_da_loss(const LinearModel& model, const LabeledDataset& source, const FeatureMatrix& target,
                   std::span<const Label> target_labels, double C) {
    check_target(model, source, target, target_labels);
    double t = 0.0;
    for (std::size_t i = 0; i < target.rows(); ++i) t += C * row_hinge(model, target.row(i), target_labels[i]);
    return source_term(model, source, C) + t + squared_weight_norm(model);
}

double balanced_da_loss(const LinearModel& model, const LabeledDataset& source, const FeatureMatrix& target,
                        std::span<const Label> target_labels, double C, int n_classes) {
    check_target(model, source, target, target_labels);
    if (n_classes < 1) throw std::invalid_argument("balanced_da_loss: n_classes must be positive");
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
    for (Label y : target_labels) {
        if (y < 0 || y >= n_classes) throw std::invalid_argument("balanced_da_loss: label out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    const double total = static_cast<double>(target.rows());
    const double k = static_cast<double>(n_classes);
    std::vector<double> class_weight(counts.size(), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) class_weight[c] = C * (total / (k * static_cast<double>(counts[c])));
    }
    double t = 0.0;
    for (std::size_t i = 0; i < target.rows(); ++i) {
        t += class_weight[static_cast<std::size_t>(target_labels[i])] * row_hinge(model, target.row(i), target_labels[i]);
    }
    if (target.rows() > 0) {
        // Loss of a zero-score point, the value a missing class is charged per unit weight.
        const double zero_score_hinge = static_cast<double>(model.stored_rows());
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0) t += (C / k) * total * zero_score_hinge;
        }
    }
    return source_term(model, source, C) + t + squared_weight_norm(model);
}

}  // namespace adrem
