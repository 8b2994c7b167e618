#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adrem/dataset.hpp"

namespace adrem {

enum class LearnerKind { svm, logreg };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner(std::string_view name);

struct SolverConfig {
    double C = 1.0;          // hinge cost
    double lambda = 0.5;     // logistic ridge weight
    double tolerance = 1e-6;
    std::size_t max_passes = 1000;
    std::uint64_t seed = 0;
};

// Ridge weight used for logistic regression when a single cost C drives both learners.
inline double lambda_from_C(double C) { return 1.0 / (2.0 * C); }

struct TrainingInfo {
    std::size_t iterations = 0;
    bool converged = true;
    bool degenerate = false;  // some class had no (positively weighted) rows
};

// Per-class linear scorer. A binary model stores a single row w; class 1 scores
// w.x + b and class 0 scores -(w.x + b).
struct LinearModel {
    int n_classes = 2;
    std::size_t dim = 0;
    std::vector<double> weights;  // stored_rows() x dim, row-major
    std::vector<double> biases;   // stored_rows()
    LearnerKind kind = LearnerKind::svm;
    bool per_class_rows = false;  // K == 2 stored as two independent rows
    TrainingInfo info;

    static LinearModel zeros(int n_classes, std::size_t dim, LearnerKind kind = LearnerKind::svm);

    std::size_t stored_rows() const {
        return n_classes == 2 && !per_class_rows ? 1 : static_cast<std::size_t>(n_classes);
    }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(weights).subspan(r * dim, dim);
    }
    std::span<double> row(std::size_t r) { return std::span<double>(weights).subspan(r * dim, dim); }
};

// n_rows x n_classes, row-major.
struct ScoreMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    double operator()(std::size_t i, std::size_t c) const { return values[i * cols + c]; }
};

ScoreMatrix decision_values(const LinearModel& model, const FeatureMatrix& x);

// Argmax of decision values; ties go to the lowest class index.
std::vector<Label> predict(const LinearModel& model, const FeatureMatrix& x);

double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

// L2-regularised hinge loss, one-vs-rest for K > 2. Minimises
// C * sum_i weight_i * hinge_i + ||w||^2 per separator with an unpenalised bias.
LinearModel train_svm(const LabeledDataset& ds, const SolverConfig& cfg,
                      std::span<const double> instance_weights = {});

// One-vs-rest path for any K >= 2; K == 2 yields two stored rows.
LinearModel train_svm_one_vs_rest(const LabeledDataset& ds, const SolverConfig& cfg,
                                  std::span<const double> instance_weights = {});

// L2-regularised logistic regression: minimises
// sum_i weight_i * logloss_i + lambda * ||w||^2 with an unpenalised bias.
// Binary uses the sigmoid; K > 2 uses the multinomial softmax.
LinearModel train_logreg(const LabeledDataset& ds, const SolverConfig& cfg,
                         std::span<const double> instance_weights = {});

// Softmax path for any K >= 2.
LinearModel train_logreg_multinomial(const LabeledDataset& ds, const SolverConfig& cfg,
                                     std::span<const double> instance_weights = {});

LinearModel train(LearnerKind kind, const LabeledDataset& ds, const SolverConfig& cfg,
                  std::span<const double> instance_weights = {});

// Objective values the solvers minimise, evaluated at `model`.
double svm_objective(const LinearModel& model, const LabeledDataset& ds, double C,
                     std::span<const double> instance_weights = {});
double logreg_objective(const LinearModel& model, const LabeledDataset& ds, double lambda,
                        std::span<const double> instance_weights = {});
// Gradient of logreg_objective with respect to (weights row-major, then biases).
std::vector<double> logreg_gradient(const LinearModel& model, const LabeledDataset& ds, double lambda,
                                    std::span<const double> instance_weights = {});

// Domain-adaptation SVM loss: C * source hinge + C * target hinge (against
// pseudo-labels) + ||w||^2.
double svm_da_loss(const LinearModel& model, const LabeledDataset& source, const FeatureMatrix& target,
                   std::span<const Label> target_labels, double C);

// Class-balanced variant: target class c is weighted (C/K) * |T| / |T_c|.
// A class with no target points contributes (C/K) * |T| * hinge(0), i.e. its
// mean loss is taken to be that of a zero-score point.
double balanced_da_loss(const LinearModel& model, const LabeledDataset& source, const FeatureMatrix& target,
                        std::span<const Label> target_labels, double C, int n_classes);

}  // namespace adrem
