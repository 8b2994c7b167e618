#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adrem/dataset.hpp"
#include "adrem/linear_model.hpp"
#include "adrem/random.hpp"

namespace adrem {

struct AdremConfig {
    double C = 1.0;
    int iterations = 20;     // M
    int ensemble_size = 11;  // m
    LearnerKind learner = LearnerKind::svm;
    bool balance = true;
    std::uint64_t base_seed = kDefaultSeed;
    bool record_trace = false;
    int n_classes = 0;  // 0: take from the source dataset
    double tolerance = 1e-6;
    std::size_t max_passes = 1000;
    unsigned threads = 1;  // ensemble members run on up to this many threads

    void validate() const;
    SolverConfig solver_config() const;
};

struct IterationTrace {
    int k = 0;
    std::size_t sample_size = 0;  // n_k
    double svm_loss = 0.0;
    double balanced_loss = 0.0;
    std::optional<double> accuracy;
};

struct Subsample {
    std::vector<std::size_t> indices;
    bool degenerate = false;  // a single class was present
};

// n_k = round((k / M) |T|), half away from zero, clamped to [0, |T|].
std::size_t sample_size(int k, int iterations, std::size_t target_size);

// Class-balanced draw of n indices into `pseudo_labels`. Quotas are equal
// across the classes present (remainder to the most populous, lowest index
// first); a class smaller than its quota contributes all its members plus
// draws with replacement.
Subsample balanced_subsample(std::span<const Label> pseudo_labels, std::size_t n, int n_classes, Rng& rng);

// n distinct indices drawn uniformly from 0..size-1.
std::vector<std::size_t> uniform_subsample(std::size_t size, std::size_t n, Rng& rng);

struct SingleRunResult {
    std::vector<Label> labels;
    std::vector<IterationTrace> trace;  // k = 0..M when recorded
    bool degenerate = false;            // some subsample or training set lacked a class
};

// Randomised hard EM from a source classifier with a growing class-balanced
// target subsample. `true_target_labels` only feeds the trace's accuracy.
SingleRunResult single_adrem(const LabeledDataset& source, const UnlabeledDataset& target, const AdremConfig& cfg,
                             Rng& rng, std::span<const Label> true_target_labels = {});

// Seed used by ensemble member `member` of a run with `base_seed`.
inline std::uint64_t member_seed(std::uint64_t base_seed, std::size_t member) { return derive_seed(base_seed, member); }

struct EnsembleResult {
    std::vector<Label> labels;
    std::vector<std::vector<Label>> member_labels;  // m x |T|
    std::vector<SingleRunResult> members;
};

EnsembleResult ensemble_adrem(const LabeledDataset& source, const UnlabeledDataset& target, const AdremConfig& cfg,
                              std::span<const Label> true_target_labels = {});

// Per column, the most frequent label; ties go to the lowest label.
std::vector<Label> majority_vote(const std::vector<std::vector<Label>>& votes);

}  // namespace adrem
