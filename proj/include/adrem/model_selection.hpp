#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "adrem/dataset.hpp"
#include "adrem/linear_model.hpp"
#include "adrem/random.hpp"

namespace adrem {

std::vector<double> default_C_grid();

struct CvPlan {
    std::size_t n_folds = 3;
    std::vector<double> grid = default_C_grid();
    bool stratified = true;
    std::uint64_t seed = kDefaultSeed;
    double tolerance = 1e-6;
    std::size_t max_passes = 1000;

    void validate() const;
};

struct FoldAssignment {
    std::vector<std::size_t> fold;  // fold index per row
    bool small_class = false;       // some class had fewer members than folds
};

// Shuffles each class and deals its members round-robin across folds,
// continuing where the previous class stopped, so per-class and total fold
// sizes both differ by at most one.
FoldAssignment stratified_folds(const LabeledDataset& ds, std::size_t n_folds, std::uint64_t seed);

// Unstratified: one shuffled round-robin deal over all rows.
FoldAssignment random_folds(std::size_t n_rows, std::size_t n_folds, std::uint64_t seed);

struct CvResult {
    double C = 1.0;
    std::vector<double> grid;
    std::vector<double> mean_accuracy;  // per grid value
    bool small_class = false;
};

// Mean held-out accuracy for one C on the given folds.
double cross_validated_accuracy(const LabeledDataset& ds, const FoldAssignment& folds, std::size_t n_folds,
                                LearnerKind learner, double C, double tolerance = 1e-6,
                                std::size_t max_passes = 1000);

// Picks the grid value with the best mean held-out accuracy on the source
// data; ties go to the smallest C.
CvResult select_C(const LabeledDataset& ds, const CvPlan& plan, LearnerKind learner);

}  // namespace adrem
