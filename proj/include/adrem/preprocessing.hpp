#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "adrem/feature_matrix.hpp"

namespace adrem {

enum class ScalerKind { standardize, std_only, rectify, instance_mean };

std::string_view to_string(ScalerKind kind);

struct ScalerStats {
    ScalerKind kind = ScalerKind::standardize;
    std::vector<double> mean;  // per feature; empty for rectify / instance_mean
    std::vector<double> std;   // population std, stored as computed
};

// Standard deviations below this are treated as 1 when applied.
inline constexpr double kConstantFeatureStd = 1e-12;

// Statistics over the row-wise concatenation of `matrices`.
ScalerStats fit_scaler(ScalerKind kind, const std::vector<const FeatureMatrix*>& matrices);

// standardize: (x - mean) / std, dense output.
// std_only: x / std, sparsity preserved.
// rectify: max(0, x).
// instance_mean: each row divided by its own mean over all columns; rows
// with zero mean are left unscaled and reported in `zero_mean_rows`.
FeatureMatrix apply_scaler(const ScalerStats& stats, const FeatureMatrix& x,
                           std::vector<std::size_t>* zero_mean_rows = nullptr);

// Named preprocessing pipelines for the usual benchmark feature files.
enum class Recipe { none, amazon400, amazon_all, surf, decaf_rectified };

std::string_view to_string(Recipe recipe);
Recipe parse_recipe(std::string_view name);

// Where scaler statistics come from.
enum class FitPopulation { pooled, source_only };

std::string_view to_string(FitPopulation population);
FitPopulation parse_fit_population(std::string_view name);

struct PreparedFeatures {
    FeatureMatrix source;
    FeatureMatrix target;
    std::vector<std::size_t> flagged_source_rows;
    std::vector<std::size_t> flagged_target_rows;
};

// amazon400: standardize. amazon_all: std_only. surf: instance_mean then
// standardize. decaf_rectified: rectify then std_only.
PreparedFeatures apply_recipe(Recipe recipe, const FeatureMatrix& source, const FeatureMatrix& target,
                              FitPopulation population = FitPopulation::pooled);

}  // namespace adrem
