#include "adrem/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adrem {

std::string_view to_string(ScalerKind kind) {
    switch (kind) {
        case ScalerKind::standardize: return "standardize";
        case ScalerKind::std_only: return "std_only";
        case ScalerKind::rectify: return "rectify";
        case ScalerKind::instance_mean: return "instance_mean";
    }
    return "?";
}

std::string_view to_string(Recipe recipe) {
    switch (recipe) {
        case Recipe::none: return "none";
        case Recipe::amazon400: return "amazon400";
        case Recipe::amazon_all: return "amazon-all";
        case Recipe::surf: return "surf";
        case Recipe::decaf_rectified: return "decaf-rectified";
    }
    return "?";
}

Recipe parse_recipe(std::string_view name) {
    for (Recipe r : {Recipe::none, Recipe::amazon400, Recipe::amazon_all, Recipe::surf, Recipe::decaf_rectified})
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown recipe '" + std::string(name) +
                                "' (expected none, amazon400, amazon-all, surf or decaf-rectified)");
}

std::string_view to_string(FitPopulation population) {
    return population == FitPopulation::pooled ? "pooled" : "source";
}

FitPopulation parse_fit_population(std::string_view name) {
    if (name == "pooled") return FitPopulation::pooled;
    if (name == "source") return FitPopulation::source_only;
    throw std::invalid_argument("unknown fit population '" + std::string(name) + "' (expected pooled or source)");
}

ScalerStats fit_scaler(ScalerKind kind, const std::vector<const FeatureMatrix*>& matrices) {
    if (matrices.empty()) throw std::invalid_argument("fit_scaler: no matrices");
    const std::size_t d = matrices.front()->cols();
    std::size_t n = 0;
    for (const auto* m : matrices) {
        if (m->cols() != d) throw std::invalid_argument("fit_scaler: matrices disagree on feature count");
        n += m->rows();
    }
    if (n == 0) throw std::invalid_argument("fit_scaler: zero rows");

    ScalerStats stats;
    stats.kind = kind;
    if (kind == ScalerKind::rectify || kind == ScalerKind::instance_mean) return stats;

    // Two passes: mean, then centred squares. Implicit zeros count.
    stats.mean.assign(d, 0.0);
    for (const auto* m : matrices)
        for (std::size_t i = 0; i < m->rows(); ++i)
            m->row(i).for_each_nonzero([&](std::size_t j, double v) { stats.mean[j] += v; });
    for (double& v : stats.mean) v /= static_cast<double>(n);

    std::vector<double> sq(d, 0.0);
    std::vector<std::size_t> nonzeros(d, 0);
    for (const auto* m : matrices) {
        for (std::size_t i = 0; i < m->rows(); ++i) {
            m->row(i).for_each_nonzero([&](std::size_t j, double v) {
                const double c = v - stats.mean[j];
                sq[j] += c * c;
                ++nonzeros[j];
            });
        }
    }
    stats.std.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double zeros = static_cast<double>(n - nonzeros[j]);
        sq[j] += zeros * stats.mean[j] * stats.mean[j];
        stats.std[j] = std::sqrt(sq[j] / static_cast<double>(n));
    }
    return stats;
}

namespace {

double guarded(double s) { return s < kConstantFeatureStd ? 1.0 : s; }

}  // namespace

FeatureMatrix apply_scaler(const ScalerStats& stats, const FeatureMatrix& x, std::vector<std::size_t>* zero_mean_rows) {
    const std::size_t d = x.cols();
    const bool needs_stats = stats.kind == ScalerKind::standardize || stats.kind == ScalerKind::std_only;
    if (needs_stats && (stats.mean.size() != d || stats.std.size() != d)) {
        throw std::invalid_argument("apply_scaler: statistics for " + std::to_string(stats.std.size()) +
                                    " features, data has " + std::to_string(d));
    }

    switch (stats.kind) {
        case ScalerKind::standardize: {
            std::vector<double> out(x.rows() * d);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                for (std::size_t j = 0; j < d; ++j) out[i * d + j] = -stats.mean[j] / guarded(stats.std[j]);
                x.row(i).for_each_nonzero(
                    [&](std::size_t j, double v) { out[i * d + j] = (v - stats.mean[j]) / guarded(stats.std[j]); });
            }
            return FeatureMatrix::dense(x.rows(), d, std::move(out));
        }
        case ScalerKind::std_only:
        case ScalerKind::rectify: {
            auto transform = [&](std::size_t j, double v) {
                return stats.kind == ScalerKind::std_only ? v / guarded(stats.std[j]) : std::max(0.0, v);
            };
            if (x.is_sparse()) {
                std::vector<SparseRow> rows(x.rows());
                for (std::size_t i = 0; i < x.rows(); ++i)
                    x.row(i).for_each_nonzero([&](std::size_t j, double v) {
                        rows[i].emplace_back(static_cast<FeatureIndex>(j), transform(j, v));
                    });
                return FeatureMatrix::sparse(d, rows);
            }
            std::vector<double> out(x.rows() * d, 0.0);
            for (std::size_t i = 0; i < x.rows(); ++i)
                x.row(i).for_each_nonzero([&](std::size_t j, double v) { out[i * d + j] = transform(j, v); });
            return FeatureMatrix::dense(x.rows(), d, std::move(out));
        }
        case ScalerKind::instance_mean: {
            std::vector<double> scale(x.rows(), 1.0);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                double sum = 0.0;
                for (double v : x.row(i).values()) sum += v;
                const double mean = d == 0 ? 0.0 : sum / static_cast<double>(d);
                if (mean == 0.0) {
                    if (zero_mean_rows) zero_mean_rows->push_back(i);
                } else {
                    scale[i] = mean;
                }
            }
            if (x.is_sparse()) {
                std::vector<SparseRow> rows(x.rows());
                for (std::size_t i = 0; i < x.rows(); ++i)
                    x.row(i).for_each_nonzero([&](std::size_t j, double v) {
                        rows[i].emplace_back(static_cast<FeatureIndex>(j), v / scale[i]);
                    });
                return FeatureMatrix::sparse(d, rows);
            }
            std::vector<double> out(x.rows() * d, 0.0);
            for (std::size_t i = 0; i < x.rows(); ++i)
                x.row(i).for_each_nonzero([&](std::size_t j, double v) { out[i * d + j] = v / scale[i]; });
            return FeatureMatrix::dense(x.rows(), d, std::move(out));
        }
    }
    throw std::logic_error("apply_scaler: unknown scaler kind");
}

namespace {

std::pair<FeatureMatrix, FeatureMatrix> fit_apply(ScalerKind kind, const FeatureMatrix& source, const FeatureMatrix& target,
                                                  FitPopulation population) {
    std::vector<const FeatureMatrix*> pool{&source};
    if (population == FitPopulation::pooled) pool.push_back(&target);
    const ScalerStats stats = fit_scaler(kind, pool);
    return {apply_scaler(stats, source), apply_scaler(stats, target)};
}

}  // namespace

PreparedFeatures apply_recipe(Recipe recipe, const FeatureMatrix& source, const FeatureMatrix& target,
                              FitPopulation population) {
    if (source.cols() != target.cols()) {
        throw std::invalid_argument("apply_recipe: source has " + std::to_string(source.cols()) +
                                    " features, target has " + std::to_string(target.cols()));
    }
    PreparedFeatures out;
    switch (recipe) {
        case Recipe::none:
            out.source = source;
            out.target = target;
            break;
        case Recipe::amazon400:
            std::tie(out.source, out.target) = fit_apply(ScalerKind::standardize, source, target, population);
            break;
        case Recipe::amazon_all:
            std::tie(out.source, out.target) = fit_apply(ScalerKind::std_only, source, target, population);
            break;
        case Recipe::surf: {
            const ScalerStats per_row{ScalerKind::instance_mean, {}, {}};
            const FeatureMatrix s = apply_scaler(per_row, source, &out.flagged_source_rows);
            const FeatureMatrix t = apply_scaler(per_row, target, &out.flagged_target_rows);
            std::tie(out.source, out.target) = fit_apply(ScalerKind::standardize, s, t, population);
            break;
        }
        case Recipe::decaf_rectified: {
            const ScalerStats relu{ScalerKind::rectify, {}, {}};
            const FeatureMatrix s = apply_scaler(relu, source);
            const FeatureMatrix t = apply_scaler(relu, target);
            std::tie(out.source, out.target) = fit_apply(ScalerKind::std_only, s, t, population);
            break;
        }
    }
    return out;
}

}  // namespace adrem
