#include "adrem/model_selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adrem {

std::vector<double> default_C_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

void CvPlan::validate() const {
    if (n_folds < 2) throw std::invalid_argument("cv: need at least two folds");
    if (grid.empty()) throw std::invalid_argument("cv: empty C grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument("cv: grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("cv: grid must be strictly increasing");
    }
}

namespace {

void deal(std::vector<std::size_t>& rows, std::size_t n_folds, std::size_t& position, Rng& rng,
          std::vector<std::size_t>& fold) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t r : rows) fold[r] = position++ % n_folds;
}

}  // namespace

FoldAssignment stratified_folds(const LabeledDataset& ds, std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 1) throw std::invalid_argument("stratified_folds: need at least one fold");
    if (n_folds > ds.rows()) {
        throw std::invalid_argument("stratified_folds: " + std::to_string(n_folds) + " folds for " +
                                    std::to_string(ds.rows()) + " rows");
    }
    FoldAssignment out;
    out.fold.assign(ds.rows(), 0);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(ds.n_classes()));
    for (std::size_t i = 0; i < ds.rows(); ++i) members[static_cast<std::size_t>(ds.labels()[i])].push_back(i);
    Rng rng(seed);
    std::size_t position = 0;
    for (auto& rows : members) {
        if (!rows.empty() && rows.size() < n_folds) out.small_class = true;
        deal(rows, n_folds, position, rng, out.fold);
    }
    return out;
}

FoldAssignment random_folds(std::size_t n_rows, std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 1 || n_folds > n_rows) throw std::invalid_argument("random_folds: invalid fold count");
    FoldAssignment out;
    out.fold.assign(n_rows, 0);
    std::vector<std::size_t> rows(n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(seed);
    std::size_t position = 0;
    deal(rows, n_folds, position, rng, out.fold);
    return out;
}

double cross_validated_accuracy(const LabeledDataset& ds, const FoldAssignment& folds, std::size_t n_folds,
                                LearnerKind learner, double C, double tolerance, std::size_t max_passes) {
    SolverConfig solver;
    solver.C = C;
    solver.lambda = lambda_from_C(C);
    solver.tolerance = tolerance;
    solver.max_passes = max_passes;
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < ds.rows(); ++i) (folds.fold[i] == f ? test_rows : train_rows).push_back(i);
        if (test_rows.empty() || train_rows.empty()) continue;
        const LabeledDataset train_set = select_rows(ds, train_rows);
        const LabeledDataset test_set = select_rows(ds, test_rows);
        const LinearModel model = train(learner, train_set, solver);
        total += accuracy(predict(model, test_set.features()), test_set.labels());
        ++used;
    }
    if (used == 0) throw std::invalid_argument("cross validation: no usable folds");
    return total / static_cast<double>(used);
}

CvResult select_C(const LabeledDataset& ds, const CvPlan& plan, LearnerKind learner) {
    plan.validate();
    if (ds.rows() < plan.n_folds) {
        throw std::invalid_argument("select_C: " + std::to_string(ds.rows()) + " rows for " +
                                    std::to_string(plan.n_folds) + " folds");
    }
    const auto counts = ds.class_counts();
    if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
        throw std::invalid_argument("select_C: need at least two non-empty classes");
    }
    const FoldAssignment folds =
        plan.stratified ? stratified_folds(ds, plan.n_folds, plan.seed) : random_folds(ds.rows(), plan.n_folds, plan.seed);

    CvResult out;
    out.grid = plan.grid;
    out.small_class = folds.small_class;
    for (double C : plan.grid) {
        out.mean_accuracy.push_back(
            cross_validated_accuracy(ds, folds, plan.n_folds, learner, C, plan.tolerance, plan.max_passes));
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < out.grid.size(); ++g)
        if (out.mean_accuracy[g] > out.mean_accuracy[best]) best = g;
    out.C = out.grid[best];
    return out;
}

}  // namespace adrem
