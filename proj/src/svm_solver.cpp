// Linear SVM with an unpenalised bias, solved in the dual by SMO with
// maximal-violating-pair selection. The primal weight vector is kept
// explicitly, so each step costs one pass over the active rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "adrem/linear_model.hpp"

namespace adrem {
namespace {

double row_dot(const RowView& a, const RowView& b) {
    if (!a.is_sparse() && !b.is_sparse()) {
        const auto av = a.values();
        const auto bv = b.values();
        double s = 0.0;
        for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
        return s;
    }
    if (a.is_sparse() && b.is_sparse()) {
        const auto ai = a.indices();
        const auto bi = b.indices();
        const auto av = a.values();
        const auto bv = b.values();
        double s = 0.0;
        std::size_t p = 0, q = 0;
        while (p < ai.size() && q < bi.size()) {
            if (ai[p] == bi[q]) {
                s += av[p++] * bv[q++];
            } else if (ai[p] < bi[q]) {
                ++p;
            } else {
                ++q;
            }
        }
        return s;
    }
    const RowView& dense = a.is_sparse() ? b : a;
    const RowView& sparse = a.is_sparse() ? a : b;
    return sparse.dot(dense.values());
}

struct BinaryResult {
    std::vector<double> w;
    double b = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    bool degenerate = false;
};

// Minimises 0.5 ||w||^2 + sum_i upper_i * hinge(y_i (w.x_i + b)).
BinaryResult solve_binary(const FeatureMatrix& x, std::span<const double> y, std::span<const double> upper,
                          double tolerance, std::size_t max_passes) {
    const std::size_t d = x.cols();
    BinaryResult res;
    res.w.assign(d, 0.0);

    std::vector<std::size_t> active;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (upper[i] > 0.0) {
            active.push_back(i);
            (y[i] > 0 ? n_pos : n_neg) += 1;
        }
    }
    if (active.empty()) throw std::invalid_argument("train_svm: no rows with positive weight");
    if (n_pos == 0 || n_neg == 0) {
        // Smallest |b| with zero hinge loss on every row.
        res.b = n_pos > 0 ? 1.0 : -1.0;
        res.degenerate = true;
        return res;
    }

    const std::size_t n = active.size();
    std::vector<RowView> rows;
    rows.reserve(n);
    std::vector<double> yy(n), cap(n), qd(n), alpha(n, 0.0), grad(n, -1.0);
    for (std::size_t t = 0; t < n; ++t) {
        rows.push_back(x.row(active[t]));
        yy[t] = y[active[t]];
        cap[t] = upper[active[t]];
        qd[t] = rows[t].squared_norm();
    }

    auto in_up = [&](std::size_t t) { return yy[t] > 0 ? alpha[t] < cap[t] : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return yy[t] > 0 ? alpha[t] > 0.0 : alpha[t] < cap[t]; };

    constexpr double kTau = 1e-12;
    const std::size_t max_iter = std::max<std::size_t>(100000, max_passes * std::max<std::size_t>(n, 100));
    res.converged = false;
    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -yy[t] * grad[t];
            if (in_up(t) && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low(t) && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        if (i == n || j == n || g_max - g_min < tolerance) {
            res.converged = true;
            break;
        }

        const double kij = row_dot(rows[i], rows[j]);
        const double qij = yy[i] * yy[j] * kij;
        const double ci = cap[i], cj = cap[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        double& ai = alpha[i];
        double& aj = alpha[j];
        if (yy[i] != yy[j]) {
            double quad = qd[i] + qd[j] + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > ci - cj) {
                if (ai > ci) {
                    ai = ci;
                    aj = ci - diff;
                }
            } else if (aj > cj) {
                aj = cj;
                ai = cj + diff;
            }
        } else {
            double quad = qd[i] + qd[j] - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > ci) {
                if (ai > ci) {
                    ai = ci;
                    aj = sum - ci;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > cj) {
                if (aj > cj) {
                    aj = cj;
                    ai = sum - cj;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }

        const double dai = ai - old_ai;
        const double daj = aj - old_aj;
        if (dai != 0.0) rows[i].add_to(res.w, dai * yy[i]);
        if (daj != 0.0) rows[j].add_to(res.w, daj * yy[j]);
        for (std::size_t t = 0; t < n; ++t) grad[t] = yy[t] * rows[t].dot(res.w) - 1.0;
    }
    res.iterations = iter;

    // Bias from the KKT conditions: average over free vectors, else the
    // midpoint of the feasible interval.
    double upper_bound = std::numeric_limits<double>::infinity();
    double lower_bound = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = yy[t] * grad[t];
        if (alpha[t] >= cap[t]) {
            if (yy[t] < 0) upper_bound = std::min(upper_bound, yg);
            else lower_bound = std::max(lower_bound, yg);
        } else if (alpha[t] <= 0.0) {
            if (yy[t] > 0) upper_bound = std::min(upper_bound, yg);
            else lower_bound = std::max(lower_bound, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    double rho = 0.0;
    if (n_free > 0) rho = sum_free / static_cast<double>(n_free);
    else if (std::isfinite(upper_bound) && std::isfinite(lower_bound)) rho = 0.5 * (upper_bound + lower_bound);
    else if (std::isfinite(upper_bound)) rho = upper_bound;
    else if (std::isfinite(lower_bound)) rho = lower_bound;
    res.b = -rho;
    return res;
}

void validate(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights) {
    if (ds.rows() == 0) throw std::invalid_argument("train: empty dataset");
    if (ds.n_classes() < 2) throw std::invalid_argument("train: need at least two classes");
    if (!(cfg.C > 0.0)) throw std::invalid_argument("train: C must be positive");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("train: tolerance must be positive");
    if (!instance_weights.empty()) {
        if (instance_weights.size() != ds.rows()) throw std::invalid_argument("train: instance weight count mismatch");
        for (double w : instance_weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("train: instance weights must be finite and >= 0");
    }
    const auto& x = ds.features();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (double v : x.row(i).values()) {
            if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature at row " + std::to_string(i));
        }
    }
}

std::vector<double> upper_bounds(const LabeledDataset& ds, double C, std::span<const double> instance_weights) {
    // The dual works with 0.5 ||w||^2, so the per-row cost is halved.
    std::vector<double> upper(ds.rows(), 0.5 * C);
    if (!instance_weights.empty())
        for (std::size_t i = 0; i < upper.size(); ++i) upper[i] *= instance_weights[i];
    return upper;
}

LinearModel train_rows(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights,
                       bool per_class) {
    validate(ds, cfg, instance_weights);
    const auto upper = upper_bounds(ds, cfg.C, instance_weights);
    LinearModel model = LinearModel::zeros(ds.n_classes(), ds.cols(), LearnerKind::svm);
    model.per_class_rows = per_class && ds.n_classes() == 2;
    model.weights.assign(model.stored_rows() * model.dim, 0.0);
    model.biases.assign(model.stored_rows(), 0.0);

    std::vector<double> y(ds.rows());
    const auto labels = ds.labels();
    for (std::size_t r = 0; r < model.stored_rows(); ++r) {
        const Label positive = model.stored_rows() == 1 ? 1 : static_cast<Label>(r);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = labels[i] == positive ? 1.0 : -1.0;
        BinaryResult part = solve_binary(ds.features(), y, upper, cfg.tolerance, cfg.max_passes);
        std::copy(part.w.begin(), part.w.end(), model.row(r).begin());
        model.biases[r] = part.b;
        model.info.iterations += part.iterations;
        model.info.converged = model.info.converged && part.converged;
        model.info.degenerate = model.info.degenerate || part.degenerate;
    }
    return model;
}

}  // namespace

LinearModel train_svm(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights) {
    return train_rows(ds, cfg, instance_weights, false);
}

LinearModel train_svm_one_vs_rest(const LabeledDataset& ds, const SolverConfig& cfg,
                                  std::span<const double> instance_weights) {
    return train_rows(ds, cfg, instance_weights, true);
}

}  // namespace adrem
