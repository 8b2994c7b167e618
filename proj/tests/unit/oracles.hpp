#pragma once

// Slow, independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "adrem/dataset.hpp"
#include "adrem/linear_model.hpp"
#include "adrem/random.hpp"

namespace oracle {

using adrem::FeatureMatrix;
using adrem::Label;
using adrem::LabeledDataset;
using adrem::LinearModel;

inline FeatureMatrix random_dense(adrem::Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> v(n * d);
    for (double& x : v) x = g(rng);
    return FeatureMatrix::dense(n, d, std::move(v));
}

inline FeatureMatrix random_sparse(adrem::Rng& rng, std::size_t n, std::size_t d, double density) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<adrem::SparseRow> rows(n);
    for (auto& row : rows)
        for (std::size_t j = 0; j < d; ++j)
            if (u(rng) < density) row.emplace_back(static_cast<adrem::FeatureIndex>(j), g(rng));
    return FeatureMatrix::sparse(d, rows);
}

inline std::vector<Label> random_labels(adrem::Rng& rng, std::size_t n, int k) {
    std::uniform_int_distribution<int> u(0, k - 1);
    std::vector<Label> y(n);
    for (auto& v : y) v = u(rng);
    return y;
}

// Every label present at least once (requires n >= k).
inline std::vector<Label> covering_labels(adrem::Rng& rng, std::size_t n, int k) {
    auto y = random_labels(rng, n, k);
    for (int c = 0; c < k; ++c) y[static_cast<std::size_t>(c)] = c;
    std::shuffle(y.begin(), y.end(), rng);
    return y;
}

inline double naive_dot(const FeatureMatrix& x, std::size_t i, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x.at(i, j) * w[j];
    return s;
}

// Decision value of stored separator r at row i.
inline double naive_score(const LinearModel& m, const FeatureMatrix& x, std::size_t i, std::size_t r) {
    double s = m.biases[r];
    for (std::size_t j = 0; j < x.cols(); ++j) s += x.at(i, j) * m.weights[r * m.dim + j];
    return s;
}

inline double naive_hinge(const LinearModel& m, const FeatureMatrix& x, std::size_t i, Label y) {
    if (m.stored_rows() == 1) {
        const double sign = y == 1 ? 1.0 : -1.0;
        return std::max(0.0, 1.0 - sign * naive_score(m, x, i, 0));
    }
    double h = 0.0;
    for (std::size_t r = 0; r < m.stored_rows(); ++r) {
        const double sign = static_cast<std::size_t>(y) == r ? 1.0 : -1.0;
        h += std::max(0.0, 1.0 - sign * naive_score(m, x, i, r));
    }
    return h;
}

inline double naive_norm2(const LinearModel& m) {
    double s = 0.0;
    for (double v : m.weights) s += v * v;
    return s;
}

inline double naive_svm_da_loss(const LinearModel& m, const LabeledDataset& s, const FeatureMatrix& t,
                                const std::vector<Label>& yt, double C) {
    double loss = naive_norm2(m);
    for (std::size_t i = 0; i < s.rows(); ++i) loss += C * naive_hinge(m, s.features(), i, s.labels()[i]);
    for (std::size_t i = 0; i < t.rows(); ++i) loss += C * naive_hinge(m, t, i, yt[i]);
    return loss;
}

// Target class c weighted (C/K)|T|/|T_c|; a class with no target points is
// charged (C/K)|T| times the hinge of an all-zero score.
inline double naive_balanced_da_loss(const LinearModel& m, const LabeledDataset& s, const FeatureMatrix& t,
                                     const std::vector<Label>& yt, double C, int k) {
    double loss = naive_norm2(m);
    for (std::size_t i = 0; i < s.rows(); ++i) loss += C * naive_hinge(m, s.features(), i, s.labels()[i]);
    const double n_t = static_cast<double>(t.rows());
    for (int c = 0; c < k; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            if (yt[i] != c) continue;
            sum += naive_hinge(m, t, i, yt[i]);
            ++count;
        }
        const double unit = C / k * n_t;
        if (count > 0) loss += unit / static_cast<double>(count) * sum;
        else if (t.rows() > 0) loss += unit * static_cast<double>(m.stored_rows());
    }
    return loss;
}

// Binary objective C * sum_i s_i hinge_i + ||w||^2 at (w, b).
inline double svm_primal(const FeatureMatrix& x, const std::vector<double>& y, const std::vector<double>& s, double C,
                         const std::vector<double>& w, double b) {
    double f = 0.0;
    for (double v : w) f += v * v;
    for (std::size_t i = 0; i < x.rows(); ++i)
        f += C * s[i] * std::max(0.0, 1.0 - y[i] * (naive_dot(x, i, w) + b));
    return f;
}

// Long-run projected gradient ascent on the SVM dual
//   max sum a - 1/2 a'Qa,  0 <= a_i <= C s_i / 2,  y'a = 0,
// followed by an exact search over the bias (the primal is piecewise linear
// in b, so some breakpoint is optimal). Returns the primal objective; also
// reports the dual lower bound 2 * D(a).
struct SvmOracleResult {
    double primal = 0.0;
    double lower_bound = 0.0;
};

inline SvmOracleResult svm_dual_oracle(const FeatureMatrix& x, const std::vector<double>& y, const std::vector<double>& s,
                                       double C, std::size_t steps = 200000) {
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double k = 0.0;
            for (std::size_t f = 0; f < d; ++f) k += x.at(i, f) * x.at(j, f);
            q[i * n + j] = y[i] * y[j] * k;
        }
    // Lipschitz constant by power iteration, padded.
    std::vector<double> v(n, 1.0), tmp(n);
    double lip = 1e-12;
    for (int it = 0; it < 200; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = 0.0;
            for (std::size_t j = 0; j < n; ++j) tmp[i] += q[i * n + j] * v[j];
            norm += tmp[i] * tmp[i];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        lip = norm;
        for (std::size_t i = 0; i < n; ++i) v[i] = tmp[i] / norm;
    }
    const double step = 1.0 / (1.05 * lip + 1e-12);
    std::vector<double> ub(n);
    for (std::size_t i = 0; i < n; ++i) ub[i] = 0.5 * C * s[i];

    auto project = [&](std::vector<double>& a) {
        auto residual = [&](double tau) {
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r += y[i] * std::clamp(a[i] - tau * y[i], 0.0, ub[i]);
            return r;
        };
        double lo = -1.0, hi = 1.0;
        while (residual(lo) < 0.0) lo *= 2.0;
        while (residual(hi) > 0.0) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (residual(mid) > 0.0 ? lo : hi) = mid;
        }
        const double tau = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::clamp(a[i] - tau * y[i], 0.0, ub[i]);
    };

    auto evaluate = [&](const std::vector<double>& a) {
        std::vector<double> w(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < d; ++f) w[f] += a[i] * y[i] * x.at(i, f);
        double dual = 0.0;
        for (std::size_t i = 0; i < n; ++i) dual += a[i];
        double w2 = 0.0;
        for (double c : w) w2 += c * c;
        dual -= 0.5 * w2;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double b = y[i] - naive_dot(x, i, w);
            best = std::min(best, svm_primal(x, y, s, C, w, b));
        }
        return SvmOracleResult{best, 2.0 * dual};
    };

    std::vector<double> a(n, 0.0), grad(n);
    for (std::size_t t = 1; t <= steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            double qa = 0.0;
            for (std::size_t j = 0; j < n; ++j) qa += q[i * n + j] * a[j];
            grad[i] = 1.0 - qa;
        }
        for (std::size_t i = 0; i < n; ++i) a[i] += step * grad[i];
        project(a);
        if (t % 2000 == 0) {
            const auto r = evaluate(a);
            if (r.primal - r.lower_bound <= 1e-9 * std::max(1.0, r.primal)) return r;
        }
    }
    return evaluate(a);
}

}  // namespace oracle
