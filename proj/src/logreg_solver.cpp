// Ridge-regularised logistic regression by Newton-CG with Armijo backtracking.
// Parameters are laid out as [w_0 .. w_{R-1}, b_0 .. b_{R-1}], R = stored rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "adrem/linear_model.hpp"

namespace adrem {
namespace {

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

class LogisticProblem {
public:
    LogisticProblem(const LabeledDataset& ds, double lambda, std::span<const double> instance_weights, bool softmax)
        : x_(ds.features()),
          labels_(ds.labels()),
          lambda_(lambda),
          dim_(ds.cols()),
          classes_(static_cast<std::size_t>(ds.n_classes())),
          rows_(softmax ? classes_ : 1) {
        weights_.assign(x_.rows(), 1.0);
        if (!instance_weights.empty()) weights_.assign(instance_weights.begin(), instance_weights.end());
        curvature_.assign(x_.rows() * rows_, 0.0);
        probs_.assign(x_.rows() * rows_, 0.0);
    }

    std::size_t size() const { return rows_ * (dim_ + 1); }
    std::size_t stored_rows() const { return rows_; }
    std::size_t dim() const { return dim_; }

    double value(std::span<const double> theta) const {
        double f = 0.0;
        std::vector<double> z(rows_);
        for (std::size_t i = 0; i < x_.rows(); ++i) {
            if (weights_[i] == 0.0) continue;
            scores(theta, i, z);
            f += weights_[i] * point_loss(z, labels_[i]);
        }
        return f + lambda_ * penalty(theta);
    }

    // Gradient at theta; caches per-row quantities used by hessian_times().
    double value_and_gradient(std::span<const double> theta, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        double f = 0.0;
        std::vector<double> z(rows_);
        for (std::size_t i = 0; i < x_.rows(); ++i) {
            const double c = weights_[i];
            if (c == 0.0) continue;
            scores(theta, i, z);
            f += c * point_loss(z, labels_[i]);
            const RowView r = x_.row(i);
            if (rows_ == 1) {
                const double y = labels_[i] == 1 ? 1.0 : -1.0;
                const double s = sigmoid(y * z[0]);
                const double coef = c * (s - 1.0) * y;
                r.add_to(g.subspan(0, dim_), coef);
                g[dim_] += coef;
                const double p = sigmoid(z[0]);
                probs_[i] = p;
                curvature_[i] = c * p * (1.0 - p);
            } else {
                const double m = *std::max_element(z.begin(), z.end());
                double total = 0.0;
                for (std::size_t k = 0; k < rows_; ++k) total += std::exp(z[k] - m);
                for (std::size_t k = 0; k < rows_; ++k) {
                    const double p = std::exp(z[k] - m) / total;
                    probs_[i * rows_ + k] = p;
                    const double coef = c * (p - (static_cast<std::size_t>(labels_[i]) == k ? 1.0 : 0.0));
                    r.add_to(g.subspan(k * dim_, dim_), coef);
                    g[rows_ * dim_ + k] += coef;
                }
            }
        }
        for (std::size_t k = 0; k < rows_ * dim_; ++k) g[k] += 2.0 * lambda_ * theta[k];
        return f + lambda_ * penalty(theta);
    }

    // Hessian-vector product at the point of the last value_and_gradient call.
    void hessian_times(std::span<const double> v, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        std::vector<double> u(rows_), t(rows_);
        for (std::size_t i = 0; i < x_.rows(); ++i) {
            const double c = weights_[i];
            if (c == 0.0) continue;
            const RowView r = x_.row(i);
            if (rows_ == 1) {
                const double a = curvature_[i] * (r.dot(v.subspan(0, dim_)) + v[dim_]);
                r.add_to(out.subspan(0, dim_), a);
                out[dim_] += a;
            } else {
                double pu = 0.0;
                for (std::size_t k = 0; k < rows_; ++k) {
                    u[k] = r.dot(v.subspan(k * dim_, dim_)) + v[rows_ * dim_ + k];
                    pu += probs_[i * rows_ + k] * u[k];
                }
                for (std::size_t k = 0; k < rows_; ++k) {
                    const double p = probs_[i * rows_ + k];
                    const double a = c * (p * u[k] - p * pu);
                    r.add_to(out.subspan(k * dim_, dim_), a);
                    out[rows_ * dim_ + k] += a;
                }
            }
        }
        for (std::size_t k = 0; k < rows_ * dim_; ++k) out[k] += 2.0 * lambda_ * v[k];
    }

private:
    void scores(std::span<const double> theta, std::size_t i, std::vector<double>& z) const {
        const RowView r = x_.row(i);
        for (std::size_t k = 0; k < rows_; ++k) z[k] = r.dot(theta.subspan(k * dim_, dim_)) + theta[rows_ * dim_ + k];
    }

    double point_loss(const std::vector<double>& z, Label label) const {
        if (rows_ == 1) return softplus(label == 1 ? -z[0] : z[0]);
        const double m = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (double v : z) total += std::exp(v - m);
        return m + std::log(total) - z[static_cast<std::size_t>(label)];
    }

    double penalty(std::span<const double> theta) const {
        double s = 0.0;
        for (std::size_t k = 0; k < rows_ * dim_; ++k) s += theta[k] * theta[k];
        return s;
    }

    const FeatureMatrix& x_;
    std::span<const Label> labels_;
    double lambda_;
    std::size_t dim_;
    std::size_t classes_;
    std::size_t rows_;
    std::vector<double> weights_;
    std::vector<double> curvature_;
    std::vector<double> probs_;
};

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct NewtonResult {
    std::vector<double> theta;
    std::size_t iterations = 0;
    bool converged = false;
};

NewtonResult minimise(LogisticProblem& problem, double tolerance, std::size_t max_iter) {
    const std::size_t n = problem.size();
    NewtonResult res;
    res.theta.assign(n, 0.0);
    std::vector<double> g(n), step(n), r(n), p(n), hp(n), trial(n), g_trial(n);
    double f = problem.value_and_gradient(res.theta, g);
    const std::size_t max_cg = std::max<std::size_t>(20, std::min<std::size_t>(2 * n + 10, 500));

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const double gnorm = std::sqrt(dot(g, g));
        res.iterations = iter;
        if (gnorm <= tolerance) {
            res.converged = true;
            return res;
        }

        // Truncated CG on H s = -g.
        std::fill(step.begin(), step.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) r[k] = -g[k];
        p = r;
        double rr = dot(r, r);
        const double cg_tol = std::min(0.5, std::sqrt(gnorm)) * gnorm;
        for (std::size_t it = 0; it < max_cg && std::sqrt(rr) > cg_tol; ++it) {
            problem.hessian_times(p, hp);
            const double php = dot(p, hp);
            if (php <= 0.0) break;
            const double a = rr / php;
            for (std::size_t k = 0; k < n; ++k) {
                step[k] += a * p[k];
                r[k] -= a * hp[k];
            }
            const double rr_new = dot(r, r);
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        }
        double slope = dot(g, step);
        if (!(slope < 0.0)) {
            for (std::size_t k = 0; k < n; ++k) step[k] = -g[k];
            slope = -gnorm * gnorm;
        }

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = res.theta[k] + t * step[k];
            const double f_trial = problem.value(trial);
            if (f_trial <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            // Near the optimum the decrease drops below round-off in f; accept
            // a full step that still shrinks the gradient.
            if (ls == 0 && f_trial <= f + 1e-12 * std::max(1.0, std::abs(f))) {
                problem.value_and_gradient(trial, g_trial);
                if (std::sqrt(dot(g_trial, g_trial)) < gnorm) {
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) return res;
        res.theta = trial;
        f = problem.value_and_gradient(res.theta, g);
    }
    res.iterations = max_iter;
    res.converged = std::sqrt(dot(g, g)) <= tolerance;
    return res;
}

void validate(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights) {
    if (ds.rows() == 0) throw std::invalid_argument("train_logreg: empty dataset");
    if (ds.n_classes() < 2) throw std::invalid_argument("train_logreg: need at least two classes");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("train_logreg: lambda must be positive");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("train_logreg: tolerance must be positive");
    if (!instance_weights.empty()) {
        if (instance_weights.size() != ds.rows()) throw std::invalid_argument("train_logreg: instance weight count mismatch");
        for (double w : instance_weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("train_logreg: instance weights must be finite and >= 0");
    }
    const auto& x = ds.features();
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (double v : x.row(i).values())
            if (!std::isfinite(v)) throw std::invalid_argument("train_logreg: non-finite feature at row " + std::to_string(i));
}

bool has_missing_class(const LabeledDataset& ds, std::span<const double> instance_weights) {
    std::vector<double> mass(static_cast<std::size_t>(ds.n_classes()), 0.0);
    for (std::size_t i = 0; i < ds.rows(); ++i)
        mass[static_cast<std::size_t>(ds.labels()[i])] += instance_weights.empty() ? 1.0 : instance_weights[i];
    return std::any_of(mass.begin(), mass.end(), [](double m) { return m == 0.0; });
}

LinearModel fit(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights,
                bool softmax) {
    validate(ds, cfg, instance_weights);
    LogisticProblem problem(ds, cfg.lambda, instance_weights, softmax);
    NewtonResult res = minimise(problem, cfg.tolerance, cfg.max_passes);

    LinearModel model = LinearModel::zeros(ds.n_classes(), ds.cols(), LearnerKind::logreg);
    model.per_class_rows = softmax && ds.n_classes() == 2;
    const std::size_t rows = problem.stored_rows();
    model.weights.assign(res.theta.begin(), res.theta.begin() + static_cast<std::ptrdiff_t>(rows * ds.cols()));
    model.biases.assign(res.theta.begin() + static_cast<std::ptrdiff_t>(rows * ds.cols()), res.theta.end());
    model.info.iterations = res.iterations;
    model.info.converged = res.converged;
    model.info.degenerate = has_missing_class(ds, instance_weights);
    return model;
}

}  // namespace

LinearModel train_logreg(const LabeledDataset& ds, const SolverConfig& cfg, std::span<const double> instance_weights) {
    return fit(ds, cfg, instance_weights, ds.n_classes() > 2);
}

LinearModel train_logreg_multinomial(const LabeledDataset& ds, const SolverConfig& cfg,
                                     std::span<const double> instance_weights) {
    return fit(ds, cfg, instance_weights, true);
}

double logreg_objective(const LinearModel& model, const LabeledDataset& ds, double lambda,
                        std::span<const double> instance_weights) {
    if (ds.cols() != model.dim) throw std::invalid_argument("logreg_objective: dimension mismatch");
    LogisticProblem problem(ds, lambda, instance_weights, model.stored_rows() > 1);
    std::vector<double> theta(model.weights);
    theta.insert(theta.end(), model.biases.begin(), model.biases.end());
    return problem.value(theta);
}

std::vector<double> logreg_gradient(const LinearModel& model, const LabeledDataset& ds, double lambda,
                                    std::span<const double> instance_weights) {
    if (ds.cols() != model.dim) throw std::invalid_argument("logreg_gradient: dimension mismatch");
    LogisticProblem problem(ds, lambda, instance_weights, model.stored_rows() > 1);
    std::vector<double> theta(model.weights);
    theta.insert(theta.end(), model.biases.begin(), model.biases.end());
    std::vector<double> g(theta.size());
    problem.value_and_gradient(theta, g);
    return g;
}

}  // namespace adrem
