#include <doctest.h>

#include <cmath>

#include "adrem/linear_model.hpp"
#include "adrem/toy.hpp"
#include "oracles.hpp"

using namespace adrem;

namespace {

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> central_difference(const LinearModel& model, const LabeledDataset& ds, double lambda, double h) {
    std::vector<double> out;
    LinearModel probe = model;
    auto partial = [&](double& slot) {
        const double keep = slot;
        slot = keep + h;
        const double up = logreg_objective(probe, ds, lambda);
        slot = keep - h;
        const double down = logreg_objective(probe, ds, lambda);
        slot = keep;
        out.push_back((up - down) / (2 * h));
    };
    for (double& w : probe.weights) partial(w);
    for (double& b : probe.biases) partial(b);
    return out;
}

}  // namespace

TEST_CASE("two-point svm reaches the margin and the oracle objective") {
    const LabeledDataset ds(FeatureMatrix::dense(2, 1, {1.0, -1.0}), {1, 0}, 2);
    SolverConfig cfg;
    cfg.C = 10;
    const auto model = train_svm(ds, cfg);
    const auto scores = decision_values(model, ds.features());
    CHECK(scores(0, 1) >= 1.0 - 1e-6);
    CHECK(scores(1, 0) >= 1.0 - 1e-6);
    const auto ref = oracle::svm_dual_oracle(ds.features(), {1.0, -1.0}, {1.0, 1.0}, 10.0);
    CHECK(svm_objective(model, ds, 10.0) == doctest::Approx(ref.primal).epsilon(1e-3));
    CHECK(svm_objective(model, ds, 10.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("svm objective matches the dual oracle on random instances") {
    Rng rng(11);
    std::uniform_int_distribution<std::size_t> rows(4, 30), cols(1, 10);
    std::uniform_real_distribution<double> weight(0.0, 2.0);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = rows(rng), d = cols(rng);
        const auto x = oracle::random_dense(rng, n, d);
        const auto y = oracle::covering_labels(rng, n, 2);
        std::vector<double> s(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = weight(rng);
            ys[i] = y[i] == 1 ? 1.0 : -1.0;
        }
        const LabeledDataset ds(x, y, 2);
        SolverConfig cfg;
        cfg.C = trial % 2 ? 0.3 : 5.0;
        const auto model = train_svm(ds, cfg, s);
        const auto ref = oracle::svm_dual_oracle(x, ys, s, cfg.C);
        const double got = svm_objective(model, ds, cfg.C, s);
        CHECK(got == doctest::Approx(ref.primal).epsilon(1e-3));
        CHECK(got >= ref.lower_bound - 1e-9 * std::abs(ref.lower_bound));
    }
}

TEST_CASE("svm_objective equals a term-by-term sum") {
    Rng rng(12);
    const LabeledDataset ds(oracle::random_dense(rng, 6, 3), oracle::covering_labels(rng, 6, 3), 3);
    SolverConfig cfg;
    const auto model = train_svm(ds, cfg);
    double naive = oracle::naive_norm2(model);
    for (std::size_t i = 0; i < ds.rows(); ++i) naive += oracle::naive_hinge(model, ds.features(), i, ds.labels()[i]);
    CHECK(svm_objective(model, ds, 1.0) == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("zero-weight rows drop out of the svm") {
    Rng rng(13);
    const auto xs = oracle::random_dense(rng, 10, 3);
    const auto xt = oracle::random_dense(rng, 6, 3);
    const LabeledDataset src(xs, oracle::covering_labels(rng, 10, 2), 2);
    const LabeledDataset tgt(xt, oracle::random_labels(rng, 6, 2), 2);
    const auto both = concat(src, tgt);
    std::vector<double> weights(16, 1.0);
    std::fill(weights.begin() + 10, weights.end(), 0.0);
    SolverConfig cfg;
    const auto a = train_svm(src, cfg);
    const auto b = train_svm(both, cfg, weights);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
}

TEST_CASE("single-class svm input is flagged, not rejected") {
    const LabeledDataset ds(FeatureMatrix::dense(3, 1, {1, 2, 3}), {1, 1, 1}, 2);
    const auto model = train_svm(ds, SolverConfig{});
    CHECK(model.info.degenerate);
    for (Label p : predict(model, ds.features())) CHECK(p == 1);
    CHECK_THROWS(train_svm(LabeledDataset(FeatureMatrix::dense(2, 1, {1, NAN}), {0, 1}, 2), SolverConfig{}));
}

TEST_CASE("arcs are separable within the source domain") {
    const auto data = toy::generate_arcs(toy::ArcsSpec{});
    SolverConfig cfg;
    const auto model = train_svm(data.source, cfg);
    CHECK(accuracy(predict(model, data.source.features()), data.source.labels()) == 1.0);
}

TEST_CASE("logistic gradient vanishes at the optimum and matches finite differences") {
    Rng rng(21);
    for (int k : {2, 3}) {
        const LabeledDataset ds(oracle::random_dense(rng, 10, 4), oracle::covering_labels(rng, 10, k), k);
        SolverConfig cfg;
        cfg.lambda = 0.3;
        cfg.tolerance = 1e-8;
        const auto model = train_logreg(ds, cfg);
        const auto grad = logreg_gradient(model, ds, cfg.lambda);
        CHECK(norm(grad) <= 1e-4);
        const auto fd = central_difference(model, ds, cfg.lambda, 1e-5);
        REQUIRE(fd.size() == grad.size());
        for (std::size_t i = 0; i < fd.size(); ++i) CHECK(std::abs(fd[i] - grad[i]) <= 1e-5);

        // Away from the optimum as well.
        LinearModel off = model;
        for (double& w : off.weights) w += 0.4;
        const auto g_off = logreg_gradient(off, ds, cfg.lambda);
        const auto fd_off = central_difference(off, ds, cfg.lambda, 1e-5);
        for (std::size_t i = 0; i < fd_off.size(); ++i) CHECK(std::abs(fd_off[i] - g_off[i]) <= 1e-5);
    }
}

TEST_CASE("logistic regression on a single zero point") {
    const LabeledDataset ds(FeatureMatrix::dense(2, 1, {0.0, 0.0}), {0, 1}, 2);
    SolverConfig cfg;
    cfg.lambda = 1.0;
    const auto model = train_logreg(ds, cfg);
    CHECK(model.weights[0] == 0.0);
    const auto z = decision_values(model, ds.features());
    const double p1 = 1.0 / (1.0 + std::exp(-z(0, 1)));
    CHECK(p1 == doctest::Approx(0.5));
}

TEST_CASE("ridge weight shrinks the logistic weights monotonically") {
    const LabeledDataset ds(FeatureMatrix::dense(2, 1, {1.0, -1.0}), {1, 0}, 2);
    double previous = INFINITY;
    for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
        SolverConfig cfg;
        cfg.lambda = lambda;
        const auto model = train_logreg(ds, cfg);
        const double n = std::abs(model.weights[0]);
        CHECK(n < previous);
        previous = n;
    }
}

TEST_CASE("decision values and predictions") {
    const auto zero = LinearModel::zeros(3, 2);
    const auto x = FeatureMatrix::dense(2, 2, {1, 2, 3, 4});
    const auto s = decision_values(zero, x);
    for (double v : s.values) CHECK(v == 0.0);
    for (Label p : predict(zero, x)) CHECK(p == 0);

    auto binary = LinearModel::zeros(2, 1);
    binary.weights[0] = 0.5;
    binary.biases[0] = 0.2;
    const auto sb = decision_values(binary, FeatureMatrix::dense(1, 1, {1.0}));
    CHECK(sb(0, 0) == doctest::Approx(-0.7));
    CHECK(sb(0, 1) == doctest::Approx(0.7));

    Rng rng(31);
    auto multi = LinearModel::zeros(3, 4);
    std::normal_distribution<double> g;
    for (double& w : multi.weights) w = g(rng);
    for (double& b : multi.biases) b = g(rng);
    const auto sparse = FeatureMatrix::sparse(4, {{{0, 1.0}, {3, -2.0}}, {}, {{1, 0.5}, {2, 4.0}}});
    const auto sm = decision_values(multi, sparse);
    const auto pred = predict(multi, sparse);
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(sm(i, c) == doctest::Approx(oracle::naive_score(multi, sparse, i, c)).epsilon(1e-14));
            if (sm(i, c) > sm(i, best)) best = c;
        }
        CHECK(pred[i] == static_cast<Label>(best));
    }
}

TEST_CASE("training is bitwise deterministic") {
    Rng rng(41);
    const LabeledDataset ds(oracle::random_dense(rng, 25, 5), oracle::covering_labels(rng, 25, 3), 3);
    for (LearnerKind kind : {LearnerKind::svm, LearnerKind::logreg}) {
        const auto a = train(kind, ds, SolverConfig{});
        const auto b = train(kind, ds, SolverConfig{});
        CHECK(a.weights == b.weights);
        CHECK(a.biases == b.biases);
    }
}
