#include <doctest.h>

#include <algorithm>
#include <map>

#include "adrem/adaptation.hpp"
#include "adrem/toy.hpp"
#include "oracles.hpp"

using namespace adrem;

namespace {

std::vector<std::size_t> per_class(const Subsample& s, std::span<const Label> labels, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i : s.indices) ++counts[static_cast<std::size_t>(labels[i])];
    return counts;
}

}  // namespace

TEST_CASE("da loss hand values") {
    const LabeledDataset src(FeatureMatrix::dense(1, 1, {1.0}), {1}, 2);
    const auto tgt = FeatureMatrix::dense(1, 1, {2.0});
    const std::vector<Label> yt{0};
    CHECK(svm_da_loss(LinearModel::zeros(2, 1), src, tgt, yt, 1.0) == 2.0);
}

TEST_CASE("da losses equal naive evaluators") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 3;
        const auto xs = oracle::random_dense(rng, 8, 3);
        const LabeledDataset src(xs, oracle::covering_labels(rng, 8, k), k);
        const auto xt = oracle::random_dense(rng, 6, 3);
        const auto yt = oracle::random_labels(rng, 6, k);
        SolverConfig cfg;
        const auto model = train_svm(src, cfg);
        const double C = 0.7;
        CHECK(std::abs(svm_da_loss(model, src, xt, yt, C) - oracle::naive_svm_da_loss(model, src, xt, yt, C)) <= 1e-12);
        CHECK(std::abs(balanced_da_loss(model, src, xt, yt, C, k) -
                       oracle::naive_balanced_da_loss(model, src, xt, yt, C, k)) <= 1e-12);
    }
}

TEST_CASE("balanced loss on a hand-weighted three-class instance") {
    // Zero model: every binary hinge is 1, so each point's one-vs-rest hinge is 3.
    const LabeledDataset src(FeatureMatrix::dense(0, 1, {}), {}, 3);
    const auto xt = FeatureMatrix::dense(6, 1, {1, 2, 3, 4, 5, 6});
    const std::vector<Label> yt{0, 0, 0, 1, 1, 2};
    const auto zero = LinearModel::zeros(3, 1);
    // Class weights (C/3)*6/|T_c| = 2/3, 1, 2 with C = 1; sums 3*(3*2/3 + 2*1 + 1*2) = 18.
    CHECK(balanced_da_loss(zero, src, xt, yt, 1.0, 3) == doctest::Approx(18.0).epsilon(1e-15));
    CHECK(svm_da_loss(zero, src, xt, yt, 1.0) == 18.0);
}

TEST_CASE("balanced loss equals plain loss on balanced labelings") {
    Rng rng(6);
    for (int k : {2, 3, 4}) {
        const LabeledDataset src(oracle::random_dense(rng, 9, 2), oracle::covering_labels(rng, 9, k), k);
        std::vector<Label> yt;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < k; ++c) yt.push_back(c);
        std::shuffle(yt.begin(), yt.end(), rng);
        const auto xt = oracle::random_dense(rng, yt.size(), 2);
        const auto model = train_svm(src, SolverConfig{});
        CHECK(balanced_da_loss(model, src, xt, yt, 1.3, k) == svm_da_loss(model, src, xt, yt, 1.3));
    }
}

TEST_CASE("schedule endpoints and rounding") {
    CHECK(sample_size(1, 1, 7) == 7);
    CHECK(sample_size(0, 5, 7) == 0);
    CHECK(sample_size(1, 4, 2) == 1);  // 0.5 rounds away from zero
    CHECK(sample_size(1, 3, 10) == 3);
    for (int M = 1; M <= 25; ++M)
        for (std::size_t t = 1; t <= 200; ++t) {
            std::size_t prev = 0;
            for (int k = 1; k <= M; ++k) {
                const std::size_t n = sample_size(k, M, t);
                CHECK_LE(prev, n);
                prev = n;
            }
            CHECK(prev == t);
        }
}

TEST_CASE("balanced subsample quotas") {
    Rng rng(7);
    const std::vector<Label> even{0, 0, 1, 1};
    const auto a = balanced_subsample(even, 4, 2, rng);
    CHECK(per_class(a, even, 2) == std::vector<std::size_t>{2, 2});
    auto sorted = a.indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});

    const std::vector<Label> skewed{0, 0, 0, 1};
    const auto b = balanced_subsample(skewed, 4, 2, rng);
    CHECK(per_class(b, skewed, 2) == std::vector<std::size_t>{2, 2});
    CHECK(std::count(b.indices.begin(), b.indices.end(), std::size_t{3}) == 2);

    const std::vector<Label> single{1, 1, 1};
    const auto c = balanced_subsample(single, 2, 2, rng);
    CHECK(c.degenerate);
    CHECK(per_class(c, single, 2) == std::vector<std::size_t>{0, 2});

    CHECK(balanced_subsample(even, 0, 2, rng).indices.empty());
}

TEST_CASE("balanced subsample Monte Carlo mean") {
    Rng rng(8);
    std::vector<Label> labels(100, 0);
    std::fill(labels.begin() + 60, labels.end(), 1);
    double total0 = 0, total1 = 0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        const auto s = balanced_subsample(labels, 10, 2, rng);
        const auto c = per_class(s, labels, 2);
        total0 += static_cast<double>(c[0]);
        total1 += static_cast<double>(c[1]);
    }
    CHECK(total0 / draws == doctest::Approx(5.0).epsilon(0.02));
    CHECK(total1 / draws == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("uniform subsample draws distinct indices") {
    Rng rng(9);
    auto s = uniform_subsample(20, 13, rng);
    std::sort(s.begin(), s.end());
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    CHECK(s.size() == 13);
    CHECK(s.back() < 20);
}

TEST_CASE("majority vote") {
    CHECK(majority_vote({{0, 1, 2}}) == std::vector<Label>{0, 1, 2});
    CHECK(majority_vote({{0}, {0}, {1}}) == std::vector<Label>{0});
    CHECK(majority_vote({{0}, {1}, {2}}) == std::vector<Label>{0});
    CHECK(majority_vote({{2}, {1}, {1}, {2}}) == std::vector<Label>{1});
}

TEST_CASE("adaptation rejects a class-count mismatch") {
    const auto data = toy::generate_arcs(toy::ArcsSpec{});
    AdremConfig cfg;
    cfg.n_classes = 3;
    Rng rng(1);
    CHECK_THROWS_AS(single_adrem(data.source, data.target, cfg, rng), std::invalid_argument);
}

TEST_CASE("one-iteration adaptation trains on all pseudo-labelled targets") {
    const auto data = toy::generate_arcs(toy::ArcsSpec{});
    AdremConfig cfg = toy::default_config(toy::ToyKind::arcs);
    cfg.iterations = 1;
    cfg.record_trace = true;
    Rng rng(3);
    const auto run = single_adrem(data.source, data.target, cfg, rng);
    REQUIRE(run.trace.size() == 2);
    CHECK(run.trace[1].sample_size == data.target.rows());
}

TEST_CASE("ensemble of one equals a single run with the member seed") {
    const auto data = toy::generate_arcs(toy::ArcsSpec{});
    AdremConfig cfg = toy::default_config(toy::ToyKind::arcs);
    cfg.ensemble_size = 1;
    const auto ens = ensemble_adrem(data.source, data.target, cfg);
    Rng rng(member_seed(cfg.base_seed, 0));
    CHECK(ens.labels == single_adrem(data.source, data.target, cfg, rng).labels);
}

TEST_CASE("ensemble results do not depend on thread count") {
    toy::ArcsSpec spec;
    spec.seed = 99;
    const auto data = toy::generate_arcs(spec);
    AdremConfig cfg = toy::default_config(toy::ToyKind::arcs);
    cfg.ensemble_size = 5;
    const auto serial = ensemble_adrem(data.source, data.target, cfg);
    cfg.threads = 4;
    const auto parallel = ensemble_adrem(data.source, data.target, cfg);
    CHECK(serial.member_labels == parallel.member_labels);
    CHECK(serial.labels == parallel.labels);
}
