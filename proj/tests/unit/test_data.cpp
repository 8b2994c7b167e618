#include <doctest.h>

#include <numeric>

#include "adrem/dataset.hpp"
#include "oracles.hpp"

using namespace adrem;

TEST_CASE("sparse construction sorts, merges duplicates and drops zeros") {
    const auto m = FeatureMatrix::sparse(4, {{{3, 1.0}, {1, 2.0}, {3, 0.5}, {0, 0.0}}});
    CHECK(m.nnz() == 2);
    CHECK(m.at(0, 1) == 2.0);
    CHECK(m.at(0, 3) == 1.5);
    CHECK(m.at(0, 0) == 0.0);
    CHECK_THROWS(FeatureMatrix::sparse(3, {{{3, 1.0}}}));
}

TEST_CASE("dense and sparse storage agree") {
    Rng rng(1);
    const auto s = oracle::random_sparse(rng, 7, 9, 0.3);
    const auto d = s.to_dense();
    CHECK_FALSE(d.is_sparse());
    CHECK(d.to_sparse() == s);
    std::vector<double> w(9);
    std::iota(w.begin(), w.end(), -4.0);
    for (std::size_t i = 0; i < s.rows(); ++i) {
        CHECK(s.row(i).dot(w) == doctest::Approx(oracle::naive_dot(s, i, w)).epsilon(1e-14));
        CHECK(d.row(i).dot(w) == doctest::Approx(oracle::naive_dot(s, i, w)).epsilon(1e-14));
    }
}

TEST_CASE("concat preserves order and handles the empty set") {
    Rng rng(2);
    const LabeledDataset a(oracle::random_dense(rng, 3, 2), {0, 1, 1}, 2);
    const LabeledDataset b(oracle::random_dense(rng, 2, 2), {1, 0}, 2);
    const LabeledDataset empty(FeatureMatrix::dense(0, 2, {}), {}, 2);
    CHECK(concat(a, empty) == a);
    const auto ab = concat(a, b);
    REQUIRE(ab.rows() == 5);
    CHECK(std::vector<Label>(ab.labels().begin(), ab.labels().end()) == std::vector<Label>{0, 1, 1, 1, 0});
    CHECK(ab.features().at(4, 1) == b.features().at(1, 1));

    const LabeledDataset wide(oracle::random_dense(rng, 1, 3), {0}, 2);
    try {
        concat(a, wide);
        FAIL("expected a dimension error");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find('2') != std::string::npos);
        CHECK(what.find('3') != std::string::npos);
    }
}

TEST_CASE("concat of sparse sets keeps dot products") {
    Rng rng(3);
    const auto xa = oracle::random_sparse(rng, 4, 5, 0.5);
    const auto xb = oracle::random_sparse(rng, 3, 5, 0.5);
    const LabeledDataset a(xa, oracle::random_labels(rng, 4, 2), 2);
    const LabeledDataset b(xb, oracle::random_labels(rng, 3, 2), 2);
    const auto ab = concat(a, b);
    const std::vector<double> w{0.5, -1.0, 2.0, 0.25, -3.0};
    for (std::size_t i = 0; i < 4; ++i) CHECK(ab.features().row(i).dot(w) == doctest::Approx(oracle::naive_dot(xa, i, w)));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(ab.features().row(4 + i).dot(w) == doctest::Approx(oracle::naive_dot(xb, i, w)));
}

TEST_CASE("select_rows identity, duplication and commuting with concat") {
    Rng rng(4);
    const LabeledDataset ds(oracle::random_dense(rng, 4, 3), {0, 1, 0, 1}, 2);
    const std::vector<std::size_t> all{0, 1, 2, 3};
    CHECK(select_rows(ds, all) == ds);
    const std::vector<std::size_t> twice{2, 2};
    const auto dup = select_rows(ds, twice);
    CHECK(dup.features().at(0, 1) == dup.features().at(1, 1));
    CHECK(dup.labels()[0] == dup.labels()[1]);

    const LabeledDataset other(oracle::random_dense(rng, 2, 3), {1, 1}, 2);
    const std::vector<std::size_t> pick{1, 3};
    const std::vector<std::size_t> shifted{1, 3, 4, 5};
    CHECK(concat(select_rows(ds, pick), other) == select_rows(concat(ds, other), shifted));

    const std::vector<std::size_t> bad{4};
    CHECK_THROWS_AS(select_rows(ds, bad), std::out_of_range);
}

TEST_CASE("labeled dataset validation and class bookkeeping") {
    CHECK_THROWS(LabeledDataset(FeatureMatrix::dense(2, 1, {1, 2}), {0}, 2));
    CHECK_THROWS(LabeledDataset(FeatureMatrix::dense(1, 1, {1}), {2}, 2));
    const LabeledDataset ds(FeatureMatrix::dense(3, 1, {1, 2, 3}), {0, 0, 2}, 3);
    CHECK(ds.class_counts() == std::vector<std::size_t>{2, 0, 1});
    CHECK(ds.empty_classes() == std::vector<Label>{1});
}
