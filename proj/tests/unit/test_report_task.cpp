#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adrem/io.hpp"
#include "adrem/task.hpp"
#include "adrem/toy.hpp"

using namespace adrem;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

TaskSpec arcs_task(const TempDir& dir, std::uint64_t seed = 5) {
    toy::ArcsSpec spec;
    spec.seed = seed;
    const auto data = toy::generate_arcs(spec);
    io::write_svmlight(dir.path / "s.svm", data.source.features(), data.source.labels());
    io::write_svmlight(dir.path / "t.svm", data.target.features());
    io::write_labels(dir.path / "y.txt", data.target_labels);
    TaskSpec t;
    t.source_path = dir.path / "s.svm";
    t.target_path = dir.path / "t.svm";
    t.target_labels_path = dir.path / "y.txt";
    t.cv.grid = {0.01, 0.1, 1.0};
    t.include_timings = false;
    return t;
}

}  // namespace

TEST_CASE("report round trips through its text form") {
    RunReport r;
    r.task.source_path = "a b/source.svm";
    r.task.target_path = "target.csv";
    r.task.label_column = "y";
    r.task.recipe = Recipe::surf;
    r.task.adrem.base_seed = 18446744073709551615ULL;
    r.n_source = 3;
    r.n_target = 4;
    r.n_features = 2;
    r.n_classes = 3;
    r.label_names = {"x", "y", "z"};
    r.predictions = {0, 2, 1, 1};
    r.accuracy = 0.75;
    r.selected_C = 0.1;
    r.cv = CvResult{0.1, {0.01, 0.1}, {0.5, 1.0 / 3.0}, true};
    r.member_traces = {{{0, 0, 1.5, 2.5, 0.25}, {1, 4, 0.1, 0.2, std::nullopt}}};
    r.warnings = {"something odd"};
    r.timings = {{"load", 0.125}, {"adapt", 1e-7}};

    const std::string text = render_report(r);
    const RunReport back = parse_report(text);
    CHECK(render_report(back) == text);
    CHECK(back.predictions == r.predictions);
    CHECK(back.accuracy == r.accuracy);
    CHECK(back.timings == r.timings);
    CHECK(back.task.adrem.base_seed == r.task.adrem.base_seed);
    CHECK(back.cv->mean_accuracy == r.cv->mean_accuracy);
    CHECK(back.member_traces[0][1].sample_size == 4);
    CHECK_THROWS_AS(parse_report("no block here"), std::invalid_argument);
}

TEST_CASE("run without target labels has no accuracy field") {
    TempDir dir("adrem_unit_nolabels");
    TaskSpec t = arcs_task(dir);
    const RunReport with = run_task(t);
    t.target_labels_path.reset();
    const RunReport without = run_task(t);
    CHECK(with.accuracy.has_value());
    CHECK_FALSE(without.accuracy.has_value());
    CHECK(machine_block(without).find("\"accuracy\"") == std::string::npos);
    CHECK(with.predictions == without.predictions);
}

TEST_CASE("same task twice gives byte-identical reports, and the echo reproduces them") {
    TempDir dir("adrem_unit_repro");
    TaskSpec t = arcs_task(dir);
    t.include_traces = true;
    const std::string a = render_report(run_task(t));
    const std::string b = render_report(run_task(t));
    CHECK(a == b);
    CHECK(render_report(run_task(task_from_report(a))) == a);
}

TEST_CASE("stage errors name the stage") {
    TempDir dir("adrem_unit_stage");
    TaskSpec t = arcs_task(dir);
    t.source_path = dir.path / "missing.svm";
    try {
        run_task(t);
        FAIL("expected failure");
    } catch (const StageError& e) {
        CHECK(e.stage() == "load");
    }
    t = arcs_task(dir);
    t.adrem.ensemble_size = 0;
    try {
        run_task(t);
        FAIL("expected failure");
    } catch (const StageError& e) {
        CHECK(e.stage() == "config");
    }
    t = arcs_task(dir);
    {
        std::ofstream bad(dir.path / "y.txt");
        bad << "1\n0\n";
    }
    try {
        run_task(t);
        FAIL("expected failure");
    } catch (const StageError& e) {
        CHECK(e.stage() == "evaluate");
    }
}

TEST_CASE("sweep csv headers and single-value agreement with run") {
    TempDir dir("adrem_unit_sweep");
    const TaskSpec t = arcs_task(dir);
    const LoadedTask data = load_task(t);
    const auto labels = load_target_labels(t, data.label_names);
    const auto rows = run_sweep(t, data, labels, SweepAxis::ensemble_size, {t.adrem.ensemble_size}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_accuracy == *run_task(t).accuracy);
    CHECK(rows[0].std_accuracy == 0.0);

    std::ostringstream a, b;
    write_sweep_csv(a, SweepAxis::ensemble_size, rows);
    write_sweep_csv(b, SweepAxis::iterations, rows);
    CHECK(a.str().rfind("size,mean_acc,std_acc\n", 0) == 0);
    CHECK(b.str().rfind("num_iterations,mean_acc\n", 0) == 0);
    CHECK_THROWS(run_sweep(t, data, labels, SweepAxis::iterations, {5, 3}, 1));
}

TEST_CASE("csv tasks map string labels through the source") {
    TempDir dir("adrem_unit_csv");
    const auto data = toy::generate_arcs(toy::ArcsSpec{});
    {
        std::ofstream s(dir.path / "s.csv");
        s << "x,y,cls\n";
        for (std::size_t i = 0; i < data.source.rows(); ++i)
            s << data.source.features().at(i, 0) << ',' << data.source.features().at(i, 1) << ','
              << (data.source.labels()[i] == 0 ? "left" : "right") << '\n';
        std::ofstream t(dir.path / "t.csv");
        std::ofstream y(dir.path / "y.csv");
        t << "x,y\n";
        y << "cls\n";
        for (std::size_t i = 0; i < data.target.rows(); ++i) {
            t << data.target.features().at(i, 0) << ',' << data.target.features().at(i, 1) << '\n';
            y << (data.target_labels[i] == 0 ? "left" : "right") << '\n';
        }
    }
    TaskSpec t;
    t.source_path = dir.path / "s.csv";
    t.target_path = dir.path / "t.csv";
    t.target_labels_path = dir.path / "y.csv";
    t.label_column = "cls";
    t.select_C = false;
    t.adrem.C = 0.01;
    const RunReport r = run_task(t);
    CHECK(r.label_names == std::vector<std::string>{"left", "right"});
    CHECK(*r.accuracy >= 0.99);
}

TEST_CASE("ensemble sweep cells equal separate runs") {
    TempDir dir("adrem_unit_sweep_cells");
    TaskSpec t = arcs_task(dir, 8);
    t.select_C = false;
    t.adrem.C = 0.01;
    t.adrem.iterations = 3;
    const LoadedTask data = load_task(t);
    const auto labels = load_target_labels(t, data.label_names);
    const auto rows = run_sweep(t, data, labels, SweepAxis::ensemble_size, {1, 3}, 2);
    for (const auto& row : rows)
        for (int r = 0; r < 2; ++r) {
            TaskSpec single = t;
            single.adrem.ensemble_size = row.value;
            single.adrem.base_seed = t.adrem.base_seed + static_cast<std::uint64_t>(r);
            CHECK(row.accuracies[static_cast<std::size_t>(r)] == *run_task(single).accuracy);
        }
}
