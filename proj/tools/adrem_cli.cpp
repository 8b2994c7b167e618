#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "adrem/io.hpp"
#include "adrem/task.hpp"
#include "adrem/toy.hpp"

namespace {

using namespace adrem;

// String-valued flags, parsed into the task once CLI11 is done.
struct TaskFlags {
    std::string source, target, target_labels, format = "auto", label_column;
    std::string recipe = "none", fit = "pooled", learner = "svm";
    std::optional<double> fixed_C;
    std::vector<double> grid = default_C_grid();
    std::size_t folds = 3;
    bool no_stratify = false;
    std::uint64_t cv_seed = kDefaultSeed;
    int iterations = 20;
    int ensemble = 11;
    bool no_balance = false;
    std::uint64_t seed = kDefaultSeed;
    double tolerance = 1e-6;
    std::size_t max_passes = 1000;
    unsigned threads = 1;

    void add_data(CLI::App* app, bool need_target) {
        app->add_option("--source", source, "Labeled source file (svmlight or CSV)")->required();
        auto* t = app->add_option("--target", target, "Target feature file; labels in it are ignored");
        if (need_target) t->required();
        app->add_option("--format", format, "auto, svmlight or csv")->capture_default_str();
        app->add_option("--label-column", label_column, "CSV label column, by header name or index");
        app->add_option("--recipe", recipe, "none, amazon400, amazon-all, surf, decaf-rectified")->capture_default_str();
        app->add_option("--fit", fit, "Scaler statistics from 'pooled' or 'source' data")->capture_default_str();
    }

    void add_learning(CLI::App* app) {
        app->add_option("--learner", learner, "svm or logreg")->capture_default_str();
        app->add_option("--grid", grid, "C grid for cross-validation")->delimiter(',');
        app->add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
        app->add_flag("--no-stratify", no_stratify, "Unstratified folds");
        app->add_option("--cv-seed", cv_seed, "Fold shuffling seed")->capture_default_str();
        app->add_option("--tolerance", tolerance, "Solver tolerance")->capture_default_str();
        app->add_option("--max-passes", max_passes, "Solver pass limit")->capture_default_str();
    }

    void add_adaptation(CLI::App* app) {
        app->add_option("--C", fixed_C, "Fixed C; skips cross-validation");
        app->add_option("-M,--iterations", iterations, "EM iterations")->capture_default_str();
        app->add_option("-m,--ensemble", ensemble, "Ensemble size")->capture_default_str();
        app->add_flag("--no-balance", no_balance, "Uniform instead of class-balanced subsampling");
        app->add_option("--seed", seed, "Base seed")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads for ensemble members")->capture_default_str();
    }

    CvPlan cv_plan() const {
        CvPlan plan;
        plan.n_folds = folds;
        plan.grid = grid;
        plan.stratified = !no_stratify;
        plan.seed = cv_seed;
        plan.tolerance = tolerance;
        plan.max_passes = max_passes;
        return plan;
    }

    TaskSpec task() const {
        TaskSpec t;
        t.source_path = source;
        t.target_path = target;
        if (!target_labels.empty()) t.target_labels_path = target_labels;
        t.format = parse_file_format(format);
        if (!label_column.empty()) t.label_column = label_column;
        t.recipe = parse_recipe(recipe);
        t.fit_population = parse_fit_population(fit);
        t.adrem.learner = parse_learner(learner);
        t.adrem.iterations = iterations;
        t.adrem.ensemble_size = ensemble;
        t.adrem.balance = !no_balance;
        t.adrem.base_seed = seed;
        t.adrem.tolerance = tolerance;
        t.adrem.max_passes = max_passes;
        t.adrem.threads = threads;
        t.select_C = !fixed_C;
        if (fixed_C) t.adrem.C = *fixed_C;
        t.cv = cv_plan();
        return t;
    }
};

std::vector<int> parse_values(const std::string& text) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmd_run(const TaskFlags& flags, const std::string& out, bool traces, bool no_timings, const std::string& from) {
    TaskSpec task = from.empty() ? flags.task() : task_from_report(read_file(from));
    if (!from.empty()) task.adrem.threads = flags.threads;
    if (!out.empty()) task.output_path = out;
    if (!from.empty() && out.empty()) task.output_path.reset();
    if (from.empty()) {
        task.include_traces = traces;
        task.include_timings = !no_timings;
    }
    const RunReport report = run_task(task);
    if (!task.output_path) std::cout << render_report(report);
    else if (report.accuracy) std::cerr << "accuracy " << io::format_double(*report.accuracy) << '\n';
    return 0;
}

int cmd_sweep(const TaskFlags& flags, const std::string& axis_name, const std::string& values_text, int repeats,
              const std::string& out) {
    TaskSpec task = flags.task();
    if (!task.target_labels_path) throw std::invalid_argument("sweep needs --target-labels");
    const SweepAxis axis = parse_sweep_axis(axis_name);
    const std::vector<int> values = parse_values(values_text);
    const LoadedTask data = load_task(task);
    const std::vector<Label> labels = load_target_labels(task, data.label_names);
    const auto rows = run_sweep(task, data, labels, axis, values, repeats);
    if (out.empty()) {
        write_sweep_csv(std::cout, axis, rows);
    } else {
        std::ofstream file(out);
        if (!file) throw std::runtime_error("cannot write " + out);
        write_sweep_csv(file, axis, rows);
    }
    return 0;
}

int cmd_cv(const TaskFlags& flags) {
    TaskSpec task = flags.task();
    task.target_path = task.source_path;  // only the source is read
    const LoadedTask data = load_task(task);
    // Scaler statistics from the source alone: cv never sees target data.
    const PreparedFeatures prepared =
        apply_recipe(task.recipe, data.source.features(), data.source.features(), FitPopulation::source_only);
    const LabeledDataset source(prepared.source, std::vector<Label>(data.source.labels().begin(), data.source.labels().end()),
                                data.source.n_classes());
    const CvResult cv = select_C(source, task.cv, task.adrem.learner);
    std::cout << "C,mean_acc\n";
    for (std::size_t g = 0; g < cv.grid.size(); ++g)
        std::cout << io::format_double(cv.grid[g]) << ',' << io::format_double(cv.mean_accuracy[g]) << '\n';
    std::cout << "selected C " << io::format_double(cv.C) << '\n';
    if (cv.small_class) std::cerr << "warning: a class has fewer members than folds\n";
    return 0;
}

struct ToyFlags {
    std::string kind = "arcs";
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::uint64_t> data_seed;
    std::optional<double> C;
    std::optional<int> iterations, ensemble;
    bool no_balance = false;
    unsigned threads = 1;
    std::string trace, write_dir;
};

int cmd_toy(const ToyFlags& f) {
    const toy::ToyKind kind = toy::parse_toy_kind(f.kind);
    const std::uint64_t data_seed = f.data_seed.value_or(f.seed);
    toy::ToyData data;
    if (kind == toy::ToyKind::arcs) {
        toy::ArcsSpec spec;
        spec.seed = data_seed;
        data = toy::generate_arcs(spec);
    } else {
        toy::ClustersSpec spec;
        spec.seed = data_seed;
        data = toy::generate_clusters(spec);
    }
    if (!f.write_dir.empty()) {
        const std::filesystem::path dir = f.write_dir;
        std::filesystem::create_directories(dir);
        io::write_svmlight(dir / "source.svm", data.source.features(), data.source.labels());
        io::write_svmlight(dir / "target.svm", data.target.features());
        io::write_labels(dir / "target_labels.txt", data.target_labels);
    }
    AdremConfig cfg = toy::default_config(kind);
    cfg.base_seed = f.seed;
    cfg.threads = f.threads;
    if (f.C) cfg.C = *f.C;
    if (f.iterations) cfg.iterations = *f.iterations;
    if (f.ensemble) cfg.ensemble_size = *f.ensemble;
    if (f.no_balance) cfg.balance = false;
    const toy::ToyRun run = toy::run_toy(data, cfg);
    if (!f.trace.empty()) {
        std::ofstream out(f.trace);
        if (!out) throw std::runtime_error("cannot write " + f.trace);
        io::write_trace_csv(out, run.trace);
    }
    std::cout << f.kind << ": C=" << io::format_double(cfg.C) << " M=" << cfg.iterations << " m=" << cfg.ensemble_size
              << " balance=" << (cfg.balance ? "on" : "off") << " seed=" << cfg.base_seed << '\n';
    std::cout << "accuracy " << io::format_double(run.final_accuracy) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AdREM: domain adaptation by randomized expectation maximization"};
    app.require_subcommand(1);

    TaskFlags run_flags;
    std::string run_out, from_report;
    bool traces = false, no_timings = false;
    auto* run = app.add_subcommand("run", "Adapt a source classifier to a target file and write a report");
    run_flags.add_data(run, false);
    run->add_option("--target-labels", run_flags.target_labels, "Target labels, used only for the reported accuracy");
    run_flags.add_learning(run);
    run_flags.add_adaptation(run);
    run->add_option("-o,--out", run_out, "Report path (default: stdout)");
    run->add_flag("--traces", traces, "Include per-member iteration traces");
    run->add_flag("--no-timings", no_timings, "Omit wall-clock timings");
    run->add_option("--from-report", from_report, "Re-run the task echoed in a report");
    // --source and --target may come from the report instead.
    run->get_option("--source")->required(false);
    run->callback([&] {
        if (from_report.empty() && (run_flags.source.empty() || run_flags.target.empty()))
            throw CLI::RequiredError("--source and --target (or --from-report)");
    });

    TaskFlags sweep_flags;
    std::string axis = "ensemble_size", values, sweep_out;
    int repeats = 10;
    auto* sweep = app.add_subcommand("sweep", "Mean accuracy over repeats for a range of m or M");
    sweep_flags.add_data(sweep, true);
    sweep->add_option("--target-labels", sweep_flags.target_labels, "Target labels")->required();
    sweep_flags.add_learning(sweep);
    sweep_flags.add_adaptation(sweep);
    sweep->add_option("--axis", axis, "ensemble_size or iterations")->capture_default_str();
    sweep->add_option("--values", values, "Comma-separated ascending values")->required();
    sweep->add_option("--repeats", repeats, "Repeats per value")->capture_default_str();
    sweep->add_option("-o,--out", sweep_out, "Sweep CSV path (default: stdout)");

    ToyFlags toy_flags;
    auto* toy_cmd = app.add_subcommand("toy", "Generate a toy problem and adapt to it");
    toy_cmd->add_option("--kind", toy_flags.kind, "arcs or clusters")->capture_default_str();
    toy_cmd->add_option("--seed", toy_flags.seed, "Base seed for the ensemble")->capture_default_str();
    toy_cmd->add_option("--data-seed", toy_flags.data_seed, "Generator seed (default: --seed)");
    toy_cmd->add_option("--C", toy_flags.C, "Override C");
    toy_cmd->add_option("-M,--iterations", toy_flags.iterations, "EM iterations");
    toy_cmd->add_option("-m,--ensemble", toy_flags.ensemble, "Ensemble size");
    toy_cmd->add_flag("--no-balance", toy_flags.no_balance, "Uniform subsampling");
    toy_cmd->add_option("--threads", toy_flags.threads, "Worker threads")->capture_default_str();
    toy_cmd->add_option("--trace", toy_flags.trace, "Write the first member's trace CSV here");
    toy_cmd->add_option("--write-dir", toy_flags.write_dir, "Write source.svm, target.svm, target_labels.txt here");

    TaskFlags cv_flags;
    auto* cv = app.add_subcommand("cv", "Select C by cross-validation on the source alone");
    cv_flags.add_data(cv, false);
    cv_flags.add_learning(cv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_flags, run_out, traces, no_timings, from_report);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, axis, values, repeats, sweep_out);
        if (toy_cmd->parsed()) return cmd_toy(toy_flags);
        if (cv->parsed()) return cmd_cv(cv_flags);
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
