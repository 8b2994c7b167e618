#include "adrem/task.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "adrem/io.hpp"

namespace adrem {
namespace {

FileFormat resolve_format(FileFormat format, const std::filesystem::path& path) {
    if (format != FileFormat::automatic) return format;
    const std::string ext = path.extension().string();
    return ext == ".csv" ? FileFormat::csv : FileFormat::svmlight;
}

template <class F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

io::ParsedData read_features(const TaskSpec& task, const std::filesystem::path& path, bool labeled,
                             std::size_t n_features, const std::vector<std::string>& known_names) {
    if (resolve_format(task.format, path) == FileFormat::csv) {
        io::CsvOptions options;
        options.label_column = task.label_column;
        options.known_label_names = known_names;
        options.label_optional = !labeled;
        io::ParsedData parsed = io::read_dense_csv(path, options);
        if (!labeled) parsed.labels.clear();
        return parsed;
    }
    io::SvmlightOptions options;
    options.mode = labeled ? io::LabelMode::labeled : io::LabelMode::unlabeled;
    options.n_features = n_features;
    return io::read_svmlight(path, options);
}

}  // namespace

LoadedTask load_task(const TaskSpec& task) {
    return stage("load", [&] {
        LoadedTask out;
        io::ParsedData src = read_features(task, task.source_path, true, 0, {});
        io::ParsedData tgt = read_features(task, task.target_path, false, 0, {});
        // svmlight dimensions come from the largest index seen; align them.
        if (src.features.cols() != tgt.features.cols() &&
            resolve_format(task.format, task.source_path) == FileFormat::svmlight &&
            resolve_format(task.format, task.target_path) == FileFormat::svmlight) {
            const std::size_t d = std::max(src.features.cols(), tgt.features.cols());
            src = read_features(task, task.source_path, true, d, {});
            tgt = read_features(task, task.target_path, false, d, {});
        }
        if (src.features.cols() != tgt.features.cols()) {
            throw std::invalid_argument("source has " + std::to_string(src.features.cols()) + " features, target has " +
                                        std::to_string(tgt.features.cols()));
        }
        if (src.labels.empty() && src.features.rows() > 0) throw std::invalid_argument("source file has no labels");
        if (src.features.rows() == 0) throw std::invalid_argument("source file is empty");
        if (tgt.features.rows() == 0) throw std::invalid_argument("target file is empty");
        out.label_names = src.label_names;
        out.source = src.labeled();
        out.target = tgt.unlabeled();
        out.warnings = std::move(src.warnings);
        out.warnings.insert(out.warnings.end(), tgt.warnings.begin(), tgt.warnings.end());
        return out;
    });
}

std::vector<Label> load_target_labels(const TaskSpec& task, const std::vector<std::string>& label_names) {
    if (!task.target_labels_path) throw std::invalid_argument("task has no target labels");
    const auto& path = *task.target_labels_path;
    if (resolve_format(task.format, path) == FileFormat::csv) {
        io::CsvOptions options;
        options.label_column = task.label_column ? task.label_column : std::optional<std::string>("0");
        options.known_label_names = label_names;
        const io::ParsedData parsed = io::read_dense_csv(path, options);
        if (!label_names.empty() && parsed.label_names.size() > label_names.size())
            throw std::invalid_argument(path.string() + ": target labels name classes absent from the source");
        return parsed.labels;
    }
    return io::read_labels(path);
}

RunReport run_loaded(const TaskSpec& task, const LoadedTask& data, std::optional<std::vector<Label>> target_labels) {
    stage("config", [&] {
        task.validate();
        return 0;
    });
    Stopwatch clock;
    RunReport report;
    report.task = task;
    report.n_source = data.source.rows();
    report.n_target = data.target.rows();
    report.n_features = data.source.cols();
    report.n_classes = data.source.n_classes();
    report.label_names = data.label_names;
    report.warnings = data.warnings;

    if (target_labels) {
        stage("evaluate", [&] {
            if (target_labels->size() != data.target.rows()) {
                throw std::invalid_argument(std::to_string(target_labels->size()) + " target labels for " +
                                            std::to_string(data.target.rows()) + " target rows");
            }
            for (Label y : *target_labels)
                if (y < 0 || y >= data.source.n_classes())
                    throw std::invalid_argument("target label " + std::to_string(y) + " outside the source classes");
            return 0;
        });
    }

    const PreparedFeatures prepared =
        stage("preprocess", [&] { return apply_recipe(task.recipe, data.source.features(), data.target.features(),
                                                      task.fit_population); });
    for (std::size_t i : prepared.flagged_source_rows)
        report.warnings.push_back("source row " + std::to_string(i) + " has zero mean, left unscaled");
    for (std::size_t i : prepared.flagged_target_rows)
        report.warnings.push_back("target row " + std::to_string(i) + " has zero mean, left unscaled");
    const LabeledDataset source(prepared.source, std::vector<Label>(data.source.labels().begin(), data.source.labels().end()),
                                data.source.n_classes());
    const UnlabeledDataset target(prepared.target);
    report.timings.push_back({"preprocess", clock.lap()});

    AdremConfig cfg = task.adrem;
    if (task.select_C) {
        CvPlan plan = task.cv;
        plan.tolerance = cfg.tolerance;
        plan.max_passes = cfg.max_passes;
        report.cv = stage("select_C", [&] { return select_C(source, plan, cfg.learner); });
        cfg.C = report.cv->C;
        if (report.cv->small_class) report.warnings.push_back("a source class has fewer members than CV folds");
        report.timings.push_back({"select_C", clock.lap()});
    }
    report.selected_C = cfg.C;

    cfg.record_trace = task.include_traces;
    // Labels reach the ensemble only to annotate traces; predictions never see them.
    const std::span<const Label> trace_labels =
        task.include_traces && target_labels ? std::span<const Label>(*target_labels) : std::span<const Label>{};
    const EnsembleResult result = stage("adapt", [&] { return ensemble_adrem(source, target, cfg, trace_labels); });
    report.predictions = result.labels;
    if (task.include_traces)
        for (const auto& member : result.members) report.member_traces.push_back(member.trace);
    for (std::size_t j = 0; j < result.members.size(); ++j)
        if (result.members[j].degenerate)
            report.warnings.push_back("member " + std::to_string(j) + " saw a single-class subsample");
    report.timings.push_back({"adapt", clock.lap()});

    if (target_labels) report.accuracy = accuracy(report.predictions, *target_labels);
    if (!task.include_timings) report.timings.clear();
    return report;
}

RunReport run_task(const TaskSpec& task) {
    Stopwatch clock;
    const LoadedTask data = load_task(task);
    std::optional<std::vector<Label>> labels;
    if (task.target_labels_path) labels = stage("load", [&] { return load_target_labels(task, data.label_names); });
    const double load_seconds = clock.lap();
    RunReport report = run_loaded(task, data, std::move(labels));
    if (task.include_timings) report.timings.insert(report.timings.begin(), {"load", load_seconds});
    if (task.output_path) {
        stage("write", [&] {
            std::ofstream out(*task.output_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + task.output_path->string());
            out << render_report(report);
            return 0;
        });
    }
    return report;
}

std::string_view to_string(SweepAxis axis) {
    return axis == SweepAxis::ensemble_size ? "ensemble_size" : "iterations";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "ensemble_size" || name == "m") return SweepAxis::ensemble_size;
    if (name == "iterations" || name == "M") return SweepAxis::iterations;
    throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "' (expected ensemble_size or iterations)");
}

std::vector<SweepRow> run_sweep(const TaskSpec& task, const LoadedTask& data, const std::vector<Label>& target_labels,
                                SweepAxis axis, const std::vector<int>& values, int repeats) {
    stage("config", [&] {
        if (values.empty()) throw std::invalid_argument("sweep: no values");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 1) throw std::invalid_argument("sweep: values must be positive");
            if (i > 0 && values[i] <= values[i - 1]) throw std::invalid_argument("sweep: values must be ascending");
        }
        if (repeats < 1) throw std::invalid_argument("sweep: repeats must be at least 1");
        if (target_labels.size() != data.target.rows())
            throw std::invalid_argument("sweep: target labels do not match target rows");
        return 0;
    });

    const PreparedFeatures prepared = stage("preprocess", [&] {
        return apply_recipe(task.recipe, data.source.features(), data.target.features(), task.fit_population);
    });
    const LabeledDataset source(prepared.source, std::vector<Label>(data.source.labels().begin(), data.source.labels().end()),
                                data.source.n_classes());
    const UnlabeledDataset target(prepared.target);

    AdremConfig cfg = task.adrem;
    cfg.record_trace = false;
    if (task.select_C) {
        CvPlan plan = task.cv;
        plan.tolerance = cfg.tolerance;
        plan.max_passes = cfg.max_passes;
        cfg.C = stage("select_C", [&] { return select_C(source, plan, cfg.learner).C; });
    }

    std::vector<SweepRow> rows(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) rows[v].value = values[v];
    for (int r = 0; r < repeats; ++r) {
        cfg.base_seed = task.adrem.base_seed + static_cast<std::uint64_t>(r);
        if (axis == SweepAxis::ensemble_size) {
            // Member j's seed does not depend on m, so smaller ensembles are
            // prefixes of the largest one.
            cfg.ensemble_size = values.back();
            const EnsembleResult full = stage("adapt", [&] { return ensemble_adrem(source, target, cfg); });
            for (std::size_t v = 0; v < values.size(); ++v) {
                const std::vector<std::vector<Label>> prefix(full.member_labels.begin(),
                                                             full.member_labels.begin() + values[v]);
                rows[v].accuracies.push_back(accuracy(majority_vote(prefix), target_labels));
            }
        } else {
            for (std::size_t v = 0; v < values.size(); ++v) {
                cfg.iterations = values[v];
                const EnsembleResult res = stage("adapt", [&] { return ensemble_adrem(source, target, cfg); });
                rows[v].accuracies.push_back(accuracy(res.labels, target_labels));
            }
        }
    }
    for (auto& row : rows) {
        double sum = 0.0;
        for (double a : row.accuracies) sum += a;
        row.mean_accuracy = sum / static_cast<double>(repeats);
        double sq = 0.0;
        for (double a : row.accuracies) sq += (a - row.mean_accuracy) * (a - row.mean_accuracy);
        row.std_accuracy = std::sqrt(sq / static_cast<double>(repeats));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
    if (axis == SweepAxis::ensemble_size) {
        out << "size,mean_acc,std_acc\n";
        for (const auto& r : rows)
            out << r.value << ',' << io::format_double(r.mean_accuracy) << ',' << io::format_double(r.std_accuracy) << '\n';
    } else {
        out << "num_iterations,mean_acc\n";
        for (const auto& r : rows) out << r.value << ',' << io::format_double(r.mean_accuracy) << '\n';
    }
}

}  // namespace adrem
