#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adrem/report.hpp"

namespace adrem {

// Failure inside one stage of a run; what() starts with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct LoadedTask {
    LabeledDataset source;
    UnlabeledDataset target;
    std::vector<std::string> label_names;
    std::vector<std::string> warnings;
};

// Reads source and target features. Target labels are never touched here.
LoadedTask load_task(const TaskSpec& task);

// Reads the evaluation labels named by the task, mapped like the source labels.
std::vector<Label> load_target_labels(const TaskSpec& task, const std::vector<std::string>& label_names);

// Preprocess, select C on the source, adapt, and score when labels are given.
RunReport run_loaded(const TaskSpec& task, const LoadedTask& data,
                     std::optional<std::vector<Label>> target_labels = std::nullopt);

// run_loaded on the task's files; writes the report when output_path is set.
RunReport run_task(const TaskSpec& task);

enum class SweepAxis { ensemble_size, iterations };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepRow {
    int value = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std over repeats
    std::vector<double> accuracies;
};

// One row per value. Repeat r uses base seed task.adrem.base_seed + r, so a
// single repeat reproduces run_task. C is selected once, as in run_task.
std::vector<SweepRow> run_sweep(const TaskSpec& task, const LoadedTask& data, const std::vector<Label>& target_labels,
                                SweepAxis axis, const std::vector<int>& values, int repeats);

// `size,mean_acc,std_acc` for ensemble size, `num_iterations,mean_acc` for
// iterations.
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

}  // namespace adrem
