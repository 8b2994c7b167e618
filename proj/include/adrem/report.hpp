#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adrem/adaptation.hpp"
#include "adrem/model_selection.hpp"
#include "adrem/preprocessing.hpp"

namespace adrem {

enum class FileFormat { automatic, svmlight, csv };

std::string_view to_string(FileFormat format);
FileFormat parse_file_format(std::string_view name);

// Everything needed to reproduce a run. Target labels are used only to score
// the final prediction.
struct TaskSpec {
    std::filesystem::path source_path;
    std::filesystem::path target_path;
    std::optional<std::filesystem::path> target_labels_path;
    FileFormat format = FileFormat::automatic;
    std::optional<std::string> label_column;  // CSV only
    Recipe recipe = Recipe::none;
    FitPopulation fit_population = FitPopulation::pooled;
    AdremConfig adrem;
    bool select_C = true;  // false: use adrem.C as given
    CvPlan cv;
    std::optional<std::filesystem::path> output_path;
    bool include_traces = false;
    bool include_timings = true;

    void validate() const;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
    bool operator==(const StageTiming&) const = default;
};

struct RunReport {
    TaskSpec task;
    std::size_t n_source = 0;
    std::size_t n_target = 0;
    std::size_t n_features = 0;
    int n_classes = 0;
    std::vector<std::string> label_names;  // CSV string labels by class index
    std::vector<Label> predictions;
    std::optional<double> accuracy;
    double selected_C = 1.0;
    std::optional<CvResult> cv;
    std::vector<std::vector<IterationTrace>> member_traces;
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;
};

// Human-readable section followed by a fenced json block. The block holds
// everything except timings and is identical for identical tasks.
std::string render_report(const RunReport& report);
std::string machine_block(const RunReport& report);

// Inverse of render_report. Throws std::invalid_argument on malformed text.
RunReport parse_report(std::string_view text);

// The task recorded in a report's config echo.
TaskSpec task_from_report(std::string_view text);

}  // namespace adrem
