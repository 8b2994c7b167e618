#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adrem/adaptation.hpp"
#include "adrem/dataset.hpp"

namespace adrem::io {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class LabelMode { labeled, unlabeled };

struct SvmlightOptions {
    LabelMode mode = LabelMode::labeled;
    std::size_t n_features = 0;  // 0: infer from the largest index
    int n_classes = 0;           // 0: infer (at least 2)
};

// Parsed file contents. `labels` is empty in unlabeled mode.
struct ParsedData {
    FeatureMatrix features;
    std::vector<Label> labels;
    int n_classes = 0;
    std::vector<std::string> label_names;  // CSV string labels, in class order
    std::vector<std::string> warnings;

    LabeledDataset labeled() const;
    UnlabeledDataset unlabeled() const { return UnlabeledDataset(features); }
};

// Lines `label idx:val ...` with 1-based indices; `#` starts a comment.
// Labels -1/+1 map to classes 0/1, other non-negative integers map to
// themselves. In unlabeled mode a leading label token is skipped if present.
ParsedData read_svmlight(std::istream& in, const SvmlightOptions& options = {}, const std::string& name = "<stream>");
ParsedData read_svmlight(const std::filesystem::path& path, const SvmlightOptions& options = {});

// Labels are written as class indices; values in shortest round-trip form.
void write_svmlight(std::ostream& out, const FeatureMatrix& features, std::span<const Label> labels = {});
void write_svmlight(const std::filesystem::path& path, const FeatureMatrix& features, std::span<const Label> labels = {});

struct CsvOptions {
    // Label column by header name or zero-based index; empty means no labels.
    std::optional<std::string> label_column;
    // String labels already assigned (e.g. from the source file); unseen
    // names are appended.
    std::vector<std::string> known_label_names;
    // Missing label column is not an error (target files may omit it).
    bool label_optional = false;
};

// Rectangular numeric CSV with an optional header row. Numeric labels follow
// the svmlight mapping; any non-numeric label maps by first appearance.
ParsedData read_dense_csv(std::istream& in, const CsvOptions& options = {}, const std::string& name = "<stream>");
ParsedData read_dense_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Header `f0,...,f{d-1}[,label]`.
void write_dense_csv(std::ostream& out, const FeatureMatrix& features, std::span<const Label> labels = {});
void write_dense_csv(const std::filesystem::path& path, const FeatureMatrix& features, std::span<const Label> labels = {});

// Header `it,accuracy,loss,lossbal`; accuracy as a fraction, blank when unknown.
void write_trace_csv(std::ostream& out, const std::vector<IterationTrace>& trace);
std::vector<IterationTrace> read_trace_csv(std::istream& in);

// First token of every non-comment line, mapped like svmlight labels. Reads
// plain label files and the label column of svmlight files alike.
std::vector<Label> read_labels(std::istream& in, const std::string& name = "<stream>");
std::vector<Label> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, std::span<const Label> labels);

std::string format_double(double v);

}  // namespace adrem::io
