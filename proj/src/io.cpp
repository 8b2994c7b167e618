#include "adrem/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace adrem::io {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_integer(std::string_view s) {
    const auto v = parse_double(s);
    if (!v || !std::isfinite(*v) || std::floor(*v) != *v || std::abs(*v) > 1e15) return std::nullopt;
    return static_cast<long long>(*v);
}

// Applies the -1/+1 -> 0/1 convention when -1 occurs, identity otherwise.
std::vector<Label> map_integer_labels(const std::vector<long long>& raw, const std::vector<std::size_t>& lines,
                                      const std::string& name) {
    const bool signed_binary = std::find(raw.begin(), raw.end(), -1LL) != raw.end();
    std::vector<Label> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const long long y = raw[i];
        if (signed_binary) {
            if (y != -1 && y != 1) throw ParseError(name, lines[i], "label " + std::to_string(y) + " in a -1/+1 file");
            out.push_back(y == 1 ? 1 : 0);
        } else {
            if (y < 0 || y > 1'000'000) throw ParseError(name, lines[i], "invalid class label " + std::to_string(y));
            out.push_back(static_cast<Label>(y));
        }
    }
    return out;
}

int infer_classes(const std::vector<Label>& labels, int requested, const std::string& name) {
    Label max_label = 0;
    for (Label y : labels) max_label = std::max(max_label, y);
    if (requested > 0) {
        if (!labels.empty() && max_label >= requested) {
            throw std::invalid_argument(name + ": label " + std::to_string(max_label) + " exceeds " +
                                        std::to_string(requested) + " classes");
        }
        return requested;
    }
    return std::max(2, static_cast<int>(max_label) + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

LabeledDataset ParsedData::labeled() const {
    if (labels.size() != features.rows()) throw std::invalid_argument("dataset has no labels");
    return LabeledDataset(features, labels, n_classes);
}

ParsedData read_svmlight(std::istream& in, const SvmlightOptions& options, const std::string& name) {
    ParsedData out;
    std::vector<SparseRow> rows;
    std::vector<long long> raw_labels;
    std::vector<std::size_t> label_lines;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(strip_comment(line));
        if (body.empty()) continue;
        std::istringstream tokens{std::string(body)};
        std::string token;
        bool first = true;
        SparseRow row;
        bool have_label = false;
        long long label = 0;
        bool unsorted = false;
        FeatureIndex last = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (first && colon == std::string::npos) {
                const auto y = parse_integer(token);
                if (!y) throw ParseError(name, line_no, "malformed label '" + token + "'");
                label = *y;
                have_label = true;
                first = false;
                continue;
            }
            first = false;
            if (colon == std::string::npos) throw ParseError(name, line_no, "malformed token '" + token + "'");
            const std::string_view key = std::string_view(token).substr(0, colon);
            if (key == "qid") continue;
            const auto idx = parse_integer(key);
            const auto val = parse_double(std::string_view(token).substr(colon + 1));
            if (!idx || *idx < 1 || !val) throw ParseError(name, line_no, "malformed token '" + token + "'");
            const auto zero_based = static_cast<FeatureIndex>(*idx - 1);
            if (!row.empty() && zero_based <= last) unsorted = true;
            last = zero_based;
            max_index = std::max(max_index, static_cast<std::size_t>(*idx));
            row.emplace_back(zero_based, *val);
        }
        if (unsorted) out.warnings.push_back(name + ":" + std::to_string(line_no) + ": indices not ascending, reordered");
        if (options.mode == LabelMode::labeled) {
            if (!have_label) throw ParseError(name, line_no, "missing label");
            raw_labels.push_back(label);
            label_lines.push_back(line_no);
        }
        rows.push_back(std::move(row));
    }
    std::size_t d = options.n_features;
    if (d == 0) d = max_index;
    if (max_index > d) {
        throw std::invalid_argument(name + ": feature index " + std::to_string(max_index) + " exceeds " +
                                    std::to_string(d) + " features");
    }
    out.features = FeatureMatrix::sparse(d, rows);
    if (options.mode == LabelMode::labeled) {
        out.labels = map_integer_labels(raw_labels, label_lines, name);
        out.n_classes = infer_classes(out.labels, options.n_classes, name);
    }
    return out;
}

ParsedData read_svmlight(const std::filesystem::path& path, const SvmlightOptions& options) {
    auto in = open_input(path);
    return read_svmlight(in, options, path.string());
}

void write_svmlight(std::ostream& out, const FeatureMatrix& features, std::span<const Label> labels) {
    if (!labels.empty() && labels.size() != features.rows()) {
        throw std::invalid_argument("write_svmlight: label count does not match rows");
    }
    for (std::size_t i = 0; i < features.rows(); ++i) {
        bool first = true;
        if (!labels.empty()) {
            out << labels[i];
            first = false;
        }
        features.row(i).for_each_nonzero([&](std::size_t j, double v) {
            if (!first) out << ' ';
            out << (j + 1) << ':' << format_double(v);
            first = false;
        });
        out << '\n';
    }
}

void write_svmlight(const std::filesystem::path& path, const FeatureMatrix& features, std::span<const Label> labels) {
    auto out = open_output(path);
    write_svmlight(out, features, labels);
}

ParsedData read_dense_csv(std::istream& in, const CsvOptions& options, const std::string& name) {
    std::vector<std::string_view> row;
    auto split_row = [&row](std::string_view body) {
        row.clear();
        for (auto c : split(body, ',')) {
            c = trim(c);
            if (c.size() >= 2 && c.front() == '"' && c.back() == '"') c = c.substr(1, c.size() - 2);
            row.push_back(c);
        }
    };

    // A numeric label column index lets a headerless file carry string labels.
    std::optional<std::size_t> index_hint;
    if (options.label_column)
        if (const auto idx = parse_integer(*options.label_column); idx && *idx >= 0)
            index_hint = static_cast<std::size_t>(*idx);

    ParsedData out;
    std::vector<double> values;
    std::vector<std::string> label_cells;
    std::vector<std::size_t> label_lines;
    std::optional<std::size_t> label_col;
    std::size_t width = 0, n = 0, line_no = 0;
    bool first = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        split_row(body);
        if (first) {
            first = false;
            width = row.size();
            bool numeric = true;
            for (std::size_t c = 0; c < row.size(); ++c)
                if (c != index_hint && !parse_double(row[c])) numeric = false;
            std::vector<std::string> header;
            if (!numeric) header.assign(row.begin(), row.end());
            if (options.label_column) {
                const std::string& want = *options.label_column;
                const auto it = std::find(header.begin(), header.end(), want);
                if (it != header.end()) {
                    label_col = static_cast<std::size_t>(it - header.begin());
                } else if (index_hint && *index_hint < width) {
                    label_col = index_hint;
                } else if (!options.label_optional) {
                    throw std::invalid_argument(name + ": no label column '" + want + "'");
                }
            }
            if (!numeric) continue;
        }
        if (row.size() != width) {
            throw ParseError(name, line_no,
                             "expected " + std::to_string(width) + " columns, found " + std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (label_col && c == *label_col) {
                label_cells.emplace_back(row[c]);
                label_lines.push_back(line_no);
                continue;
            }
            const auto v = parse_double(row[c]);
            if (!v) throw ParseError(name, line_no, "non-numeric cell '" + std::string(row[c]) + "'");
            values.push_back(*v);
        }
        ++n;
    }
    const std::size_t d = label_col ? width - 1 : width;
    out.features = FeatureMatrix::dense(n, d, std::move(values));

    if (label_col) {
        const bool numeric = options.known_label_names.empty() &&
                             std::all_of(label_cells.begin(), label_cells.end(),
                                         [](const std::string& c) { return parse_integer(c).has_value(); });
        if (numeric) {
            std::vector<long long> raw;
            for (const auto& c : label_cells) raw.push_back(*parse_integer(c));
            out.labels = map_integer_labels(raw, label_lines, name);
            out.n_classes = infer_classes(out.labels, 0, name);
        } else {
            out.label_names = options.known_label_names;
            for (const auto& c : label_cells) {
                auto it = std::find(out.label_names.begin(), out.label_names.end(), c);
                if (it == out.label_names.end()) {
                    out.label_names.push_back(c);
                    it = out.label_names.end() - 1;
                }
                out.labels.push_back(static_cast<Label>(it - out.label_names.begin()));
            }
            out.n_classes = std::max<int>(2, static_cast<int>(out.label_names.size()));
        }
    }
    return out;
}

ParsedData read_dense_csv(const std::filesystem::path& path, const CsvOptions& options) {
    auto in = open_input(path);
    return read_dense_csv(in, options, path.string());
}

void write_dense_csv(std::ostream& out, const FeatureMatrix& features, std::span<const Label> labels) {
    if (!labels.empty() && labels.size() != features.rows()) {
        throw std::invalid_argument("write_dense_csv: label count does not match rows");
    }
    for (std::size_t j = 0; j < features.cols(); ++j) out << (j ? "," : "") << 'f' << j;
    if (!labels.empty()) out << (features.cols() ? "," : "") << "label";
    out << '\n';
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) out << (j ? "," : "") << format_double(features.at(i, j));
        if (!labels.empty()) out << (features.cols() ? "," : "") << labels[i];
        out << '\n';
    }
}

void write_dense_csv(const std::filesystem::path& path, const FeatureMatrix& features, std::span<const Label> labels) {
    auto out = open_output(path);
    write_dense_csv(out, features, labels);
}

void write_trace_csv(std::ostream& out, const std::vector<IterationTrace>& trace) {
    out << "it,accuracy,loss,lossbal\n";
    for (const auto& t : trace) {
        out << t.k << ',' << (t.accuracy ? format_double(*t.accuracy) : std::string()) << ','
            << format_double(t.svm_loss) << ',' << format_double(t.balanced_loss) << '\n';
    }
}

std::vector<IterationTrace> read_trace_csv(std::istream& in) {
    std::vector<IterationTrace> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || line_no == 1) continue;
        const auto f = split(body, ',');
        if (f.size() != 4) throw ParseError("<trace>", line_no, "expected 4 columns");
        IterationTrace t;
        const auto k = parse_integer(f[0]);
        const auto loss = parse_double(f[2]);
        const auto bal = parse_double(f[3]);
        if (!k || !loss || !bal) throw ParseError("<trace>", line_no, "malformed trace row");
        t.k = static_cast<int>(*k);
        if (!trim(f[1]).empty()) t.accuracy = parse_double(f[1]);
        t.svm_loss = *loss;
        t.balanced_loss = *bal;
        out.push_back(t);
    }
    return out;
}

std::vector<Label> read_labels(std::istream& in, const std::string& name) {
    std::vector<long long> raw;
    std::vector<std::size_t> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(strip_comment(line));
        if (body.empty()) continue;
        const auto end = body.find_first_of(" \t,");
        const auto token = body.substr(0, end);
        const auto y = parse_integer(token);
        if (!y) throw ParseError(name, line_no, "malformed label '" + std::string(token) + "'");
        raw.push_back(*y);
        lines.push_back(line_no);
    }
    return map_integer_labels(raw, lines, name);
}

std::vector<Label> read_labels(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_labels(in, path.string());
}

void write_labels(const std::filesystem::path& path, std::span<const Label> labels) {
    auto out = open_output(path);
    for (Label y : labels) out << y << '\n';
}

}  // namespace adrem::io
