#include "adrem/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "adrem/io.hpp"

namespace adrem {

using nlohmann::json;

std::string_view to_string(FileFormat format) {
    switch (format) {
        case FileFormat::automatic: return "auto";
        case FileFormat::svmlight: return "svmlight";
        case FileFormat::csv: return "csv";
    }
    return "?";
}

FileFormat parse_file_format(std::string_view name) {
    if (name == "auto") return FileFormat::automatic;
    if (name == "svmlight" || name == "libsvm") return FileFormat::svmlight;
    if (name == "csv") return FileFormat::csv;
    throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected auto, svmlight or csv)");
}

void TaskSpec::validate() const {
    if (source_path.empty()) throw std::invalid_argument("task: source path is required");
    if (target_path.empty()) throw std::invalid_argument("task: target path is required");
    adrem.validate();
    if (select_C) cv.validate();
}

namespace {

json optional_path(const std::optional<std::filesystem::path>& p) {
    return p ? json(p->generic_string()) : json(nullptr);
}

json config_json(const TaskSpec& t) {
    json seeds;
    seeds["base"] = t.adrem.base_seed;
    seeds["cv"] = t.cv.seed;
    json members = json::array();
    for (int j = 0; j < t.adrem.ensemble_size; ++j)
        members.push_back(member_seed(t.adrem.base_seed, static_cast<std::size_t>(j)));
    seeds["members"] = members;

    json c;
    c["source"] = t.source_path.generic_string();
    c["target"] = t.target_path.generic_string();
    c["target_labels"] = optional_path(t.target_labels_path);
    c["format"] = to_string(t.format);
    c["label_column"] = t.label_column ? json(*t.label_column) : json(nullptr);
    c["recipe"] = to_string(t.recipe);
    c["fit_population"] = to_string(t.fit_population);
    c["learner"] = to_string(t.adrem.learner);
    c["C"] = t.adrem.C;
    c["select_C"] = t.select_C;
    c["iterations"] = t.adrem.iterations;
    c["ensemble_size"] = t.adrem.ensemble_size;
    c["balance"] = t.adrem.balance;
    c["tolerance"] = t.adrem.tolerance;
    c["max_passes"] = t.adrem.max_passes;
    c["cv"] = {{"folds", t.cv.n_folds}, {"grid", t.cv.grid}, {"stratified", t.cv.stratified}};
    c["seeds"] = seeds;
    c["include_traces"] = t.include_traces;
    c["include_timings"] = t.include_timings;
    return c;
}

std::optional<std::filesystem::path> read_optional_path(const json& j) {
    if (j.is_null()) return std::nullopt;
    return std::filesystem::path(j.get<std::string>());
}

TaskSpec task_from_json(const json& c) {
    TaskSpec t;
    t.source_path = c.at("source").get<std::string>();
    t.target_path = c.at("target").get<std::string>();
    t.target_labels_path = read_optional_path(c.at("target_labels"));
    t.format = parse_file_format(c.at("format").get<std::string>());
    if (!c.at("label_column").is_null()) t.label_column = c.at("label_column").get<std::string>();
    t.recipe = parse_recipe(c.at("recipe").get<std::string>());
    t.fit_population = parse_fit_population(c.at("fit_population").get<std::string>());
    t.adrem.learner = parse_learner(c.at("learner").get<std::string>());
    t.adrem.C = c.at("C").get<double>();
    t.select_C = c.at("select_C").get<bool>();
    t.adrem.iterations = c.at("iterations").get<int>();
    t.adrem.ensemble_size = c.at("ensemble_size").get<int>();
    t.adrem.balance = c.at("balance").get<bool>();
    t.adrem.tolerance = c.at("tolerance").get<double>();
    t.adrem.max_passes = c.at("max_passes").get<std::size_t>();
    const json& cv = c.at("cv");
    t.cv.n_folds = cv.at("folds").get<std::size_t>();
    t.cv.grid = cv.at("grid").get<std::vector<double>>();
    t.cv.stratified = cv.at("stratified").get<bool>();
    t.cv.tolerance = t.adrem.tolerance;
    t.cv.max_passes = t.adrem.max_passes;
    t.adrem.base_seed = c.at("seeds").at("base").get<std::uint64_t>();
    t.cv.seed = c.at("seeds").at("cv").get<std::uint64_t>();
    t.include_traces = c.at("include_traces").get<bool>();
    t.include_timings = c.at("include_timings").get<bool>();
    return t;
}

json trace_json(const std::vector<IterationTrace>& trace) {
    json rows = json::array();
    for (const auto& t : trace) {
        rows.push_back({{"it", t.k},
                        {"n", t.sample_size},
                        {"loss", t.svm_loss},
                        {"lossbal", t.balanced_loss},
                        {"accuracy", t.accuracy ? json(*t.accuracy) : json(nullptr)}});
    }
    return rows;
}

std::vector<IterationTrace> trace_from_json(const json& rows) {
    std::vector<IterationTrace> out;
    for (const auto& r : rows) {
        IterationTrace t;
        t.k = r.at("it").get<int>();
        t.sample_size = r.at("n").get<std::size_t>();
        t.svm_loss = r.at("loss").get<double>();
        t.balanced_loss = r.at("lossbal").get<double>();
        if (!r.at("accuracy").is_null()) t.accuracy = r.at("accuracy").get<double>();
        out.push_back(t);
    }
    return out;
}

json report_json(const RunReport& r) {
    json j;
    j["format"] = "adrem-report/1";
    j["config"] = config_json(r.task);
    j["n_source"] = r.n_source;
    j["n_target"] = r.n_target;
    j["n_features"] = r.n_features;
    j["n_classes"] = r.n_classes;
    j["label_names"] = r.label_names;
    j["selected_C"] = r.selected_C;
    if (r.cv) {
        j["cv"] = {{"grid", r.cv->grid}, {"mean_accuracy", r.cv->mean_accuracy}, {"small_class", r.cv->small_class}};
    } else {
        j["cv"] = nullptr;
    }
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    j["predictions"] = r.predictions;
    json traces = json::array();
    for (const auto& t : r.member_traces) traces.push_back(trace_json(t));
    j["member_traces"] = traces;
    j["warnings"] = r.warnings;
    return j;
}

constexpr std::string_view kFenceOpen = "```json\n";
constexpr std::string_view kFenceClose = "\n```";

}  // namespace

std::string machine_block(const RunReport& report) { return report_json(report).dump(2); }

std::string render_report(const RunReport& r) {
    std::ostringstream out;
    const TaskSpec& t = r.task;
    out << "AdREM run report\n\n";
    out << "source:    " << t.source_path.generic_string() << " (" << r.n_source << " rows, " << r.n_features
        << " features, " << r.n_classes << " classes)\n";
    out << "target:    " << t.target_path.generic_string() << " (" << r.n_target << " rows)\n";
    out << "recipe:    " << to_string(t.recipe);
    if (t.recipe != Recipe::none) out << " (" << to_string(t.fit_population) << " statistics)";
    out << '\n';
    out << "learner:   " << to_string(t.adrem.learner) << '\n';
    out << "ensemble:  m=" << t.adrem.ensemble_size << ", M=" << t.adrem.iterations
        << ", balance=" << (t.adrem.balance ? "on" : "off") << ", seed=" << t.adrem.base_seed << '\n';
    if (r.cv) {
        out << "C:         " << io::format_double(r.selected_C) << " (" << t.cv.n_folds << "-fold "
            << (t.cv.stratified ? "stratified " : "") << "CV on source, seed=" << t.cv.seed << ")\n";
        for (std::size_t g = 0; g < r.cv->grid.size(); ++g) {
            out << "  C=" << io::format_double(r.cv->grid[g]) << "  mean_acc=" << io::format_double(r.cv->mean_accuracy[g])
                << (r.cv->grid[g] == r.selected_C ? "  *" : "") << '\n';
        }
    } else {
        out << "C:         " << io::format_double(r.selected_C) << " (fixed)\n";
    }
    if (!r.label_names.empty()) {
        out << "labels:   ";
        for (std::size_t c = 0; c < r.label_names.size(); ++c) out << ' ' << c << '=' << r.label_names[c];
        out << '\n';
    }
    if (r.accuracy) {
        const auto correct = static_cast<long long>(std::llround(*r.accuracy * static_cast<double>(r.n_target)));
        out << "accuracy:  " << io::format_double(*r.accuracy) << " (" << correct << '/' << r.n_target << ")\n";
    } else {
        out << "accuracy:  n/a (no target labels)\n";
    }
    for (const auto& w : r.warnings) out << "warning:   " << w << '\n';
    if (!r.timings.empty()) {
        out << "timings:\n";
        for (const auto& s : r.timings) out << "  " << s.stage << ": " << io::format_double(s.seconds) << " s\n";
    }
    out << '\n' << kFenceOpen << machine_block(r) << kFenceClose << '\n';
    return out.str();
}

RunReport parse_report(std::string_view text) {
    const auto open = text.find(kFenceOpen);
    if (open == std::string_view::npos) throw std::invalid_argument("report: no machine block");
    const auto body_start = open + kFenceOpen.size();
    const auto close = text.find(kFenceClose, body_start);
    if (close == std::string_view::npos) throw std::invalid_argument("report: unterminated machine block");

    json j;
    try {
        j = json::parse(text.substr(body_start, close - body_start));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report: bad machine block: ") + e.what());
    }

    RunReport r;
    try {
        if (j.at("format") != "adrem-report/1") throw std::invalid_argument("report: unknown format");
        r.task = task_from_json(j.at("config"));
        r.n_source = j.at("n_source").get<std::size_t>();
        r.n_target = j.at("n_target").get<std::size_t>();
        r.n_features = j.at("n_features").get<std::size_t>();
        r.n_classes = j.at("n_classes").get<int>();
        r.label_names = j.at("label_names").get<std::vector<std::string>>();
        r.selected_C = j.at("selected_C").get<double>();
        if (!j.at("cv").is_null()) {
            CvResult cv;
            cv.C = r.selected_C;
            cv.grid = j["cv"].at("grid").get<std::vector<double>>();
            cv.mean_accuracy = j["cv"].at("mean_accuracy").get<std::vector<double>>();
            cv.small_class = j["cv"].at("small_class").get<bool>();
            r.cv = cv;
        }
        if (j.contains("accuracy")) r.accuracy = j["accuracy"].get<double>();
        r.predictions = j.at("predictions").get<std::vector<Label>>();
        for (const auto& t : j.at("member_traces")) r.member_traces.push_back(trace_from_json(t));
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report: ") + e.what());
    }

    // Timings live only in the human section.
    const std::string_view human = text.substr(0, open);
    const auto header = human.find("\ntimings:\n");
    if (header != std::string_view::npos) {
        std::istringstream lines{std::string(human.substr(header + 10))};
        std::string line;
        while (std::getline(lines, line) && line.rfind("  ", 0) == 0) {
            const auto colon = line.find(": ");
            const auto unit = line.rfind(" s");
            if (colon == std::string::npos || unit == std::string::npos || unit < colon) break;
            StageTiming s;
            s.stage = line.substr(2, colon - 2);
            const std::string value = line.substr(colon + 2, unit - colon - 2);
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s.seconds);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw std::invalid_argument("report: bad timing line '" + line + "'");
            r.timings.push_back(s);
        }
    }
    return r;
}

TaskSpec task_from_report(std::string_view text) { return parse_report(text).task; }

}  // namespace adrem
