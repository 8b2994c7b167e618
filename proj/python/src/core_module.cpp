#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "adrem/adaptation.hpp"
#include "adrem/io.hpp"
#include "adrem/model_selection.hpp"
#include "adrem/toy.hpp"

namespace py = pybind11;
using namespace adrem;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;

FeatureMatrix from_dense(const DoubleArray& x) {
    if (x.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(x.shape(0));
    const auto cols = static_cast<std::size_t>(x.shape(1));
    return FeatureMatrix::dense(rows, cols, std::vector<double>(x.data(), x.data() + x.size()));
}

FeatureMatrix from_csr(const DoubleArray& data, const py::array_t<std::int64_t, py::array::forcecast>& indices,
                       const py::array_t<std::int64_t, py::array::forcecast>& indptr, std::size_t cols) {
    const auto ptr = indptr.unchecked<1>();
    const auto idx = indices.unchecked<1>();
    const auto val = data.unchecked<1>();
    if (ptr.shape(0) < 1) throw std::invalid_argument("indptr must have at least one entry");
    std::vector<SparseRow> rows(static_cast<std::size_t>(ptr.shape(0) - 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (auto k = ptr(i); k < ptr(i + 1); ++k) {
            if (idx(k) < 0) throw std::invalid_argument("negative column index");
            rows[i].emplace_back(static_cast<FeatureIndex>(idx(k)), val(k));
        }
    }
    return FeatureMatrix::sparse(cols, rows);
}

py::array_t<double> to_dense_array(const FeatureMatrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) v(i, j) = 0.0;
        m.row(i).for_each_nonzero([&](std::size_t j, double x) { v(i, j) = x; });
    }
    return out;
}

py::tuple to_csr_parts(const FeatureMatrix& m) {
    std::vector<double> data;
    std::vector<std::int64_t> indices, indptr{0};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        m.row(i).for_each_nonzero([&](std::size_t j, double x) {
            indices.push_back(static_cast<std::int64_t>(j));
            data.push_back(x);
        });
        indptr.push_back(static_cast<std::int64_t>(data.size()));
    }
    return py::make_tuple(py::array(py::cast(data)), py::array(py::cast(indices)), py::array(py::cast(indptr)),
                          py::make_tuple(m.rows(), m.cols()));
}

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<Label> to_labels(const LabelArray& y) {
    if (y.ndim() != 1) throw std::invalid_argument("labels must be 1-D");
    return std::vector<Label>(y.data(), y.data() + y.size());
}

int infer_classes(const std::vector<Label>& y, int requested) {
    if (requested > 0) return requested;
    Label top = 1;
    for (Label v : y) top = std::max(top, v);
    return top + 1;
}

py::list trace_rows(const std::vector<IterationTrace>& trace) {
    py::list out;
    for (const auto& t : trace) {
        py::dict row;
        row["it"] = t.k;
        row["sample_size"] = t.sample_size;
        row["loss"] = t.svm_loss;
        row["lossbal"] = t.balanced_loss;
        row["accuracy"] = t.accuracy ? py::cast(*t.accuracy) : py::none();
        out.append(row);
    }
    return out;
}

py::tuple toy_tuple(const toy::ToyData& d) {
    return py::make_tuple(to_dense_array(d.source.features()),
                          to_array(std::vector<Label>(d.source.labels().begin(), d.source.labels().end())),
                          to_dense_array(d.target.features()), to_array(d.target_labels));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "AdREM domain adaptation core (randomized hard EM with class-balanced subsampling).";

    py::class_<FeatureMatrix>(m, "Matrix")
        .def_static("from_dense", &from_dense, py::arg("x"))
        .def_static("from_csr", &from_csr, py::arg("data"), py::arg("indices"), py::arg("indptr"), py::arg("n_cols"))
        .def_property_readonly("shape", [](const FeatureMatrix& x) { return py::make_tuple(x.rows(), x.cols()); })
        .def_property_readonly("is_sparse", &FeatureMatrix::is_sparse)
        .def_property_readonly("nnz", &FeatureMatrix::nnz)
        .def("to_dense", &to_dense_array)
        .def("csr_parts", &to_csr_parts, "(data, indices, indptr, shape) in CSR layout");

    m.attr("DEFAULT_SEED") = kDefaultSeed;

    m.def(
        "adrem",
        [](const FeatureMatrix& xs, const LabelArray& ys, const FeatureMatrix& xt, double C, int iterations,
           int ensemble_size, const std::string& learner, bool balance, std::uint64_t seed, double tolerance,
           std::size_t max_passes, unsigned threads, int n_classes, std::optional<LabelArray> target_labels) {
            std::vector<Label> y = to_labels(ys);
            const int k = infer_classes(y, n_classes);
            const LabeledDataset source(xs, std::move(y), k);
            const UnlabeledDataset target(xt);
            AdremConfig cfg;
            cfg.C = C;
            cfg.iterations = iterations;
            cfg.ensemble_size = ensemble_size;
            cfg.learner = parse_learner(learner);
            cfg.balance = balance;
            cfg.base_seed = seed;
            cfg.tolerance = tolerance;
            cfg.max_passes = max_passes;
            cfg.threads = threads;
            cfg.record_trace = true;
            std::vector<Label> truth;
            if (target_labels) truth = to_labels(*target_labels);
            EnsembleResult r;
            {
                py::gil_scoped_release release;
                r = ensemble_adrem(source, target, cfg, truth);
            }
            py::dict out;
            out["labels"] = to_array(r.labels);
            py::list members, traces;
            for (std::size_t j = 0; j < r.members.size(); ++j) {
                members.append(to_array(r.member_labels[j]));
                traces.append(trace_rows(r.members[j].trace));
            }
            out["member_labels"] = members;
            out["traces"] = traces;
            return out;
        },
        py::arg("source_x"), py::arg("source_y"), py::arg("target_x"), py::kw_only(), py::arg("C") = 1.0,
        py::arg("iterations") = 20, py::arg("ensemble_size") = 11, py::arg("learner") = "svm",
        py::arg("balance") = true, py::arg("seed") = kDefaultSeed, py::arg("tolerance") = 1e-6,
        py::arg("max_passes") = 1000, py::arg("threads") = 1, py::arg("n_classes") = 0,
        py::arg("target_labels") = py::none(),
        "Ensemble AdREM. Returns labels, member_labels and per-member traces; target_labels only feed the traces.");

    m.def(
        "select_C",
        [](const FeatureMatrix& x, const LabelArray& ys, std::optional<std::vector<double>> grid, std::size_t folds,
           bool stratified, std::uint64_t seed, const std::string& learner, int n_classes) {
            std::vector<Label> y = to_labels(ys);
            const int k = infer_classes(y, n_classes);
            const LabeledDataset ds(x, std::move(y), k);
            CvPlan plan;
            plan.n_folds = folds;
            if (grid) plan.grid = *grid;
            plan.stratified = stratified;
            plan.seed = seed;
            CvResult r;
            {
                py::gil_scoped_release release;
                r = select_C(ds, plan, parse_learner(learner));
            }
            py::dict out;
            out["C"] = r.C;
            out["grid"] = r.grid;
            out["mean_accuracy"] = r.mean_accuracy;
            out["small_class"] = r.small_class;
            return out;
        },
        py::arg("x"), py::arg("y"), py::kw_only(), py::arg("grid") = py::none(), py::arg("folds") = 3,
        py::arg("stratified") = true, py::arg("seed") = kDefaultSeed, py::arg("learner") = "svm",
        py::arg("n_classes") = 0);

    m.def(
        "majority_vote",
        [](const py::array_t<Label, py::array::c_style | py::array::forcecast>& votes) {
            if (votes.ndim() != 2) throw std::invalid_argument("votes must be 2-D (members x points)");
            std::vector<std::vector<Label>> v(static_cast<std::size_t>(votes.shape(0)));
            const auto a = votes.unchecked<2>();
            for (std::size_t j = 0; j < v.size(); ++j)
                for (py::ssize_t i = 0; i < votes.shape(1); ++i) v[j].push_back(a(j, i));
            return to_array(majority_vote(v));
        },
        py::arg("votes"));

    m.def("sample_size", &sample_size, py::arg("k"), py::arg("iterations"), py::arg("target_size"));

    m.def(
        "make_arcs",
        [](std::uint64_t seed, double rotation_degrees) {
            toy::ArcsSpec spec;
            spec.seed = seed;
            spec.rotation_degrees = rotation_degrees;
            return toy_tuple(toy::generate_arcs(spec));
        },
        py::arg("seed") = kDefaultSeed, py::arg("rotation_degrees") = 80.0,
        "(source_x, source_y, target_x, target_y) for the rotated-arcs toy.");

    m.def(
        "make_clusters",
        [](std::uint64_t seed) {
            toy::ClustersSpec spec;
            spec.seed = seed;
            return toy_tuple(toy::generate_clusters(spec));
        },
        py::arg("seed") = kDefaultSeed, "(source_x, source_y, target_x, target_y) for the clusters toy.");

    m.def(
        "toy_defaults",
        [](const std::string& kind) {
            const AdremConfig cfg = toy::default_config(toy::parse_toy_kind(kind));
            py::dict out;
            out["C"] = cfg.C;
            out["iterations"] = cfg.iterations;
            out["ensemble_size"] = cfg.ensemble_size;
            return out;
        },
        py::arg("kind"));

    m.def(
        "read_svmlight",
        [](const std::string& path, std::size_t n_features, bool labeled) {
            io::SvmlightOptions opt;
            opt.n_features = n_features;
            opt.mode = labeled ? io::LabelMode::labeled : io::LabelMode::unlabeled;
            io::ParsedData d = io::read_svmlight(std::filesystem::path(path), opt);
            return py::make_tuple(d.features, to_array(d.labels));
        },
        py::arg("path"), py::arg("n_features") = 0, py::arg("labeled") = true);

    m.def(
        "write_svmlight",
        [](const std::string& path, const FeatureMatrix& x, std::optional<LabelArray> y) {
            std::vector<Label> labels;
            if (y) labels = to_labels(*y);
            io::write_svmlight(std::filesystem::path(path), x, labels);
        },
        py::arg("path"), py::arg("x"), py::arg("y") = py::none());

    py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
}
