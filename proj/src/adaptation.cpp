#include "adrem/adaptation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace adrem {

void AdremConfig::validate() const {
    if (!(C > 0.0)) throw std::invalid_argument("AdREM: C must be positive");
    if (iterations < 1) throw std::invalid_argument("AdREM: iteration count must be at least 1");
    if (ensemble_size < 1) throw std::invalid_argument("AdREM: ensemble size must be at least 1");
    if (n_classes < 0) throw std::invalid_argument("AdREM: n_classes must be non-negative");
}

SolverConfig AdremConfig::solver_config() const {
    SolverConfig s;
    s.C = C;
    s.lambda = lambda_from_C(C);
    s.tolerance = tolerance;
    s.max_passes = max_passes;
    return s;
}

std::size_t sample_size(int k, int iterations, std::size_t target_size) {
    if (iterations < 1) throw std::invalid_argument("sample_size: iterations must be positive");
    const double raw = std::round(static_cast<double>(k) / static_cast<double>(iterations) *
                                  static_cast<double>(target_size));
    if (raw <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(raw), target_size);
}

std::vector<std::size_t> uniform_subsample(std::size_t size, std::size_t n, Rng& rng) {
    if (n > size) throw std::invalid_argument("uniform_subsample: sample larger than population");
    std::vector<std::size_t> pool(size);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, size - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(n);
    return pool;
}

Subsample balanced_subsample(std::span<const Label> pseudo_labels, std::size_t n, int n_classes, Rng& rng) {
    if (n_classes < 2) throw std::invalid_argument("balanced_subsample: need at least two classes");
    if (n > pseudo_labels.size()) {
        throw std::invalid_argument("balanced_subsample: sample size " + std::to_string(n) + " exceeds " +
                                    std::to_string(pseudo_labels.size()) + " labels");
    }
    Subsample out;
    if (n == 0) return out;

    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < pseudo_labels.size(); ++i) {
        const Label y = pseudo_labels[i];
        if (y < 0 || y >= n_classes) throw std::invalid_argument("balanced_subsample: label out of range");
        members[static_cast<std::size_t>(y)].push_back(i);
    }
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < members.size(); ++c)
        if (!members[c].empty()) present.push_back(c);
    out.degenerate = present.size() == 1;

    std::vector<std::size_t> quota(members.size(), 0);
    const std::size_t base = n / present.size();
    std::size_t remainder = n % present.size();
    for (std::size_t c : present) quota[c] = base;
    std::vector<std::size_t> order = present;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });
    for (std::size_t r = 0; r < remainder; ++r) ++quota[order[r]];

    out.indices.reserve(n);
    for (std::size_t c : present) {
        auto& pool = members[c];
        const std::size_t q = quota[c];
        const std::size_t without = std::min(q, pool.size());
        for (std::size_t i = 0; i < without; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            out.indices.push_back(pool[i]);
        }
        std::uniform_int_distribution<std::size_t> any(0, pool.size() - 1);
        for (std::size_t i = without; i < q; ++i) out.indices.push_back(pool[any(rng)]);
    }
    return out;
}

namespace {

IterationTrace make_trace(int k, std::size_t n_k, const LinearModel& model, const LabeledDataset& source,
                          const UnlabeledDataset& target, std::span<const Label> labels, const AdremConfig& cfg,
                          int n_classes, std::span<const Label> truth) {
    IterationTrace t;
    t.k = k;
    t.sample_size = n_k;
    t.svm_loss = svm_da_loss(model, source, target.features(), labels, cfg.C);
    t.balanced_loss = balanced_da_loss(model, source, target.features(), labels, cfg.C, n_classes);
    if (!truth.empty()) t.accuracy = accuracy(labels, truth);
    return t;
}

}  // namespace

SingleRunResult single_adrem(const LabeledDataset& source, const UnlabeledDataset& target, const AdremConfig& cfg,
                             Rng& rng, std::span<const Label> true_target_labels) {
    cfg.validate();
    if (source.rows() == 0) throw std::invalid_argument("AdREM: source dataset is empty");
    if (target.rows() == 0) throw std::invalid_argument("AdREM: target dataset is empty");
    if (source.cols() != target.cols()) {
        throw std::invalid_argument("AdREM: source has " + std::to_string(source.cols()) + " features, target has " +
                                    std::to_string(target.cols()));
    }
    if (cfg.n_classes != 0 && cfg.n_classes != source.n_classes()) {
        throw std::invalid_argument("AdREM: configured for " + std::to_string(cfg.n_classes) +
                                    " classes, source has " + std::to_string(source.n_classes()));
    }
    if (!true_target_labels.empty() && true_target_labels.size() != target.rows()) {
        throw std::invalid_argument("AdREM: true target label count does not match target rows");
    }
    const int n_classes = source.n_classes();
    const SolverConfig solver = cfg.solver_config();

    SingleRunResult result;
    LinearModel model = train(cfg.learner, source, solver);
    result.degenerate = model.info.degenerate;
    std::vector<Label> labels = predict(model, target.features());
    if (cfg.record_trace) {
        result.trace.push_back(make_trace(0, 0, model, source, target, labels, cfg, n_classes, true_target_labels));
    }

    const std::size_t target_size = target.rows();
    for (int k = 1; k <= cfg.iterations; ++k) {
        const std::size_t n_k = sample_size(k, cfg.iterations, target_size);
        std::vector<std::size_t> picked;
        if (cfg.balance) {
            Subsample s = balanced_subsample(labels, n_k, n_classes, rng);
            result.degenerate = result.degenerate || s.degenerate;
            picked = std::move(s.indices);
        } else {
            picked = uniform_subsample(target_size, n_k, rng);
        }
        std::vector<Label> picked_labels;
        picked_labels.reserve(picked.size());
        for (std::size_t i : picked) picked_labels.push_back(labels[i]);
        const LabeledDataset batch(target.features().select_rows(picked), std::move(picked_labels), n_classes);

        model = train(cfg.learner, concat(source, batch), solver);
        result.degenerate = result.degenerate || model.info.degenerate;
        labels = predict(model, target.features());
        if (cfg.record_trace) {
            result.trace.push_back(make_trace(k, n_k, model, source, target, labels, cfg, n_classes, true_target_labels));
        }
    }
    result.labels = std::move(labels);
    return result;
}

EnsembleResult ensemble_adrem(const LabeledDataset& source, const UnlabeledDataset& target, const AdremConfig& cfg,
                              std::span<const Label> true_target_labels) {
    cfg.validate();
    const std::size_t m = static_cast<std::size_t>(cfg.ensemble_size);
    EnsembleResult out;
    out.members.resize(m);

    auto run_member = [&](std::size_t j) {
        Rng rng(member_seed(cfg.base_seed, j));
        out.members[j] = single_adrem(source, target, cfg, rng, true_target_labels);
    };

    const std::size_t workers = std::min<std::size_t>(std::max(1u, cfg.threads), m);
    if (workers <= 1) {
        for (std::size_t j = 0; j < m; ++j) run_member(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t j = next++; j < m; j = next++) {
                    try {
                        run_member(j);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    out.member_labels.reserve(m);
    for (const auto& member : out.members) out.member_labels.push_back(member.labels);
    out.labels = majority_vote(out.member_labels);
    return out;
}

std::vector<Label> majority_vote(const std::vector<std::vector<Label>>& votes) {
    if (votes.empty()) throw std::invalid_argument("majority_vote: no voters");
    const std::size_t n = votes.front().size();
    Label max_label = 0;
    for (const auto& row : votes) {
        if (row.size() != n) throw std::invalid_argument("majority_vote: voters disagree on length");
        for (Label y : row) {
            if (y < 0) throw std::invalid_argument("majority_vote: negative label");
            max_label = std::max(max_label, y);
        }
    }
    std::vector<Label> out(n, 0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (const auto& row : votes) ++counts[static_cast<std::size_t>(row[i])];
        out[i] = static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    return out;
}

}  // namespace adrem
