#include "adrem/toy.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace adrem::toy {
namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

struct Points {
    std::vector<double> xy;
    std::vector<Label> labels;

    void add(double x, double y, Label label) {
        xy.push_back(x);
        xy.push_back(y);
        labels.push_back(label);
    }
    FeatureMatrix matrix() const { return FeatureMatrix::dense(labels.size(), 2, xy); }
};

// Class c occupies an arc centred at c * 180 degrees plus `offset`.
Points arc_domain(const ArcsSpec& spec, double offset_degrees, Rng& rng) {
    std::normal_distribution<double> radius(spec.radius, spec.radial_noise_std);
    const double step = spec.n_per_class > 1 ? spec.arc_degrees / static_cast<double>(spec.n_per_class - 1) : 0.0;
    const double start = spec.n_per_class > 1 ? -spec.arc_degrees / 2.0 : 0.0;
    Points p;
    for (Label c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < spec.n_per_class; ++i) {
            const double a = (start + step * static_cast<double>(i) + 180.0 * c + offset_degrees) * kDegree;
            const double r = radius(rng);
            p.add(r * std::cos(a), r * std::sin(a), c);
        }
    }
    return p;
}

}  // namespace

double arcs_gap_degrees(const ArcsSpec& spec) { return 180.0 - spec.arc_degrees - spec.rotation_degrees; }

ToyData generate_arcs(const ArcsSpec& spec) {
    if (spec.n_per_class == 0) throw std::invalid_argument("arcs: need at least one point per class");
    if (spec.arc_degrees <= 0.0 || arcs_gap_degrees(spec) < 0.0) {
        throw std::invalid_argument("arcs: arc and rotation leave no gap between classes");
    }
    Rng rng(spec.seed);
    const Points source = arc_domain(spec, 0.0, rng);
    const Points target = arc_domain(spec, spec.rotation_degrees, rng);
    return ToyData{LabeledDataset(source.matrix(), source.labels, 2), UnlabeledDataset(target.matrix()),
                   target.labels};
}

ToyData generate_clusters(const ClustersSpec& spec) {
    if (spec.n_source_per_class == 0 || spec.n_target_per_class == 0) {
        throw std::invalid_argument("clusters: need at least one point per class and domain");
    }
    Rng rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    Points source, target;
    for (Label c = 0; c < 2; ++c) {
        const double cx = c == 0 ? -spec.source_x : spec.source_x;
        for (std::size_t i = 0; i < spec.n_source_per_class; ++i) {
            const double x = cx + noise(rng);
            source.add(x, spec.source_y + noise(rng), c);
        }
    }
    for (Label c = 0; c < 2; ++c) {
        const double cx = c == 0 ? spec.target_x0 : spec.target_x1;
        for (std::size_t i = 0; i < spec.n_target_per_class; ++i) {
            const double x = cx + noise(rng);
            target.add(x, spec.target_y + noise(rng), c);
        }
    }
    return ToyData{LabeledDataset(source.matrix(), source.labels, 2), UnlabeledDataset(target.matrix()),
                   target.labels};
}

ToyKind parse_toy_kind(std::string_view name) {
    if (name == "arcs") return ToyKind::arcs;
    if (name == "clusters") return ToyKind::clusters;
    throw std::invalid_argument("unknown toy '" + std::string(name) + "' (expected arcs or clusters)");
}

AdremConfig default_config(ToyKind kind) {
    AdremConfig cfg;
    if (kind == ToyKind::arcs) {
        cfg.C = 0.01;
    } else {
        cfg.C = 0.08;
        cfg.ensemble_size = 1;
    }
    return cfg;
}

ToyRun run_toy(const ToyData& data, AdremConfig cfg) {
    cfg.record_trace = true;
    EnsembleResult ens = ensemble_adrem(data.source, data.target, cfg, data.target_labels);
    ToyRun run;
    run.labels = std::move(ens.labels);
    for (auto& member : ens.members) run.member_traces.push_back(std::move(member.trace));
    run.trace = run.member_traces.front();
    run.final_accuracy = accuracy(run.labels, data.target_labels);
    return run;
}

}  // namespace adrem::toy
