#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "adrem/adaptation.hpp"
#include "adrem/dataset.hpp"

namespace adrem::toy {

// Two classes on opposite 80 degree arcs around the origin, angles evenly
// spaced and radii Gaussian. The target is the same construction rotated,
// leaving a gap to the other source class.
struct ArcsSpec {
    std::size_t n_per_class = 100;  // per class and per domain
    double radius = 3.5;
    double radial_noise_std = 0.3;
    double arc_degrees = 80.0;
    double rotation_degrees = 80.0;
    std::uint64_t seed = kDefaultSeed;
};

// Two Gaussian blobs per domain: source classes side by side below the
// origin, target classes closer together above it.
struct ClustersSpec {
    std::size_t n_source_per_class = 25;
    std::size_t n_target_per_class = 50;
    double source_x = 3.0;
    double source_y = -2.0;
    double target_x0 = -0.6;  // class 0
    double target_x1 = 1.6;   // class 1
    double target_y = 4.0;
    double noise_std = 0.35;
    std::uint64_t seed = kDefaultSeed;
};

struct ToyData {
    LabeledDataset source;
    UnlabeledDataset target;
    std::vector<Label> target_labels;
};

// Angular gap between the rotated target arc of one class and the source arc
// of the other class.
double arcs_gap_degrees(const ArcsSpec& spec);

ToyData generate_arcs(const ArcsSpec& spec);
ToyData generate_clusters(const ClustersSpec& spec);

enum class ToyKind { arcs, clusters };

ToyKind parse_toy_kind(std::string_view name);

// AdREM settings used for each toy unless overridden: arcs C = 0.01 with
// the usual 11-member ensemble; clusters C = 0.08 and a single run, so the
// vote and the loss trace describe the same model.
AdremConfig default_config(ToyKind kind);

struct ToyRun {
    std::vector<Label> labels;                 // ensemble vote
    std::vector<IterationTrace> trace;         // member 0
    std::vector<std::vector<IterationTrace>> member_traces;
    double final_accuracy = 0.0;
};

// Runs ensemble AdREM with traces recorded against the known target labels.
ToyRun run_toy(const ToyData& data, AdremConfig cfg);

}  // namespace adrem::toy
