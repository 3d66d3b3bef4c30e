#pragma once

#include "retina/raster.hpp"
#include "retina/vessel_graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace retina {

// Parameters of a generated binary vessel tree. Daughter widths follow a
// power-law split: d1 = d0 * (1 + a^x)^(-1/x), d2 = a * d1, so the junction
// exponent recovers x exactly. The wider daughter deviates from the parent
// direction by 0.4 * branch_angle, the narrower by 0.6 * branch_angle.
struct TreeSpec {
    int n_arterioles = 2;
    int n_venules = 2;
    int depth = 3; // generations per tree, >= 1
    double trunk_width = 14.0;
    double murray_exponent = 3.0;
    double asymmetry = 1.0; // a = d2 / d1, in (0, 1]
    double branch_angle_deg = 60.0;
    double tortuosity_amplitude = 0.0; // perpendicular sinusoid, px
    std::uint64_t seed = 1;
};

struct GroundTruthEntry {
    double value = 0.0;
    bool exact = false; // true: construction-exact, float-level tolerance
    std::string note;
};

// Keyed by canonical feature name over the whole-tree annulus (zone C label).
using GroundTruth = std::map<std::string, GroundTruthEntry>;

struct SynthTree {
    VesselGraph graph;
    GroundTruth truth;
};

// The tree is sized to fit strictly inside the [0.5, 2.5) disc-diameter
// annulus, so clipping against ZoneSpec::full() keeps every segment whole and
// the ground truth describes the full tree.
SynthTree generate_tree(const TreeSpec& spec);

// Triadic Koch curve rasterized onto a square canvas; box-counting dimension
// approaches log(4)/log(3).
Raster koch_raster(int level, int size = 1024);

inline constexpr double kKochDimension = 1.2618595071429148; // log(4)/log(3)

// Solid square with a uniform background margin; dimension-2 fixture.
Raster filled_square_raster(int size = 1024, int margin = 64);

struct LabeledPoints {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

// Gaussian clusters with class centers spaced `separation` apart inside a
// random 2-D subspace of feature space; every feature carries unit noise, so
// separation = 0 leaves no class signal at all. Rows are shuffled
// deterministically by seed.
LabeledPoints make_separable_dataset(const std::vector<int>& class_counts, int n_features,
                                     double separation, std::uint64_t seed);
LabeledPoints make_separable_dataset(int n_per_class, int n_classes, int n_features,
                                     double separation, std::uint64_t seed);

} // namespace retina
