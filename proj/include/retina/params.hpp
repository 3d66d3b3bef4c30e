#pragma once

#include "retina/feature_names.hpp"
#include "retina/geometry.hpp"
#include "retina/raster.hpp"
#include "retina/vessel_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace retina {

// Knudtson revised big-six summary constants.
struct EquivalentConstants {
    double arteriole_k = 0.88;
    double venule_k = 0.95;
    int big_n = 6;
};

// Central equivalent caliber of a set of trunk widths: keep the big_n widest,
// then iteratively pair widest with narrowest, w = k * sqrt(w1^2 + w2^2),
// an odd leftover carrying to the next round, until one value remains.
double vessel_equivalent(std::vector<double> widths, VesselKind kind,
                         const EquivalentConstants& constants = {});

double arteriole_venule_ratio(double crae, double crve);

// Box-counting dimension: least-squares slope of log N(s) against log(1/s).
// Needs a non-empty raster and at least four box sizes.
double fractal_dimension(const Raster& img, const std::vector<int>& box_sizes);

struct Tortuosity {
    double simple = 0.0;    // arc / chord - 1
    double curvature = 0.0; // (1/L) * integral of squared curvature ds
};

// Curvature is estimated on a uniform arc-length resampling of the centerline
// (kTortuosityStations intervals) with the three-point circumradius formula.
inline constexpr int kTortuosityStations = 200;
Tortuosity tortuosity(const std::vector<Point2>& points);

struct JunctionGeometry {
    double trunk_width = 0.0;
    double daughter1_width = 0.0; // wider daughter
    double daughter2_width = 0.0;
    double theta1_deg = 0.0; // deviation of wider daughter from trunk direction
    double theta2_deg = 0.0;
};

struct JunctionParams {
    double branching_coefficient = 0.0; // (d1^2 + d2^2) / d0^2
    double asymmetry_factor = 0.0;      // d2^2 / d1^2
    double branching_angle_deg = 0.0;   // theta1 + theta2
    double angular_asymmetry_deg = 0.0; // |theta1 - theta2|
    std::optional<double> junction_exponent; // x with d1^x + d2^x = d0^x
};

inline constexpr double kJunctionExponentLo = 0.5;
inline constexpr double kJunctionExponentHi = 20.0;
inline constexpr double kJunctionExponentResidual = 1e-10;

// Junction exponent is found by bisection on [0.5, 20]; when no root lies in
// that interval the exponent is left unset.
JunctionParams junction_params(const JunctionGeometry& g);

struct WidthStats {
    double mean = 0.0;
    double stddev = 0.0;               // population
    std::optional<double> length_diameter_ratio; // mean over segments of length / mean width
    std::size_t n_samples = 0;
};

struct ZoneCounts {
    int n_branches = 0;       // junctions in the zone
    int n_first_branches = 0; // junctions whose trunk is a generation-0 vessel
    int n_arterioles = 0;     // distinct generation-0 arterioles crossing the zone
    int n_venules = 0;
};

// Aggregate width statistics over the zone-clipped segments of one kind
// (or all segments when kind is unset).
WidthStats width_stats(const VesselGraph& graph, const ZoneSpec& zone,
                       std::optional<VesselKind> kind = std::nullopt);

ZoneCounts zone_counts(const VesselGraph& graph, const ZoneSpec& zone);

// Non-fatal conditions encountered while quantifying, e.g. junctions skipped
// because a daughter is annotated wider than its trunk.
struct QuantifyDiagnostic {
    std::string where;
    std::string reason;
};

struct QuantifyResult {
    FeatureVector features;
    std::vector<QuantifyDiagnostic> diagnostics;
};

inline constexpr int kFractalCanvas = 1024;

// Full per-image parameter sweep over the given zones. Missing measurements
// (an empty zone, no junction admitting an exponent, ...) are absent from the
// result rather than zero-filled.
QuantifyResult quantify(const VesselGraph& graph,
                        const std::vector<ZoneSpec>& zones = default_zones());

} // namespace retina
