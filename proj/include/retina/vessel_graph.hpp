#pragma once

#include "retina/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace retina {

// Junction coincidence tolerance, pixels. Annotated endpoints are allowed to
// miss the junction location by sub-pixel noise up to this much.
inline constexpr double kJoinTolerance = 1.5;

enum class VesselKind { arteriole, venule };

const char* to_string(VesselKind k);
VesselKind vessel_kind_from_string(const std::string& s);

struct DiscSpec {
    Point2 center;
    double diameter = 0.0; // pixels, > 0
};

enum class ZoneId { A, B, C };

const char* to_string(ZoneId z);
ZoneId zone_id_from_string(const std::string& s);

// Annulus around the disc center. Radii are in optic-disc-diameter units
// measured from the disc center, so the disc margin sits at 0.5.
struct ZoneSpec {
    ZoneId zone_id = ZoneId::B;
    double inner_radius = 0.0;
    double outer_radius = 0.0;

    static ZoneSpec zone_a() { return {ZoneId::A, 0.5, 1.0}; }
    static ZoneSpec zone_b() { return {ZoneId::B, 1.0, 1.5}; }
    static ZoneSpec zone_c() { return {ZoneId::C, 1.0, 2.5}; }
    // whole measurement annulus from the disc margin outward
    static ZoneSpec full(double outer = 2.5) { return {ZoneId::C, 0.5, outer}; }
};

// Standard measurement zones, B then C.
std::vector<ZoneSpec> default_zones();

struct Segment {
    std::string id;
    VesselKind kind = VesselKind::arteriole;
    std::vector<Point2> points;       // >= 2, consecutive points distinct
    std::vector<double> widths;       // empty, or one positive sample per point
    std::optional<std::string> parent;
    int generation = 0;               // 0 = trunk emerging at the disc margin
};

struct Junction {
    Point2 location;
    std::string trunk;
    std::string daughters[2];
};

struct VesselGraph {
    DiscSpec disc;
    int image_width = 0;
    int image_height = 0;
    std::vector<Segment> segments;
    std::vector<Junction> junctions;

    const Segment* find_segment(const std::string& id) const;
};

struct Violation {
    std::string where;  // segment/junction id or "graph"
    std::string reason;
};

// Every invariant violation, with the offending id. Empty iff the graph is
// valid. Purely diagnostic, never throws.
std::vector<Violation> validate(const VesselGraph& graph);

// Throws InputError listing all violations when the graph is invalid.
void require_valid(const VesselGraph& graph);

// Restriction of the graph to the zone annulus. Segment portions crossing a
// boundary circle are split there, interpolating coordinates and widths
// linearly; split part ids are "<id>#<k>" in order along the polyline, and a
// segment fully inside keeps its id. Junctions survive when their location is
// inside the annulus and trunk/daughter parts still meet them; other
// junctions are dropped along with any dangling references.
VesselGraph zone_clip(const VesselGraph& graph, const ZoneSpec& zone);

// Original id of a (possibly split) part: strips the "#k" suffix.
std::string base_segment_id(const std::string& id);

// JSON document (fixed field order, numbers at <= 9 significant digits).
std::string graph_to_json(const VesselGraph& graph);
VesselGraph graph_from_json(const std::string& text);

void save_graph(const VesselGraph& graph, const std::string& path);
VesselGraph load_graph(const std::string& path);

} // namespace retina
