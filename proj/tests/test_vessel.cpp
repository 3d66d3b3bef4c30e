#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/geometry.hpp"
#include "retina/vessel_graph.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace retina;

namespace {

VesselGraph frame_graph() {
    VesselGraph g;
    g.disc = {{500.0, 500.0}, 100.0};
    g.image_width = 1000;
    g.image_height = 1000;
    return g;
}

Segment straight(const std::string& id, Point2 a, Point2 b, double width,
                 VesselKind kind = VesselKind::arteriole) {
    Segment s;
    s.id = id;
    s.kind = kind;
    s.points = {a, b};
    s.widths = {width, width};
    return s;
}

double radius_dd(const VesselGraph& g, const Point2& p) {
    const double dx = p.x - g.disc.center.x;
    const double dy = p.y - g.disc.center.y;
    return std::sqrt(dx * dx + dy * dy) / g.disc.diameter;
}

} // namespace

TEST_CASE("polyline_length hand cases") {
    CHECK(polyline_length({{0.0, 0.0}, {3.0, 4.0}}) == 5.0);
    CHECK(polyline_length({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}) == 2.0);
    // open polyline over the unit square corners: three sides
    CHECK(polyline_length({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}) == 3.0);
}

TEST_CASE("validate accepts a well-formed graph") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {560.0, 500.0}, {700.0, 500.0}, 10.0));
    CHECK(validate(g).empty());
}

TEST_CASE("validate names an unresolved junction daughter") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {560.0, 500.0}, {700.0, 500.0}, 10.0));
    g.segments.push_back(straight("a1", {700.0, 500.0}, {760.0, 540.0}, 8.0));
    Junction j;
    j.location = {700.0, 500.0};
    j.trunk = "a0";
    j.daughters[0] = "a1";
    j.daughters[1] = "missing-id";
    g.junctions.push_back(j);
    const auto violations = validate(g);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].reason.find("missing-id") != std::string::npos);
}

TEST_CASE("validate flags a width list shorter than the points") {
    VesselGraph g = frame_graph();
    Segment s = straight("a0", {560.0, 500.0}, {700.0, 500.0}, 10.0);
    s.widths.pop_back();
    g.segments.push_back(s);
    const auto violations = validate(g);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].where == "a0");
}

TEST_CASE("zone clip splits a radial segment exactly at the zone circles") {
    VesselGraph g = frame_graph();
    // radial ray from the disc center out to 3 disc-diameters
    g.segments.push_back(straight("a0", {500.0, 500.0}, {800.0, 500.0}, 10.0));
    const VesselGraph clipped = zone_clip(g, ZoneSpec::zone_b());
    REQUIRE(clipped.segments.size() == 1);
    const Segment& part = clipped.segments[0];
    CHECK(base_segment_id(part.id) == "a0");
    REQUIRE(part.points.size() >= 2);
    CHECK(radius_dd(g, part.points.front()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(radius_dd(g, part.points.back()) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("zone clip keeps an inside graph unchanged, ids intact") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {610.0, 500.0}, {640.0, 500.0}, 10.0));
    const VesselGraph clipped = zone_clip(g, ZoneSpec::zone_b());
    REQUIRE(clipped.segments.size() == 1);
    CHECK(clipped.segments[0].id == "a0");
    CHECK(clipped.segments[0].points.size() == 2);
    CHECK(clipped.segments[0].points[0].x == 610.0);
    CHECK(clipped.segments[0].points[1].x == 640.0);
}

TEST_CASE("zone clip drops outside segments and dangling junctions") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {700.0, 500.0}, {750.0, 500.0}, 10.0));
    g.segments.push_back(straight("a1", {750.0, 500.0}, {790.0, 520.0}, 8.0));
    g.segments.push_back(straight("a2", {750.0, 500.0}, {790.0, 480.0}, 8.0));
    Junction j;
    j.location = {750.0, 500.0};
    j.trunk = "a0";
    j.daughters[0] = "a1";
    j.daughters[1] = "a2";
    g.junctions.push_back(j);
    REQUIRE(validate(g).empty());
    const VesselGraph clipped = zone_clip(g, ZoneSpec::zone_b());
    CHECK(clipped.segments.empty());
    CHECK(clipped.junctions.empty());
}

TEST_CASE("zone clip interpolates widths linearly at the cut") {
    VesselGraph g = frame_graph();
    Segment s = straight("a0", {500.0, 500.0}, {700.0, 500.0}, 10.0);
    s.widths = {20.0, 10.0}; // tapers along x in [500, 700]
    g.segments.push_back(s);
    const VesselGraph clipped = zone_clip(g, ZoneSpec::zone_b());
    REQUIRE(clipped.segments.size() == 1);
    const Segment& part = clipped.segments[0];
    // cut points at x = 600 and x = 650 -> widths 15 and 12.5
    CHECK(part.widths.front() == doctest::Approx(15.0).epsilon(1e-9));
    CHECK(part.widths.back() == doctest::Approx(12.5).epsilon(1e-9));
}

TEST_CASE("graph json round trip preserves structure and restabilizes bytes") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {560.0, 500.0}, {700.0, 500.0}, 10.0));
    g.segments.push_back(straight("v0", {560.0, 440.0}, {710.0, 430.0}, 13.5, VesselKind::venule));
    g.segments[1].parent = std::nullopt;
    const std::string text = graph_to_json(g);
    const VesselGraph back = graph_from_json(text);
    REQUIRE(back.segments.size() == 2);
    CHECK(back.segments[0].id == "a0");
    CHECK(back.segments[1].kind == VesselKind::venule);
    CHECK(back.disc.diameter == 100.0);
    CHECK(back.segments[1].widths[0] == 13.5);
    // serialization is a fixpoint after one round trip
    CHECK(graph_to_json(back) == text);
}

TEST_CASE("graph json accepts a provenance envelope") {
    VesselGraph g = frame_graph();
    g.segments.push_back(straight("a0", {560.0, 500.0}, {700.0, 500.0}, 10.0));
    const std::string bare = graph_to_json(g);
    const std::string wrapped = "{\"provenance\":{\"tool\":\"x\"},\"graph\":" + bare + "}";
    const VesselGraph back = graph_from_json(wrapped);
    REQUIRE(back.segments.size() == 1);
    CHECK(back.segments[0].id == "a0");
}
