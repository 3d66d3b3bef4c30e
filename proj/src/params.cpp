#include "retina/params.hpp"

#include "retina/error.hpp"
#include "retina/num.hpp"
#include "retina/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace retina {

namespace {

constexpr double kPi = 3.14159265358979323846;

} // namespace

double vessel_equivalent(std::vector<double> widths, VesselKind kind,
                         const EquivalentConstants& constants) {
    require_input(!widths.empty(), "vessel_equivalent: need at least one width");
    for (double w : widths)
        require_input(std::isfinite(w) && w > 0.0, "vessel_equivalent: widths must be positive");
    require_input(constants.big_n >= 1, "vessel_equivalent: big_n must be >= 1");

    const double k = kind == VesselKind::arteriole ? constants.arteriole_k : constants.venule_k;
    std::sort(widths.begin(), widths.end(), std::greater<>());
    if (widths.size() > static_cast<std::size_t>(constants.big_n))
        widths.resize(static_cast<std::size_t>(constants.big_n));

    while (widths.size() > 1) {
        std::sort(widths.begin(), widths.end(), std::greater<>());
        std::vector<double> next;
        std::size_t i = 0;
        std::size_t j = widths.size() - 1;
        while (i < j) {
            next.push_back(k * std::sqrt(widths[i] * widths[i] + widths[j] * widths[j]));
            ++i;
            --j;
        }
        if (i == j) next.push_back(widths[i]); // odd leftover carries
        widths = std::move(next);
    }
    return widths.front();
}

double arteriole_venule_ratio(double crae, double crve) {
    require_input(std::isfinite(crae) && crae > 0.0, "avr: CRAE must be positive");
    require_input(std::isfinite(crve) && crve > 0.0, "avr: CRVE must be positive");
    return crae / crve;
}

double fractal_dimension(const Raster& img, const std::vector<int>& box_sizes) {
    require_input(!img.empty_foreground(), "fractal_dimension: raster has no foreground");
    require_input(box_sizes.size() >= 4, "fractal_dimension: need at least four box sizes");
    for (std::size_t i = 0; i < box_sizes.size(); ++i) {
        require_input(box_sizes[i] >= 1, "fractal_dimension: box sizes must be >= 1");
        if (i > 0)
            require_input(box_sizes[i] > box_sizes[i - 1],
                          "fractal_dimension: box sizes must be strictly increasing");
    }

    std::vector<double> xs, ys;
    xs.reserve(box_sizes.size());
    ys.reserve(box_sizes.size());
    for (int s : box_sizes) {
        const std::size_t n = box_count(img, s);
        xs.push_back(-std::log(static_cast<double>(s)));
        ys.push_back(std::log(static_cast<double>(n)));
    }
    const double xbar = mean_of(xs);
    const double ybar = mean_of(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
    }
    require_internal(sxx > 0.0, "fractal_dimension: degenerate box-size ladder");
    return sxy / sxx;
}

Tortuosity tortuosity(const std::vector<Point2>& points) {
    require_input(points.size() >= 3, "tortuosity: need at least three points");
    const double arc = polyline_length(points);
    const double chord = dist(points.front(), points.back());
    require_input(chord > 0.0, "tortuosity: chord length is zero");

    Tortuosity t;
    t.simple = arc / chord - 1.0;

    const auto st = resample_uniform(points, kTortuosityStations);
    std::vector<double> kappa(st.size(), 0.0);
    for (std::size_t i = 1; i + 1 < st.size(); ++i)
        kappa[i] = three_point_curvature(st[i - 1], st[i], st[i + 1]);
    kappa.front() = kappa[1];
    kappa.back() = kappa[kappa.size() - 2];

    const double ds = arc / kTortuosityStations;
    double integral = 0.5 * (kappa.front() * kappa.front() + kappa.back() * kappa.back());
    for (std::size_t i = 1; i + 1 < kappa.size(); ++i) integral += kappa[i] * kappa[i];
    integral *= ds;
    t.curvature = integral / arc;
    return t;
}

JunctionParams junction_params(const JunctionGeometry& g) {
    require_input(g.trunk_width > 0.0 && g.daughter1_width > 0.0 && g.daughter2_width > 0.0,
                  "junction_params: widths must be positive");
    require_input(g.daughter1_width >= g.daughter2_width,
                  "junction_params: daughter1 must be the wider daughter");

    const double d0 = g.trunk_width;
    const double d1 = g.daughter1_width;
    const double d2 = g.daughter2_width;

    JunctionParams p;
    p.branching_coefficient = (d1 * d1 + d2 * d2) / (d0 * d0);
    p.asymmetry_factor = (d2 * d2) / (d1 * d1);
    p.branching_angle_deg = g.theta1_deg + g.theta2_deg;
    p.angular_asymmetry_deg = std::abs(g.theta1_deg - g.theta2_deg);

    // d1^x + d2^x - d0^x is strictly decreasing in x when both daughters are
    // narrower than the trunk, so a sign change brackets a unique root.
    auto f = [&](double x) { return std::pow(d1, x) + std::pow(d2, x) - std::pow(d0, x); };
    double lo = kJunctionExponentLo;
    double hi = kJunctionExponentHi;
    double flo = f(lo);
    double fhi = f(hi);
    if (std::abs(flo) <= kJunctionExponentResidual) {
        p.junction_exponent = lo;
        return p;
    }
    if (std::abs(fhi) <= kJunctionExponentResidual) {
        p.junction_exponent = hi;
        return p;
    }
    if (flo * fhi > 0.0) return p; // no root inside the search interval

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= kJunctionExponentResidual) {
            p.junction_exponent = mid;
            return p;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return p; // residual target not reachable at this width scale
}

namespace {

bool kind_selected(VesselKind k, char suffix) {
    switch (suffix) {
    case 'a': return k == VesselKind::arteriole;
    case 'v': return k == VesselKind::venule;
    case 't': return true;
    default: return false;
    }
}

char suffix_for(std::optional<VesselKind> kind) {
    if (!kind) return 't';
    return *kind == VesselKind::arteriole ? 'a' : 'v';
}

WidthStats width_stats_clipped(const VesselGraph& clipped, char suffix) {
    WidthStats ws;
    std::vector<double> samples;
    std::vector<double> ldrs;
    for (const auto& s : clipped.segments) {
        if (!kind_selected(s.kind, suffix)) continue;
        if (s.widths.empty()) continue;
        samples.insert(samples.end(), s.widths.begin(), s.widths.end());
        const double mw = mean_of(s.widths);
        if (mw > 0.0) ldrs.push_back(polyline_length(s.points) / mw);
    }
    ws.n_samples = samples.size();
    if (!samples.empty()) {
        ws.mean = mean_of(samples);
        ws.stddev = stddev_of(samples);
    }
    if (!ldrs.empty()) ws.length_diameter_ratio = mean_of(ldrs);
    return ws;
}

ZoneCounts zone_counts_clipped(const VesselGraph& clipped) {
    ZoneCounts c;
    c.n_branches = static_cast<int>(clipped.junctions.size());
    for (const auto& j : clipped.junctions) {
        const Segment* trunk = clipped.find_segment(j.trunk);
        if (trunk && trunk->generation == 0) ++c.n_first_branches;
    }
    std::set<std::string> arterioles, venules;
    for (const auto& s : clipped.segments) {
        if (s.generation != 0) continue;
        (s.kind == VesselKind::arteriole ? arterioles : venules).insert(base_segment_id(s.id));
    }
    c.n_arterioles = static_cast<int>(arterioles.size());
    c.n_venules = static_cast<int>(venules.size());
    return c;
}

double direction_angle_deg(Point2 trunk_dir, Point2 daughter_dir) {
    const double nu = norm(trunk_dir);
    const double nv = norm(daughter_dir);
    require_internal(nu > 0.0 && nv > 0.0, "junction geometry: zero-length direction");
    double c = dot(trunk_dir, daughter_dir) / (nu * nv);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c) * 180.0 / kPi;
}

struct JunctionAgg {
    int n = 0;
    int n_first = 0;
    double bc = 0.0, af = 0.0, ba = 0.0, aa = 0.0;
    int n_geom = 0;
    double je = 0.0;
    int n_je = 0;
};

JunctionAgg aggregate_junctions(const VesselGraph& clipped, char suffix, const std::string& zone_label,
                                std::vector<QuantifyDiagnostic>& diags) {
    JunctionAgg agg;
    for (const auto& j : clipped.junctions) {
        const Segment* trunk = clipped.find_segment(j.trunk);
        const Segment* da = clipped.find_segment(j.daughters[0]);
        const Segment* db = clipped.find_segment(j.daughters[1]);
        require_internal(trunk && da && db, "clipped junction references a missing segment");
        if (!kind_selected(trunk->kind, suffix)) continue;
        ++agg.n;
        if (trunk->generation == 0) ++agg.n_first;

        if (trunk->widths.empty() || da->widths.empty() || db->widths.empty()) {
            if (suffix == 't')
                diags.push_back({"zone " + zone_label + " junction " + j.trunk,
                                 "skipped: missing width annotations"});
            continue;
        }

        JunctionGeometry geom;
        geom.trunk_width = trunk->widths.back();
        const auto& tp = trunk->points;
        const Point2 trunk_dir = tp[tp.size() - 1] - tp[tp.size() - 2];
        double w1 = da->widths.front();
        double w2 = db->widths.front();
        double th1 = direction_angle_deg(trunk_dir, da->points[1] - da->points[0]);
        double th2 = direction_angle_deg(trunk_dir, db->points[1] - db->points[0]);
        if (w2 > w1) {
            std::swap(w1, w2);
            std::swap(th1, th2);
        }
        geom.daughter1_width = w1;
        geom.daughter2_width = w2;
        geom.theta1_deg = th1;
        geom.theta2_deg = th2;

        if (w1 > geom.trunk_width) {
            if (suffix == 't')
                diags.push_back({"zone " + zone_label + " junction " + j.trunk,
                                 "skipped: daughter annotated wider than trunk"});
            continue;
        }

        const JunctionParams p = junction_params(geom);
        agg.bc += p.branching_coefficient;
        agg.af += p.asymmetry_factor;
        agg.ba += p.branching_angle_deg;
        agg.aa += p.angular_asymmetry_deg;
        ++agg.n_geom;
        if (p.junction_exponent) {
            agg.je += *p.junction_exponent;
            ++agg.n_je;
        } else if (suffix == 't') {
            diags.push_back({"zone " + zone_label + " junction " + j.trunk,
                             "no junction exponent in [0.5, 20]"});
        }
    }
    return agg;
}

std::optional<double> equivalent_of_zone(const VesselGraph& clipped, VesselKind kind) {
    std::map<std::string, std::vector<double>> trunk_widths;
    for (const auto& s : clipped.segments) {
        if (s.kind != kind || s.generation != 0 || s.widths.empty()) continue;
        auto& pool = trunk_widths[base_segment_id(s.id)];
        pool.insert(pool.end(), s.widths.begin(), s.widths.end());
    }
    std::vector<double> means;
    means.reserve(trunk_widths.size());
    for (const auto& [id, pool] : trunk_widths) means.push_back(mean_of(pool));
    if (means.empty()) return std::nullopt;
    return vessel_equivalent(means, kind);
}

struct ZoneOutput {
    FeatureVector fv;
    std::vector<QuantifyDiagnostic> diags;
};

ZoneOutput quantify_zone(const VesselGraph& graph, const ZoneSpec& zone) {
    ZoneOutput out;
    const std::string zl = to_string(zone.zone_id);
    const VesselGraph clipped = zone_clip(graph, zone);
    const ZoneId z = zone.zone_id;

    const auto crae = equivalent_of_zone(clipped, VesselKind::arteriole);
    const auto crve = equivalent_of_zone(clipped, VesselKind::venule);
    if (crae) out.fv.set(feature_name("CRAE", z), *crae);
    if (crve) out.fv.set(feature_name("CRVE", z), *crve);
    if (crae && crve) out.fv.set(feature_name("AVR", z), arteriole_venule_ratio(*crae, *crve));

    // The canvas frames the zone's outer circle around the disc center, so the
    // raster (and with it FD) is exactly invariant to translation and to
    // uniform rescaling of the whole graph.
    const double zone_extent = 2.0 * zone.outer_radius * graph.disc.diameter;
    const double canvas_scale = static_cast<double>(kFractalCanvas) / zone_extent;
    const Point2 canvas_origin = {graph.disc.center.x - zone_extent / 2.0,
                                  graph.disc.center.y - zone_extent / 2.0};

    for (char suffix : {'a', 'v', 't'}) {
        std::vector<const Segment*> segs;
        for (const auto& s : clipped.segments)
            if (kind_selected(s.kind, suffix)) segs.push_back(&s);

        if (!segs.empty()) {
            Raster img(kFractalCanvas, kFractalCanvas);
            for (const Segment* s : segs) draw_polyline(img, s->points, canvas_scale, canvas_origin);
            out.fv.set(feature_name("FD", z, suffix), fractal_dimension(img, default_box_sizes()));
        }

        const WidthStats ws = width_stats_clipped(clipped, suffix);
        if (ws.n_samples > 0) {
            out.fv.set(feature_name("MW", z, suffix), ws.mean);
            out.fv.set(feature_name("STDW", z, suffix), ws.stddev);
        }
        if (ws.length_diameter_ratio)
            out.fv.set(feature_name("LDR", z, suffix), *ws.length_diameter_ratio);

        double simple_sum = 0.0;
        double curvature_sum = 0.0;
        int n_tort = 0;
        for (const Segment* s : segs) {
            if (dist(s->points.front(), s->points.back()) <= 0.0) {
                if (suffix == 't')
                    out.diags.push_back(
                        {"zone " + zl + " segment " + s->id, "skipped: zero chord"});
                continue;
            }
            // Two-point parts are straight by construction.
            const Tortuosity t =
                s->points.size() < 3 ? Tortuosity{} : tortuosity(s->points);
            simple_sum += t.simple;
            curvature_sum += t.curvature;
            ++n_tort;
        }
        if (n_tort > 0) {
            out.fv.set(feature_name("TORT", z, suffix), simple_sum / n_tort);
            out.fv.set(feature_name("cTORT", z, suffix), curvature_sum / n_tort);
        }

        const JunctionAgg agg = aggregate_junctions(clipped, suffix, zl, out.diags);
        out.fv.set(feature_name("NB", z, suffix), static_cast<double>(agg.n));
        out.fv.set(feature_name("NFB", z, suffix), static_cast<double>(agg.n_first));
        if (agg.n_geom > 0) {
            out.fv.set(feature_name("BC", z, suffix), agg.bc / agg.n_geom);
            out.fv.set(feature_name("AF", z, suffix), agg.af / agg.n_geom);
            out.fv.set(feature_name("BA", z, suffix), agg.ba / agg.n_geom);
            out.fv.set(feature_name("AA", z, suffix), agg.aa / agg.n_geom);
        }
        if (agg.n_je > 0) out.fv.set(feature_name("JE", z, suffix), agg.je / agg.n_je);
    }

    const ZoneCounts counts = zone_counts_clipped(clipped);
    out.fv.set(feature_name("NA", z), static_cast<double>(counts.n_arterioles));
    out.fv.set(feature_name("NV", z), static_cast<double>(counts.n_venules));
    return out;
}

} // namespace

WidthStats width_stats(const VesselGraph& graph, const ZoneSpec& zone,
                       std::optional<VesselKind> kind) {
    require_valid(graph);
    return width_stats_clipped(zone_clip(graph, zone), suffix_for(kind));
}

ZoneCounts zone_counts(const VesselGraph& graph, const ZoneSpec& zone) {
    require_valid(graph);
    return zone_counts_clipped(zone_clip(graph, zone));
}

QuantifyResult quantify(const VesselGraph& graph, const std::vector<ZoneSpec>& zones) {
    require_valid(graph);
    require_input(!zones.empty(), "quantify: need at least one zone");
    std::set<ZoneId> seen;
    for (const auto& zone : zones) {
        require_input(zone.inner_radius >= 0.0 && zone.inner_radius < zone.outer_radius,
                      "quantify: zone radii must satisfy 0 <= inner < outer");
        require_input(seen.insert(zone.zone_id).second, "quantify: duplicate zone id");
    }

    std::vector<ZoneOutput> outs(zones.size());
    parallel_for(zones.size(), [&](std::size_t i) { outs[i] = quantify_zone(graph, zones[i]); });

    QuantifyResult result;
    for (auto& out : outs) {
        for (const auto& [name, value] : out.fv.values()) result.features.set(name, value);
        result.diagnostics.insert(result.diagnostics.end(), out.diags.begin(), out.diags.end());
    }
    return result;
}

} // namespace retina
