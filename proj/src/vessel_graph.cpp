#include "retina/vessel_graph.hpp"

#include "retina/error.hpp"
#include "retina/num.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace retina {

using ordered_json = nlohmann::ordered_json;

const char* to_string(VesselKind k) {
    return k == VesselKind::arteriole ? "arteriole" : "venule";
}

VesselKind vessel_kind_from_string(const std::string& s) {
    if (s == "arteriole") return VesselKind::arteriole;
    if (s == "venule") return VesselKind::venule;
    throw InputError("unknown vessel kind '" + s + "'");
}

const char* to_string(ZoneId z) {
    switch (z) {
        case ZoneId::A: return "A";
        case ZoneId::B: return "B";
        default: return "C";
    }
}

ZoneId zone_id_from_string(const std::string& s) {
    if (s == "A") return ZoneId::A;
    if (s == "B") return ZoneId::B;
    if (s == "C") return ZoneId::C;
    throw InputError("unknown zone id '" + s + "'");
}

std::vector<ZoneSpec> default_zones() {
    return {ZoneSpec::zone_b(), ZoneSpec::zone_c()};
}

const Segment* VesselGraph::find_segment(const std::string& id) const {
    for (const auto& s : segments)
        if (s.id == id) return &s;
    return nullptr;
}

std::string base_segment_id(const std::string& id) {
    const auto pos = id.rfind('#');
    return pos == std::string::npos ? id : id.substr(0, pos);
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

std::vector<Violation> validate(const VesselGraph& g) {
    std::vector<Violation> out;
    auto bad = [&out](const std::string& where, const std::string& reason) {
        out.push_back({where, reason});
    };

    if (!(g.disc.diameter > 0.0)) bad("graph", "disc diameter must be > 0");
    if (!std::isfinite(g.disc.center.x) || !std::isfinite(g.disc.center.y))
        bad("graph", "disc center must be finite");
    if (g.image_width <= 0 || g.image_height <= 0) bad("graph", "image size must be positive");

    std::map<std::string, const Segment*> by_id;
    for (const auto& s : g.segments) {
        if (s.id.empty()) bad(s.id, "empty segment id");
        if (!by_id.emplace(s.id, &s).second) bad(s.id, "duplicate segment id");
    }

    for (const auto& s : g.segments) {
        if (s.points.size() < 2) {
            bad(s.id, "segment needs at least 2 points");
            continue;
        }
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                bad(s.id, "non-finite point coordinates");
                break;
            }
            if (p.x < 0.0 || p.y < 0.0 || p.x > g.image_width || p.y > g.image_height) {
                bad(s.id, "point outside image bounds");
                break;
            }
            if (i > 0 && s.points[i] == s.points[i - 1]) {
                bad(s.id, "consecutive points must be distinct");
                break;
            }
        }
        if (!s.widths.empty() && s.widths.size() != s.points.size())
            bad(s.id, "width list length must match point count");
        for (double w : s.widths) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                bad(s.id, "widths must be positive and finite");
                break;
            }
        }
        if (s.generation < 0) bad(s.id, "generation must be >= 0");
        if (s.parent) {
            auto it = by_id.find(*s.parent);
            if (it == by_id.end()) {
                bad(s.id, "parent id '" + *s.parent + "' does not resolve");
            } else if (s.generation != it->second->generation + 1) {
                bad(s.id, "generation must be parent generation + 1");
            }
        }
    }

    for (std::size_t j = 0; j < g.junctions.size(); ++j) {
        const auto& jn = g.junctions[j];
        const std::string where = "junction[" + std::to_string(j) + "]";
        const Segment* trunk = nullptr;
        auto it = by_id.find(jn.trunk);
        if (it == by_id.end())
            bad(where, "trunk id '" + jn.trunk + "' does not resolve");
        else
            trunk = it->second;
        if (jn.daughters[0] == jn.daughters[1])
            bad(where, "daughters must be two distinct segments");
        const Segment* dtr[2] = {nullptr, nullptr};
        for (int d = 0; d < 2; ++d) {
            auto dit = by_id.find(jn.daughters[d]);
            if (dit == by_id.end())
                bad(where, "daughter id '" + jn.daughters[d] + "' does not resolve");
            else
                dtr[d] = dit->second;
        }
        if (trunk && trunk->points.size() >= 2 &&
            dist(trunk->points.back(), jn.location) > kJoinTolerance)
            bad(where, "trunk endpoint does not meet junction location");
        for (int d = 0; d < 2; ++d) {
            if (dtr[d] && dtr[d]->points.size() >= 2 &&
                dist(dtr[d]->points.front(), jn.location) > kJoinTolerance)
                bad(where, "daughter start does not meet junction location");
        }
    }
    return out;
}

void require_valid(const VesselGraph& g) {
    const auto violations = validate(g);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid vessel graph (" << violations.size() << " violation"
        << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& v : violations) msg << "\n  [" << v.where << "] " << v.reason;
    throw InputError(msg.str());
}

// ---------------------------------------------------------------------------
// zone clipping
// ---------------------------------------------------------------------------

namespace {

struct EdgeInterval {
    double lo, hi;
};

// t-intervals of p(t) = a + t*(b-a), t in [0,1], where the distance to
// `center` lies in [r_in, r_out]. The squared radius is a convex quadratic in
// t, so the result is at most two intervals.
void edge_intervals(Point2 a, Point2 b, Point2 center, double r_in, double r_out,
                    std::vector<EdgeInterval>& out) {
    out.clear();
    const Point2 d = a - center;
    const Point2 e = b - a;
    const double qa = dot(e, e);
    const double qb = 2.0 * dot(d, e);
    const double qc = dot(d, d);

    auto roots = [&](double r2, double& t0, double& t1) -> bool {
        // qa*t^2 + qb*t + (qc - r2) = 0
        const double c0 = qc - r2;
        if (qa <= 0.0) return false;
        const double disc = qb * qb - 4.0 * qa * c0;
        if (disc < 0.0) return false;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        t0 = q / qa;
        t1 = (q != 0.0) ? c0 / q : t0;
        if (t0 > t1) std::swap(t0, t1);
        return true;
    };

    // inside outer circle: single interval (possibly empty)
    double o0 = 0.0, o1 = 1.0;
    if (qa <= 0.0) {
        if (qc > r_out * r_out) return;
    } else if (roots(r_out * r_out, o0, o1)) {
        o0 = std::max(o0, 0.0);
        o1 = std::min(o1, 1.0);
        if (o0 >= o1) {
            // tangent or fully outside
            const double mid = std::clamp(0.5 * (o0 + o1), 0.0, 1.0);
            const double rm2 = qa * mid * mid + qb * mid + qc;
            if (rm2 > r_out * r_out) return;
            o0 = 0.0;
            o1 = 1.0;
        }
    } else {
        // no intersection with the outer circle: all in or all out
        if (qc > r_out * r_out) return;
        o0 = 0.0;
        o1 = 1.0;
    }

    // subtract the open hole inside the inner circle
    double i0 = 0.0, i1 = 0.0;
    bool has_hole = false;
    if (r_in > 0.0 && qa > 0.0 && roots(r_in * r_in, i0, i1)) has_hole = i0 < i1;

    constexpr double kSnap = 1e-9;
    auto push = [&](double lo, double hi) {
        if (lo < kSnap) lo = 0.0;
        if (hi > 1.0 - kSnap) hi = 1.0;
        if (hi - lo > kSnap) out.push_back({lo, hi});
    };

    if (!has_hole) {
        push(o0, o1);
    } else {
        push(o0, std::min(o1, i0));
        push(std::max(o0, i1), o1);
    }
}

} // namespace

VesselGraph zone_clip(const VesselGraph& graph, const ZoneSpec& zone) {
    require_input(zone.inner_radius >= 0.0 && zone.inner_radius < zone.outer_radius,
                  "zone_clip: zone must satisfy 0 <= inner < outer");
    require_input(graph.disc.diameter > 0.0, "zone_clip: disc diameter must be > 0");

    const double r_in = zone.inner_radius * graph.disc.diameter;
    const double r_out = zone.outer_radius * graph.disc.diameter;
    const Point2 c = graph.disc.center;

    VesselGraph out;
    out.disc = graph.disc;
    out.image_width = graph.image_width;
    out.image_height = graph.image_height;

    struct Part {
        std::vector<Point2> pts;
        std::vector<double> widths;
    };

    // original id -> ids of surviving parts, in polyline order
    std::map<std::string, std::vector<std::string>> part_ids;
    std::vector<std::pair<std::string, std::optional<std::string>>> pending_parents;

    for (const auto& seg : graph.segments) {
        std::vector<Part> parts;
        Part cur;
        bool cur_open = false;
        bool whole = true;
        const bool has_w = !seg.widths.empty();

        auto close = [&]() {
            if (cur_open && cur.pts.size() >= 2) parts.push_back(std::move(cur));
            cur = Part{};
            cur_open = false;
        };

        std::vector<EdgeInterval> ivals;
        for (std::size_t i = 0; i + 1 < seg.points.size(); ++i) {
            const Point2 p0 = seg.points[i];
            const Point2 p1 = seg.points[i + 1];
            edge_intervals(p0, p1, c, r_in, r_out, ivals);
            if (ivals.size() != 1 || ivals[0].lo != 0.0 || ivals[0].hi != 1.0) whole = false;
            for (const auto& iv : ivals) {
                auto at = [&](double t) -> Point2 {
                    if (t == 0.0) return p0;
                    if (t == 1.0) return p1;
                    return lerp(p0, p1, t);
                };
                auto wat = [&](double t) -> double {
                    return has_w ? seg.widths[i] + t * (seg.widths[i + 1] - seg.widths[i]) : 0.0;
                };
                if (!(cur_open && iv.lo == 0.0)) {
                    close();
                    cur_open = true;
                    cur.pts.push_back(at(iv.lo));
                    if (has_w) cur.widths.push_back(wat(iv.lo));
                }
                const Point2 exit_pt = at(iv.hi);
                if (cur.pts.empty() || !(cur.pts.back() == exit_pt)) {
                    cur.pts.push_back(exit_pt);
                    if (has_w) cur.widths.push_back(wat(iv.hi));
                }
                if (iv.hi < 1.0) close();
            }
            if (ivals.empty()) close();
        }
        close();

        if (parts.empty()) continue;

        auto& ids = part_ids[seg.id];
        const bool keep_id = whole && parts.size() == 1;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            Segment part;
            part.id = keep_id ? seg.id : seg.id + "#" + std::to_string(k);
            part.kind = seg.kind;
            part.generation = seg.generation;
            part.points = keep_id ? seg.points : std::move(parts[k].pts);
            part.widths = keep_id ? seg.widths : std::move(parts[k].widths);
            ids.push_back(part.id);
            pending_parents.emplace_back(part.id, seg.parent);
            out.segments.push_back(std::move(part));
        }
    }

    // re-link parents: keep the link only if some surviving part of the
    // original parent still ends where this part begins
    std::map<std::string, const Segment*> clipped_by_id;
    for (const auto& s : out.segments) clipped_by_id[s.id] = &s;
    for (auto& [id, orig_parent] : pending_parents) {
        auto* self = const_cast<Segment*>(clipped_by_id.at(id));
        self->parent.reset();
        if (!orig_parent) continue;
        auto it = part_ids.find(*orig_parent);
        if (it == part_ids.end()) continue;
        for (const auto& pid : it->second) {
            const Segment* cand = clipped_by_id.at(pid);
            if (dist(cand->points.back(), self->points.front()) <= kJoinTolerance) {
                self->parent = pid;
                break;
            }
        }
    }

    const double eps = 1e-9 * graph.disc.diameter;
    for (const auto& jn : graph.junctions) {
        const double r = dist(jn.location, c);
        if (r < r_in - eps || r >= r_out) continue;
        auto find_part = [&](const std::string& orig, bool as_trunk) -> const std::string* {
            auto it = part_ids.find(orig);
            if (it == part_ids.end()) return nullptr;
            for (const auto& pid : it->second) {
                const Segment* s = clipped_by_id.at(pid);
                const Point2 endp = as_trunk ? s->points.back() : s->points.front();
                if (dist(endp, jn.location) <= kJoinTolerance) return &pid;
            }
            return nullptr;
        };
        const std::string* trunk = find_part(jn.trunk, true);
        const std::string* d0 = find_part(jn.daughters[0], false);
        const std::string* d1 = find_part(jn.daughters[1], false);
        if (trunk && d0 && d1) {
            Junction kept = jn;
            kept.trunk = *trunk;
            kept.daughters[0] = *d0;
            kept.daughters[1] = *d1;
            out.junctions.push_back(std::move(kept));
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json point_json(const Point2& p) {
    return ordered_json::array({round_sig(p.x), round_sig(p.y)});
}

Point2 point_from_json(const ordered_json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("graph json: " + what + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string graph_to_json(const VesselGraph& g) {
    ordered_json j;
    j["disc"] = {{"cx", round_sig(g.disc.center.x)},
                 {"cy", round_sig(g.disc.center.y)},
                 {"d", round_sig(g.disc.diameter)}};
    j["image"] = ordered_json::array({g.image_width, g.image_height});
    auto& segs = j["segments"] = ordered_json::array();
    for (const auto& s : g.segments) {
        ordered_json sj;
        sj["id"] = s.id;
        sj["kind"] = to_string(s.kind);
        if (s.parent)
            sj["parent"] = *s.parent;
        else
            sj["parent"] = nullptr;
        sj["generation"] = s.generation;
        auto& pts = sj["pts"] = ordered_json::array();
        for (const auto& p : s.points) pts.push_back(point_json(p));
        auto& ws = sj["widths"] = ordered_json::array();
        for (double w : s.widths) ws.push_back(round_sig(w));
        segs.push_back(std::move(sj));
    }
    auto& jns = j["junctions"] = ordered_json::array();
    for (const auto& jn : g.junctions) {
        ordered_json jj;
        jj["at"] = point_json(jn.location);
        jj["trunk"] = jn.trunk;
        jj["daughters"] = ordered_json::array({jn.daughters[0], jn.daughters[1]});
        jns.push_back(std::move(jj));
    }
    return j.dump();
}

VesselGraph graph_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("graph json: parse error: ") + e.what());
    }
    // Tool outputs wrap the graph next to a provenance object.
    const ordered_json& j = doc.contains("graph") ? doc.at("graph") : doc;
    VesselGraph g;
    try {
        const auto& disc = j.at("disc");
        g.disc.center = {disc.at("cx").get<double>(), disc.at("cy").get<double>()};
        g.disc.diameter = disc.at("d").get<double>();
        const auto& img = j.at("image");
        g.image_width = img.at(0).get<int>();
        g.image_height = img.at(1).get<int>();
        for (const auto& sj : j.at("segments")) {
            Segment s;
            s.id = sj.at("id").get<std::string>();
            s.kind = vessel_kind_from_string(sj.at("kind").get<std::string>());
            if (sj.contains("parent") && !sj.at("parent").is_null())
                s.parent = sj.at("parent").get<std::string>();
            s.generation = sj.at("generation").get<int>();
            for (const auto& pj : sj.at("pts"))
                s.points.push_back(point_from_json(pj, "segment '" + s.id + "' point"));
            if (sj.contains("widths"))
                for (const auto& wj : sj.at("widths")) s.widths.push_back(wj.get<double>());
            g.segments.push_back(std::move(s));
        }
        if (j.contains("junctions")) {
            for (const auto& jj : j.at("junctions")) {
                Junction jn;
                jn.location = point_from_json(jj.at("at"), "junction location");
                jn.trunk = jj.at("trunk").get<std::string>();
                const auto& ds = jj.at("daughters");
                jn.daughters[0] = ds.at(0).get<std::string>();
                jn.daughters[1] = ds.at(1).get<std::string>();
                g.junctions.push_back(std::move(jn));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("graph json: missing or mistyped field: ") + e.what());
    }
    return g;
}

void save_graph(const VesselGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require_input(out.good(), "cannot open '" + path + "' for writing");
    out << graph_to_json(g) << "\n";
    require_input(out.good(), "failed writing '" + path + "'");
}

VesselGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require_input(in.good(), "cannot open graph file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

} // namespace retina
