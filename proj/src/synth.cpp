#include "retina/synth.hpp"

#include "retina/error.hpp"
#include "retina/feature_names.hpp"
#include "retina/geometry.hpp"
#include "retina/num.hpp"
#include "retina/params.hpp"
#include "retina/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace retina {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kImageSize = 2048;
constexpr double kDiscDiameter = 300.0;
constexpr double kStartMargin = 2.0;  // trunk root just outside the disc edge
constexpr double kOuterMargin = 15.0; // keep leaves inside the 2.5 DD annulus
constexpr double kLengthRatio = 0.72; // child length / parent length
constexpr int kStraightIntervals = 16;
constexpr int kTortuousIntervals = 64;

Point2 rotate(Point2 v, double rad) {
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Per-segment construction record kept alongside the emitted polyline.
struct SegInfo {
    VesselKind kind = VesselKind::arteriole;
    int generation = 0;
    double width = 0.0;
    double chord = 0.0;
    double arc = 0.0;   // polyline arc length
    double ctort = 0.0; // smooth-curve (1/L) integral of squared curvature
};

struct Builder {
    const TreeSpec& spec;
    double c1; // wide-daughter width factor
    double c2;
    double theta_wide;
    double theta_narrow;
    Rng rng;
    std::vector<Segment> segments;
    std::vector<Junction> junctions;
    std::vector<SegInfo> infos;

    explicit Builder(const TreeSpec& s)
        : spec(s), rng(mix_seed(s.seed, 0x74726565)) { // "tree"
        const double a = s.asymmetry;
        const double x = s.murray_exponent;
        c1 = std::pow(1.0 + std::pow(a, x), -1.0 / x);
        c2 = a * c1;
        const double ba = s.branch_angle_deg * kPi / 180.0;
        theta_wide = 0.4 * ba;
        theta_narrow = 0.6 * ba;
    }

    // Sinusoidal perpendicular displacement, zero at both endpoints.
    void grow(const std::string& id, std::optional<std::string> parent, VesselKind kind,
              int generation, Point2 start, Point2 dir, double length, double width) {
        const double amp = spec.tortuosity_amplitude;
        const int cycles = amp > 0.0 ? 1 + static_cast<int>(rng.below(2)) : 1;
        const double sign = amp > 0.0 && rng.below(2) == 0 ? -1.0 : 1.0;
        const int n = amp > 0.0 ? kTortuousIntervals : kStraightIntervals;
        const Point2 nrm{-dir.y, dir.x};

        Segment seg;
        seg.id = id;
        seg.kind = kind;
        seg.generation = generation;
        seg.parent = std::move(parent);
        seg.points.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double u = static_cast<double>(i) / n;
            const double off = sign * amp * std::sin(kPi * cycles * u);
            seg.points.push_back(start + dir * (u * length) + nrm * off);
        }
        seg.widths.assign(seg.points.size(), width);

        SegInfo info;
        info.kind = kind;
        info.generation = generation;
        info.width = width;
        info.chord = dist(seg.points.front(), seg.points.back());
        info.arc = polyline_length(seg.points);
        info.ctort = smooth_ctort(length, amp, cycles);

        const Point2 end = seg.points.back();
        segments.push_back(std::move(seg));
        infos.push_back(info);

        if (generation + 1 >= spec.depth) return;
        const int side = generation % 2 == 0 ? 1 : -1;
        const Point2 dir_wide = rotate(dir, side * theta_wide);
        const Point2 dir_narrow = rotate(dir, -side * theta_narrow);
        const std::string wide_id = id + ".0";
        const std::string narrow_id = id + ".1";
        grow(wide_id, id, kind, generation + 1, end, dir_wide, length * kLengthRatio, width * c1);
        grow(narrow_id, id, kind, generation + 1, end, dir_narrow, length * kLengthRatio,
             width * c2);
        junctions.push_back({end, id, {wide_id, narrow_id}});
    }

    static double smooth_ctort(double length, double amp, int cycles) {
        if (amp <= 0.0) return 0.0;
        const double w = kPi * cycles; // phase rate over u in [0, 1]
        auto dlen = [&](double u) {
            const double sp = amp * w * std::cos(w * u);
            return std::sqrt(length * length + sp * sp);
        };
        auto ksq_dlen = [&](double u) {
            const double sp = amp * w * std::cos(w * u);
            const double spp = -amp * w * w * std::sin(w * u);
            const double g = length * length + sp * sp;
            return length * length * spp * spp / (g * g * std::sqrt(g));
        };
        using gauss = boost::math::quadrature::gauss<double, 64>;
        const double arc = gauss::integrate(dlen, 0.0, 1.0);
        return gauss::integrate(ksq_dlen, 0.0, 1.0) / arc;
    }
};

bool kind_in(VesselKind k, char suffix) {
    return suffix == 't' || (suffix == 'a') == (k == VesselKind::arteriole);
}

} // namespace

SynthTree generate_tree(const TreeSpec& spec) {
    require_input(spec.n_arterioles >= 0 && spec.n_venules >= 0 &&
                      spec.n_arterioles + spec.n_venules >= 1,
                  "generate_tree: need at least one trunk");
    require_input(spec.depth >= 1 && spec.depth <= 8, "generate_tree: depth must be in [1, 8]");
    require_input(spec.trunk_width >= 1.0 && spec.trunk_width <= 40.0,
                  "generate_tree: trunk_width must be in [1, 40]");
    require_input(spec.murray_exponent > 0.0, "generate_tree: murray_exponent must be positive");
    require_input(spec.asymmetry > 0.0 && spec.asymmetry <= 1.0,
                  "generate_tree: asymmetry must be in (0, 1]");
    require_input(spec.branch_angle_deg > 0.0 && spec.branch_angle_deg < 180.0,
                  "generate_tree: branch_angle_deg must be in (0, 180)");
    require_input(spec.tortuosity_amplitude >= 0.0 && spec.tortuosity_amplitude <= 20.0,
                  "generate_tree: tortuosity_amplitude must be in [0, 20]");

    Builder b(spec);

    const Point2 center{kImageSize / 2.0, kImageSize / 2.0};
    const double r_start = 0.5 * kDiscDiameter + kStartMargin;
    const double r_limit = 2.5 * kDiscDiameter - kOuterMargin;
    double denom = 0.0;
    for (int g = 0; g < spec.depth; ++g) denom += std::pow(kLengthRatio, g);
    const double budget = r_limit - r_start - spec.tortuosity_amplitude;
    require_internal(budget > 10.0, "generate_tree: annulus budget exhausted");
    const double trunk_length = budget / denom;

    const int n_trunks = spec.n_arterioles + spec.n_venules;
    int na = spec.n_arterioles;
    int nv = spec.n_venules;
    for (int i = 0; i < n_trunks; ++i) {
        VesselKind kind;
        if (i % 2 == 0)
            kind = na > 0 ? VesselKind::arteriole : VesselKind::venule;
        else
            kind = nv > 0 ? VesselKind::venule : VesselKind::arteriole;
        if (kind == VesselKind::arteriole)
            --na;
        else
            --nv;

        const double phi =
            2.0 * kPi * i / n_trunks + 0.35 + b.rng.uniform(-0.08, 0.08);
        const Point2 dir{std::cos(phi), std::sin(phi)};
        const std::string id =
            (kind == VesselKind::arteriole ? "a" : "v") + std::to_string(i);
        b.grow(id, std::nullopt, kind, 0, center + dir * r_start, dir, trunk_length,
               spec.trunk_width);
    }

    SynthTree out;
    out.graph.disc = {center.x, center.y, kDiscDiameter};
    out.graph.image_width = kImageSize;
    out.graph.image_height = kImageSize;
    out.graph.segments = std::move(b.segments);
    out.graph.junctions = std::move(b.junctions);

    const ZoneId z = ZoneId::C; // whole-tree annulus label
    const bool straight = spec.tortuosity_amplitude == 0.0;
    auto put = [&](const std::string& name, double value, bool exact, const std::string& note) {
        out.truth[name] = {value, exact, note};
    };

    for (char suffix : {'a', 'v', 't'}) {
        std::vector<const SegInfo*> segs;
        for (const auto& info : b.infos)
            if (kind_in(info.kind, suffix)) segs.push_back(&info);
        if (segs.empty()) continue;

        double w_sum = 0.0, w2_sum = 0.0, ldr_sum = 0.0, tort_sum = 0.0, ctort_sum = 0.0;
        for (const SegInfo* s : segs) {
            w_sum += s->width;
            w2_sum += s->width * s->width;
            ldr_sum += s->arc / s->width;
            tort_sum += s->arc / s->chord - 1.0;
            ctort_sum += s->ctort;
        }
        const double n = static_cast<double>(segs.size());
        const double mw = w_sum / n;
        put(feature_name("MW", z, suffix), mw, true, "equal point counts per segment");
        put(feature_name("STDW", z, suffix), std::sqrt(std::max(0.0, w2_sum / n - mw * mw)),
            true, "population over point samples");
        put(feature_name("LDR", z, suffix), ldr_sum / n, true, "polyline arc / constant width");
        put(feature_name("TORT", z, suffix), tort_sum / n, true, "polyline arc / chord - 1");
        put(feature_name("cTORT", z, suffix), ctort_sum / n, straight,
            straight ? "straight segments" : "smooth-curve quadrature, centerline estimate");

        const int per_tree = spec.depth >= 2 ? (1 << (spec.depth - 1)) - 1 : 0;
        int n_trees = suffix == 't' ? n_trunks
                                    : (suffix == 'a' ? spec.n_arterioles : spec.n_venules);
        put(feature_name("NB", z, suffix), static_cast<double>(n_trees * per_tree), true, "");
        put(feature_name("NFB", z, suffix),
            static_cast<double>(spec.depth >= 2 ? n_trees : 0), true, "");

        if (per_tree > 0) {
            const double bc = b.c1 * b.c1 + b.c2 * b.c2;
            const double af = spec.asymmetry * spec.asymmetry;
            put(feature_name("BC", z, suffix), bc, true, "width ladder");
            put(feature_name("AF", z, suffix), af, true, "width ladder");
            if (spec.murray_exponent >= kJunctionExponentLo &&
                spec.murray_exponent <= kJunctionExponentHi)
                put(feature_name("JE", z, suffix), spec.murray_exponent, true, "width ladder");
            if (straight) {
                put(feature_name("BA", z, suffix), spec.branch_angle_deg, true, "");
                put(feature_name("AA", z, suffix), 0.2 * spec.branch_angle_deg, true, "");
            }
        }
    }

    put(feature_name("NA", z), spec.n_arterioles, true, "");
    put(feature_name("NV", z), spec.n_venules, true, "");
    if (spec.n_arterioles > 0)
        put(feature_name("CRAE", z),
            vessel_equivalent(std::vector<double>(spec.n_arterioles, spec.trunk_width),
                              VesselKind::arteriole),
            true, "equal trunk widths");
    if (spec.n_venules > 0)
        put(feature_name("CRVE", z),
            vessel_equivalent(std::vector<double>(spec.n_venules, spec.trunk_width),
                              VesselKind::venule),
            true, "equal trunk widths");
    if (spec.n_arterioles > 0 && spec.n_venules > 0)
        put(feature_name("AVR", z),
            out.truth[feature_name("CRAE", z)].value / out.truth[feature_name("CRVE", z)].value,
            true, "");

    return out;
}

Raster koch_raster(int level, int size) {
    require_input(level >= 0 && level <= 8, "koch_raster: level must be in [0, 8]");
    require_input(size >= 64, "koch_raster: size must be >= 64");

    std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}};
    const double rot = -kPi / 3.0; // peak points up in image coordinates
    for (int l = 0; l < level; ++l) {
        std::vector<Point2> next;
        next.reserve((pts.size() - 1) * 4 + 1);
        next.push_back(pts.front());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const Point2 u = pts[i - 1];
            const Point2 d = (pts[i] - u) * (1.0 / 3.0);
            const Point2 a = u + d;
            const Point2 peak = a + rotate(d, rot);
            const Point2 c = u + d * 2.0;
            next.push_back(a);
            next.push_back(peak);
            next.push_back(c);
            next.push_back(pts[i]);
        }
        pts = std::move(next);
    }

    const double margin = 8.0;
    const double span = size - 2.0 * margin;
    const double height = std::sqrt(3.0) / 6.0; // peak height of the unit curve
    Raster img(size, size);
    std::vector<Point2> mapped;
    mapped.reserve(pts.size());
    for (const Point2& p : pts)
        mapped.push_back({margin + p.x * span, size / 2.0 + (p.y + height / 2.0) * span});
    draw_polyline(img, mapped, 1.0, {0.0, 0.0});
    return img;
}

Raster filled_square_raster(int size, int margin) {
    require_input(size >= 64, "filled_square_raster: size must be >= 64");
    require_input(margin >= 0 && 2 * margin < size, "filled_square_raster: margin too large");
    Raster img(size, size);
    for (int y = margin; y < size - margin; ++y)
        for (int x = margin; x < size - margin; ++x)
            img.set(x, y);
    return img;
}

LabeledPoints make_separable_dataset(const std::vector<int>& class_counts, int n_features,
                                     double separation, std::uint64_t seed) {
    const int n_classes = static_cast<int>(class_counts.size());
    require_input(n_classes >= 2, "make_separable_dataset: need at least two classes");
    require_input(n_features >= 2, "make_separable_dataset: need at least two features");
    require_input(separation >= 0.0, "make_separable_dataset: separation must be non-negative");
    int total = 0;
    for (int c : class_counts) {
        require_input(c >= 0, "make_separable_dataset: class counts must be non-negative");
        total += c;
    }
    require_input(total >= 1, "make_separable_dataset: dataset is empty");

    Rng rng(mix_seed(seed, 0x626c6f62)); // "blob"

    // Random orthonormal 2-D informative subspace via Gram-Schmidt.
    std::vector<double> u(n_features), v(n_features);
    for (double& e : u) e = rng.normal();
    for (double& e : v) e = rng.normal();
    auto dot = [n_features](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int f = 0; f < n_features; ++f) s += a[f] * b[f];
        return s;
    };
    double un = std::sqrt(dot(u, u));
    for (double& e : u) e /= un;
    const double uv = dot(u, v);
    for (int f = 0; f < n_features; ++f) v[f] -= uv * u[f];
    double vn = std::sqrt(dot(v, v));
    for (double& e : v) e /= vn;

    // Class centers on a circle in span{u, v} with adjacent centers
    // `separation` apart; separation 0 collapses every center to the origin.
    const double radius =
        separation / (2.0 * std::sin(kPi / static_cast<double>(n_classes)));
    LabeledPoints out;
    out.x.reserve(total);
    out.y.reserve(total);
    for (int c = 0; c < n_classes; ++c) {
        const double angle = 2.0 * kPi * c / static_cast<double>(n_classes);
        const double cu = radius * std::cos(angle);
        const double cv = radius * std::sin(angle);
        for (int i = 0; i < class_counts[c]; ++i) {
            std::vector<double> row(n_features);
            for (int f = 0; f < n_features; ++f)
                row[f] = cu * u[f] + cv * v[f] + rng.normal();
            out.x.push_back(std::move(row));
            out.y.push_back(c);
        }
    }

    std::vector<std::size_t> order(out.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    LabeledPoints shuffled;
    shuffled.x.reserve(out.x.size());
    shuffled.y.reserve(out.y.size());
    for (std::size_t i : order) {
        shuffled.x.push_back(std::move(out.x[i]));
        shuffled.y.push_back(out.y[i]);
    }
    return shuffled;
}

LabeledPoints make_separable_dataset(int n_per_class, int n_classes, int n_features,
                                     double separation, std::uint64_t seed) {
    require_input(n_classes >= 2, "make_separable_dataset: need at least two classes");
    return make_separable_dataset(std::vector<int>(n_classes, n_per_class), n_features,
                                  separation, seed);
}

} // namespace retina
