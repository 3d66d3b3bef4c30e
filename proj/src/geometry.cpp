#include "retina/geometry.hpp"

#include "retina/error.hpp"

#include <algorithm>

namespace retina {

double polyline_length(const std::vector<Point2>& points) {
    require_input(points.size() >= 2, "polyline_length: need at least 2 points");
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) len += dist(points[i - 1], points[i]);
    return len;
}

Point2 polyline_point_at(const std::vector<Point2>& points, double s) {
    require_input(points.size() >= 2, "polyline_point_at: need at least 2 points");
    if (s <= 0.0) return points.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double seg = dist(points[i - 1], points[i]);
        if (acc + seg >= s) {
            const double t = seg > 0.0 ? (s - acc) / seg : 0.0;
            return lerp(points[i - 1], points[i], t);
        }
        acc += seg;
    }
    return points.back();
}

std::vector<Point2> resample_uniform(const std::vector<Point2>& points, std::size_t n_intervals) {
    require_input(points.size() >= 2, "resample_uniform: need at least 2 points");
    require_input(n_intervals >= 1, "resample_uniform: need at least 1 interval");
    const double total = polyline_length(points);
    std::vector<Point2> out;
    out.reserve(n_intervals + 1);
    // single forward sweep, stations are monotone in s
    std::size_t edge = 1;
    double acc = 0.0;
    double seg = dist(points[0], points[1]);
    for (std::size_t k = 0; k <= n_intervals; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(n_intervals);
        while (edge + 1 < points.size() && acc + seg < s) {
            acc += seg;
            ++edge;
            seg = dist(points[edge - 1], points[edge]);
        }
        const double t = seg > 0.0 ? std::clamp((s - acc) / seg, 0.0, 1.0) : 0.0;
        out.push_back(lerp(points[edge - 1], points[edge], t));
    }
    out.front() = points.front();
    out.back() = points.back();
    return out;
}

double three_point_curvature(Point2 a, Point2 b, Point2 c) {
    const double area2 = cross(b - a, c - a); // signed, twice the area
    const double la = dist(a, b);
    const double lb = dist(b, c);
    const double lc = dist(a, c);
    const double denom = la * lb * lc;
    if (denom <= 0.0) return 0.0;
    return 2.0 * std::fabs(area2) / denom;
}

} // namespace retina
