#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace retina {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend Point2 operator*(double s, Point2 a) { return a * s; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return a + (b - a) * t; }

// Sum of consecutive Euclidean distances. Throws InputError on < 2 points.
double polyline_length(const std::vector<Point2>& points);

// Piecewise-linear point at arc position s in [0, total length].
Point2 polyline_point_at(const std::vector<Point2>& points, double s);

// n_intervals + 1 points equally spaced in arc length along the polyline.
// Invariant under insertion of collinear vertices (the underlying curve is
// unchanged), which is what makes downstream curvature estimates stable
// under re-annotation of the same path.
std::vector<Point2> resample_uniform(const std::vector<Point2>& points, std::size_t n_intervals);

// Menger curvature of the circle through three points; 0 when collinear.
double three_point_curvature(Point2 a, Point2 b, Point2 c);

} // namespace retina
