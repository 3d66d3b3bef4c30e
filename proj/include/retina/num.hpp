#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace retina {

// Shortest decimal form with at most `sig` significant digits,
// locale-independent (std::to_chars). "5" not "5.000000".
std::string format_number(double v, int sig = 9);

// Nearest double to format_number(v, sig); serialization helper so emitted
// JSON/CSV numbers are stable and compact.
double round_sig(double v, int sig = 9);

double parse_number(const std::string& s, bool& ok);

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// population standard deviation
inline double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

} // namespace retina
