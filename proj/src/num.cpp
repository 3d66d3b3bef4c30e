#include "retina/num.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

namespace retina {

std::string format_number(double v, int sig) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, sig);
    std::string s(buf, res.ptr);
    // to_chars(general) may keep a trailing ".0"; it does not, but normalize
    // "-0" to "0" so equal values serialize identically.
    if (s == "-0") s = "0";
    return s;
}

double round_sig(double v, int sig) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v, sig);
    double out = v;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

double parse_number(const std::string& s, bool& ok) {
    double out = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto res = std::from_chars(b, e, out);
    ok = res.ec == std::errc() && res.ptr == e;
    if (!ok) {
        // from_chars rejects "inf"/"nan"; treat those as unparseable on purpose
        ok = false;
    }
    return out;
}

} // namespace retina
