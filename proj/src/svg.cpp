#include "retina/svg.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace retina {

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 560.0;

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                          "#59a14f", "#edc948", "#b07aa1", "#9c755f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void open_svg(std::ostringstream& out, const SvgMeta& meta) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    if (!meta.tool.empty() || !meta.provenance.empty())
        out << "<!-- " << xml_escape(meta.tool)
            << (meta.provenance.empty() ? "" : " | " + xml_escape(meta.provenance))
            << " -->\n";
    if (meta.timestamp) {
        std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "<!-- generated " << buf << " -->\n";
    }
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
}

void title_text(std::ostringstream& out, const std::string& title) {
    out << "<text x=\"" << kWidth / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << xml_escape(title) << "</text>\n";
}

} // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string svg_bar_chart(const std::vector<std::pair<std::string, double>>& items,
                          const std::string& title, const SvgMeta& meta) {
    require_input(!items.empty(), "svg: no bars to draw");
    double max_v = 0.0;
    for (const auto& [name, v] : items) max_v = std::max(max_v, std::abs(v));
    if (max_v <= 0.0) max_v = 1.0;

    const double left = 170.0, top = 48.0, right = 90.0, bottom = 24.0;
    const double plot_w = kWidth - left - right;
    const double plot_h = kHeight - top - bottom;
    const double slot = plot_h / static_cast<double>(items.size());
    const double bar_h = std::min(22.0, slot * 0.72);

    std::ostringstream out;
    open_svg(out, meta);
    title_text(out, title);
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"#444\"/>\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double y = top + slot * static_cast<double>(i) + (slot - bar_h) / 2.0;
        const double w = plot_w * std::abs(items[i].second) / max_v;
        out << "<rect x=\"" << num(left) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
            << "\" height=\"" << num(bar_h) << "\" fill=\"" << kPalette[0] << "\"/>\n";
        out << "<text x=\"" << num(left - 6.0) << "\" y=\"" << num(y + bar_h * 0.75)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(items[i].first) << "</text>\n";
        out << "<text x=\"" << num(left + w + 6.0) << "\" y=\"" << num(y + bar_h * 0.75)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">"
            << num(items[i].second) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_scatter(const std::vector<std::pair<double, double>>& points,
                        const std::vector<int>& labels,
                        const std::vector<std::string>& label_names,
                        const std::string& title, const SvgMeta& meta) {
    require_input(!points.empty(), "svg: no points to draw");
    require_input(points.size() == labels.size(), "svg: points/labels size mismatch");
    for (int l : labels)
        require_input(l >= 0 && static_cast<std::size_t>(l) < label_names.size(),
                      "svg: label out of range");

    double xmin = points[0].first, xmax = xmin, ymin = points[0].second, ymax = ymin;
    for (const auto& [x, y] : points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    const double xspan = (xmax > xmin) ? xmax - xmin : 1.0;
    const double yspan = (ymax > ymin) ? ymax - ymin : 1.0;

    const double left = 40.0, top = 48.0, right = 150.0, bottom = 32.0;
    const double plot_w = kWidth - left - right;
    const double plot_h = kHeight - top - bottom;

    std::ostringstream out;
    open_svg(out, meta);
    title_text(out, title);
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double px = left + plot_w * (points[i].first - xmin) / xspan;
        // SVG y grows downward; flip so larger values plot higher.
        const double py = top + plot_h * (1.0 - (points[i].second - ymin) / yspan);
        out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py)
            << "\" r=\"4\" fill=\""
            << kPalette[static_cast<std::size_t>(labels[i]) % kPaletteSize]
            << "\" fill-opacity=\"0.8\"/>\n";
    }
    for (std::size_t l = 0; l < label_names.size(); ++l) {
        const double ly = top + 14.0 + 20.0 * static_cast<double>(l);
        out << "<circle cx=\"" << num(kWidth - right + 18.0) << "\" cy=\"" << num(ly)
            << "\" r=\"5\" fill=\"" << kPalette[l % kPaletteSize] << "\"/>\n";
        out << "<text x=\"" << num(kWidth - right + 30.0) << "\" y=\"" << num(ly + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(label_names[l]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace retina
