#pragma once

// Minimal SVG emission for the two plots the CLI produces: a horizontal bar
// chart of feature importance and a 2-D scatter of an embedding colored by
// class. Output is plain XML assembled by hand, deterministic for fixed
// inputs apart from an optional timestamp comment.

#include <string>
#include <utility>
#include <vector>

namespace retina {

struct SvgMeta {
    std::string tool;       // "name version"
    std::string provenance; // free-form seeds/config line embedded as comment
    bool timestamp = true;  // suppressed by --deterministic
};

std::string xml_escape(const std::string& s);

// Bars are drawn top-down in the order given (pre-sort for a ranking).
std::string svg_bar_chart(const std::vector<std::pair<std::string, double>>& items,
                          const std::string& title, const SvgMeta& meta);

// One circle per point; labels index into label_names for the legend.
std::string svg_scatter(const std::vector<std::pair<double, double>>& points,
                        const std::vector<int>& labels,
                        const std::vector<std::string>& label_names,
                        const std::string& title, const SvgMeta& meta);

} // namespace retina
