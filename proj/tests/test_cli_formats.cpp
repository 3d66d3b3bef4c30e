#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/error.hpp"
#include "retina/report.hpp"
#include "retina/svg.hpp"

#include <cstddef>
#include <string>
#include <vector>

using namespace retina;

namespace {

// Tiny well-formedness scan: every open tag is closed in LIFO order, after
// stripping the declaration, comments, and self-closing elements.
bool xml_balanced(const std::string& doc) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = doc.find('<', i)) != std::string::npos) {
        if (doc.compare(i, 2, "<?") == 0) {
            i = doc.find("?>", i);
            if (i == std::string::npos) return false;
            continue;
        }
        if (doc.compare(i, 4, "<!--") == 0) {
            i = doc.find("-->", i);
            if (i == std::string::npos) return false;
            continue;
        }
        const std::size_t end = doc.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = doc.substr(i + 1, end - i - 1);
        i = end + 1;
        if (!tag.empty() && tag.back() == '/') continue; // self-closing
        if (!tag.empty() && tag.front() == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        const std::size_t sp = tag.find_first_of(" \t\n");
        stack.push_back(sp == std::string::npos ? tag : tag.substr(0, sp));
    }
    return stack.empty();
}

} // namespace

TEST_CASE("format_value3 drops the leading zero below one") {
    CHECK(format_value3(0.986) == ".986");
    CHECK(format_value3(-0.4) == "-.400");
    CHECK(format_value3(1.0) == "1.000");
    CHECK(format_value3(0.0) == ".000");
    CHECK(format_value3(-1.25) == "-1.250");
    CHECK(format_value3(12.3456) == "12.346");
}

TEST_CASE("format_mean_std joins with a plus-minus") {
    CHECK(format_mean_std(0.986, 0.027) == ".986±.027");
    CHECK(format_mean_std(1.0, 0.0) == "1.000±.000");
}

TEST_CASE("regression sentence shape") {
    CHECK(format_regression_sentence(51, 238, 3.118, 1e-6, 0.401) ==
          "F(51, 238) = 3.118, p<.0005, R² = .401");
    CHECK(format_regression_sentence(3, 96, 5.0, 0.012, 0.135) ==
          "F(3, 96) = 5.000, p = .012, R² = .135");
    CHECK(format_regression_sentence(1, 10, 0.2, 0.66, 0.02) ==
          "F(1, 10) = .200, p = .660, R² = .020");
}

TEST_CASE("model table golden") {
    const std::vector<ModelRow> rows = {
        {"RFC", 0.986, 0.027, 0.912, 1.2},
        {"KNC", 0.954, 0.031, std::nullopt, 0.004},
    };
    const std::string want =
        "Task       Best Model  Train Perf. ROCAUC  Test Perf. ROCAUC  Train Time in min\n"
        "-------------------------------------------------------------------------------\n"
        "Detection  RFC         .986±.027           .912               1.200            \n"
        "Detection  KNC         .954±.031           -                  .004             \n";
    CHECK(model_table("Detection", rows) == want);
}

TEST_CASE("model table keeps the given row order and widens to long names") {
    const std::vector<ModelRow> rows = {
        {"GradientBoosting", 0.5, 0.1, std::nullopt, 0.0},
        {"LR", 0.9, 0.0, std::nullopt, 0.0},
    };
    const std::string t = model_table("Grading", rows);
    CHECK(t.find("GradientBoosting") < t.find("LR"));
    // every line has the same display width
    std::vector<std::size_t> widths;
    std::size_t start = 0, w = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '\n') {
            widths.push_back(w);
            w = 0;
            start = i + 1;
        } else if ((static_cast<unsigned char>(t[i]) & 0xc0) != 0x80) {
            ++w;
        }
    }
    (void)start;
    REQUIRE(widths.size() == 4);
    for (std::size_t v : widths) CHECK(v == widths[0]);
}

TEST_CASE("xml_escape handles the four specials") {
    CHECK(xml_escape("a<b&c>\"d\"") == "a&lt;b&amp;c&gt;&quot;d&quot;");
    CHECK(xml_escape("plain") == "plain");
}

TEST_CASE("bar chart is well-formed and carries the provenance comment") {
    SvgMeta meta;
    meta.tool = "vasc 1.0";
    meta.provenance = "seed=42 zones=B,C";
    meta.timestamp = false;
    const std::string svg =
        svg_bar_chart({{"MW-Ca", 0.4}, {"FD-C", 0.2}, {"TORT-Cv", 0.0}}, "importance", meta);
    CHECK(xml_balanced(svg));
    CHECK(svg.find("<!-- vasc 1.0 | seed=42 zones=B,C -->") != std::string::npos);
    CHECK(svg.find("generated") == std::string::npos);
    CHECK(svg.find("MW-Ca") != std::string::npos);
    // zero-height data must not divide by zero
    CHECK_NOTHROW(svg_bar_chart({{"a", 0.0}}, "flat", meta));
    CHECK_THROWS_AS(svg_bar_chart({}, "empty", meta), InputError);
}

TEST_CASE("bar chart titles are escaped") {
    SvgMeta meta;
    meta.timestamp = false;
    const std::string svg = svg_bar_chart({{"x", 1.0}}, "a<b & c", meta);
    CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);
    CHECK(svg.find("<b ") == std::string::npos);
}

TEST_CASE("scatter is well-formed, one circle per point plus the legend") {
    SvgMeta meta;
    meta.timestamp = false;
    const std::vector<std::pair<double, double>> pts = {
        {0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}, {2.0, -1.0}};
    const std::string svg =
        svg_scatter(pts, {0, 1, 0, 1}, {"healthy", "diseased"}, "embedding", meta);
    CHECK(xml_balanced(svg));
    std::size_t circles = 0, at = 0;
    while ((at = svg.find("<circle", at)) != std::string::npos) {
        ++circles;
        ++at;
    }
    CHECK(circles == pts.size() + 2); // legend adds one per class
    CHECK(svg.find("healthy") != std::string::npos);

    CHECK_THROWS_AS(svg_scatter(pts, {0, 1}, {"a", "b"}, "t", meta), InputError);
    CHECK_THROWS_AS(svg_scatter(pts, {0, 1, 0, 5}, {"a", "b"}, "t", meta), InputError);
}

TEST_CASE("timestamp comment appears only when requested") {
    SvgMeta with;
    with.timestamp = true;
    SvgMeta without;
    without.timestamp = false;
    CHECK(svg_bar_chart({{"x", 1.0}}, "t", with).find("<!-- generated ") !=
          std::string::npos);
    const std::string a = svg_bar_chart({{"x", 1.0}}, "t", without);
    const std::string b = svg_bar_chart({{"x", 1.0}}, "t", without);
    CHECK(a == b); // byte-stable once the clock is out
}
