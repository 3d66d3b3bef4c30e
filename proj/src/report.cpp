#include "retina/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace retina {

std::string format_value3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    if (s.rfind("0.", 0) == 0) return s.substr(1);
    if (s.rfind("-0.", 0) == 0) return "-" + s.substr(2);
    return s;
}

std::string format_mean_std(double mean, double stddev) {
    return format_value3(mean) + "±" + format_value3(stddev);
}

std::string format_regression_sentence(int df1, int df2, double f_stat, double p_value,
                                       double r2) {
    std::ostringstream out;
    out << "F(" << df1 << ", " << df2 << ") = " << format_value3(f_stat) << ", p";
    if (p_value < 0.0005)
        out << "<.0005";
    else
        out << " = " << format_value3(p_value);
    out << ", R² = " << format_value3(r2);
    return out.str();
}

std::string model_table(const std::string& task, const std::vector<ModelRow>& rows) {
    const std::vector<std::string> header = {"Task", "Best Model", "Train Perf. ROCAUC",
                                             "Test Perf. ROCAUC", "Train Time in min"};
    std::vector<std::vector<std::string>> cells;
    cells.push_back(header);
    for (const auto& row : rows) {
        cells.push_back({task, row.model, format_mean_std(row.train_mean, row.train_std),
                         row.test_auc ? format_value3(*row.test_auc) : "-",
                         format_value3(row.minutes)});
    }

    // The "±" and header glyphs are multi-byte; pad by display width, not
    // bytes, so columns stay aligned.
    auto display_width = [](const std::string& s) {
        std::size_t w = 0;
        for (char c : s)
            if ((static_cast<unsigned char>(c) & 0xc0) != 0x80) ++w;
        return w;
    };
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], display_width(row[c]));

    std::ostringstream out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            const std::string& s = cells[r][c];
            const std::size_t padding = width[c] - display_width(s);
            out << s << std::string(padding, ' ');
            if (c + 1 < cells[r].size()) out << "  ";
        }
        out << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t c = 0; c < width.size(); ++c)
                total += width[c] + (c + 1 < width.size() ? 2 : 0);
            out << std::string(total, '-') << '\n';
        }
    }
    return out.str();
}

} // namespace retina
