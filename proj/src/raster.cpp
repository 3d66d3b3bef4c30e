#include "retina/raster.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace retina {

std::size_t Raster::count() const {
    return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

void draw_line(Raster& img, int x0, int y0, int x1, int y1) {
    int dx = std::abs(x1 - x0);
    int dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1;
    int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        img.set(x0, y0);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_polyline(Raster& img, const std::vector<Point2>& pts, double scale, Point2 offset) {
    if (pts.size() < 2) return;
    auto px = [&](const Point2& p) {
        return std::pair<int, int>{static_cast<int>(std::floor((p.x - offset.x) * scale)),
                                   static_cast<int>(std::floor((p.y - offset.y) * scale))};
    };
    for (std::size_t i = 1; i < pts.size(); ++i) {
        auto [x0, y0] = px(pts[i - 1]);
        auto [x1, y1] = px(pts[i]);
        draw_line(img, x0, y0, x1, y1);
    }
}

std::size_t box_count(const Raster& img, int s) {
    require_input(s >= 1, "box_count: box size must be >= 1");
    const int bx = (img.width + s - 1) / s;
    const int by = (img.height + s - 1) / s;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(bx) * by, 0);
    for (int y = 0; y < img.height; ++y) {
        const std::uint8_t* row = img.data.data() + static_cast<std::size_t>(y) * img.width;
        const int rowbox = (y / s) * bx;
        for (int x = 0; x < img.width; ++x)
            if (row[x]) hit[static_cast<std::size_t>(rowbox) + x / s] = 1;
    }
    return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
}

std::vector<int> default_box_sizes(int max_size) {
    std::vector<int> out;
    for (int s = 2; s <= max_size; s *= 2) out.push_back(s);
    return out;
}

void save_pbm(const Raster& img, const std::string& path, const std::string& comment) {
    std::ofstream out(path, std::ios::binary);
    require_input(out.good(), "cannot open '" + path + "' for writing");
    out << "P1\n";
    if (!comment.empty()) {
        require_input(comment.find('\n') == std::string::npos,
                      "pbm comment must be a single line");
        out << "# " << comment << "\n";
    }
    out << img.width << " " << img.height << "\n";
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out << (img.get(x, y) ? '1' : '0');
            out << (x + 1 == img.width ? '\n' : ' ');
        }
    }
    require_input(out.good(), "failed writing '" + path + "'");
}

Raster load_pbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require_input(in.good(), "cannot open raster file '" + path + "'");
    std::string magic;
    in >> magic;
    require_input(magic == "P1", "raster file '" + path + "' is not ascii PBM");
    // Header integers may be preceded by '#' comment lines.
    auto next_int = [&in]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return std::stoi(tok);
        }
        return 0;
    };
    const int w = next_int(), h = next_int();
    require_input(w > 0 && h > 0, "raster file '" + path + "' has bad dimensions");
    Raster img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int v = 0;
            in >> v;
            require_input(in.good() || in.eof(), "raster file '" + path + "' truncated");
            if (v) img.set(x, y);
        }
    return img;
}

} // namespace retina
