#pragma once

#include "retina/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace retina {

// Binary image, row-major, 0 = background.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Raster() = default;
    Raster(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    bool get(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            data[static_cast<std::size_t>(y) * width + x] = 1;
    }
    std::size_t count() const;
    bool empty_foreground() const { return count() == 0; }
};

// 1-pixel Bresenham stroke between endpoints (inclusive).
void draw_line(Raster& img, int x0, int y0, int x1, int y1);

void draw_polyline(Raster& img, const std::vector<Point2>& pts, double scale, Point2 offset);

// Number of side-`s` grid boxes (anchored at the image origin) containing at
// least one foreground pixel.
std::size_t box_count(const Raster& img, int s);

// Geometric ladder of box sizes {2, 4, ..., max_size}.
std::vector<int> default_box_sizes(int max_size = 256);

// PBM (P1) round trip, used for fixture files. An optional single-line
// comment is written as a '#' header line.
void save_pbm(const Raster& img, const std::string& path, const std::string& comment = "");
Raster load_pbm(const std::string& path);

} // namespace retina
