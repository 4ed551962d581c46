#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nestlab/geom.hpp"

namespace nestlab {

// Minimal raster canvas with PNG (stored-deflate) and SVG writers.
class Canvas {
public:
    Canvas(int w, int h, std::uint32_t rgb_background = 0xffffff);

    int width() const { return w_; }
    int height() const { return h_; }

    // world window mapped onto the canvas
    void set_window(double xmin, double xmax, double ymin, double ymax);
    void draw_polyline(const Polyline& pts, std::uint32_t rgb, bool closed = true);
    void draw_points(const std::vector<Complex>& pts, std::uint32_t rgb);
    void write_png(const std::string& path) const;

private:
    void put(int x, int y, std::uint32_t rgb);
    void line(double x0, double y0, double x1, double y1, std::uint32_t rgb);
    int w_, h_;
    double xmin_ = -2, xmax_ = 2, ymin_ = -2, ymax_ = 2;
    std::vector<std::uint8_t> pix_;  // rgb triples
};

// SVG writer for polylines and point clouds.
class SvgWriter {
public:
    SvgWriter(double xmin, double xmax, double ymin, double ymax, int px = 900);
    void add_polyline(const Polyline& pts, const std::string& color, double width = 1.0,
                      bool closed = true);
    void add_points(const std::vector<Complex>& pts, const std::string& color,
                    double radius = 0.6);
    void write(const std::string& path) const;

private:
    double xmin_, xmax_, ymin_, ymax_;
    int px_;
    std::string body_;
};

}  // namespace nestlab
