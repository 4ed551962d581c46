#include "nestlab/render.hpp"

#include <cstdio>
#include <fstream>

#include "nestlab/errors.hpp"

namespace nestlab {

Canvas::Canvas(int w, int h, std::uint32_t bg) : w_(w), h_(h), pix_(3 * w * h) {
    for (int i = 0; i < w * h; ++i) {
        pix_[3 * i] = (bg >> 16) & 0xff;
        pix_[3 * i + 1] = (bg >> 8) & 0xff;
        pix_[3 * i + 2] = bg & 0xff;
    }
}

void Canvas::set_window(double xmin, double xmax, double ymin, double ymax) {
    xmin_ = xmin;
    xmax_ = xmax;
    ymin_ = ymin;
    ymax_ = ymax;
}

void Canvas::put(int x, int y, std::uint32_t rgb) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    int i = (y * w_ + x) * 3;
    pix_[i] = (rgb >> 16) & 0xff;
    pix_[i + 1] = (rgb >> 8) & 0xff;
    pix_[i + 2] = rgb & 0xff;
}

void Canvas::line(double x0, double y0, double x1, double y1, std::uint32_t rgb) {
    double dx = x1 - x0, dy = y1 - y0;
    int steps = (int)(std::max(std::abs(dx), std::abs(dy))) + 1;
    for (int s = 0; s <= steps; ++s) {
        double t = (double)s / steps;
        put((int)std::lround(x0 + t * dx), (int)std::lround(y0 + t * dy), rgb);
    }
}

void Canvas::draw_polyline(const Polyline& pts, std::uint32_t rgb, bool closed) {
    auto tx = [&](Complex z) {
        return std::pair<double, double>{(z.real() - xmin_) / (xmax_ - xmin_) * (w_ - 1),
                                         (ymax_ - z.imag()) / (ymax_ - ymin_) * (h_ - 1)};
    };
    size_t n = pts.size();
    for (size_t i = 0; i + 1 < n + (closed ? 1 : 0); ++i) {
        auto [x0, y0] = tx(pts[i % n]);
        auto [x1, y1] = tx(pts[(i + 1) % n]);
        line(x0, y0, x1, y1, rgb);
    }
}

void Canvas::draw_points(const std::vector<Complex>& pts, std::uint32_t rgb) {
    for (const auto& z : pts) {
        double x = (z.real() - xmin_) / (xmax_ - xmin_) * (w_ - 1);
        double y = (ymax_ - z.imag()) / (ymax_ - ymin_) * (h_ - 1);
        put((int)std::lround(x), (int)std::lround(y), rgb);
    }
}

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const std::uint8_t* p, size_t n) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    crc ^= 0xffffffffu;
    for (size_t i = 0; i < n; ++i) crc = table[(crc ^ p[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back((x >> 24) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back(x & 0xff);
}

void png_chunk(std::ofstream& os, const char type[4], const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> hdr;
    put_be32(hdr, (std::uint32_t)data.size());
    os.write((const char*)hdr.data(), 4);
    std::vector<std::uint8_t> td(type, type + 4);
    td.insert(td.end(), data.begin(), data.end());
    std::uint32_t crc = crc32_update(0, td.data(), td.size());
    os.write((const char*)type, 4);
    os.write((const char*)data.data(), (std::streamsize)data.size());
    std::vector<std::uint8_t> c;
    put_be32(c, crc);
    os.write((const char*)c.data(), 4);
}

}  // namespace

void Canvas::write_png(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(Err::InvalidArgument, "cannot open " + path);
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    os.write((const char*)sig, 8);
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, (std::uint32_t)w_);
    put_be32(ihdr, (std::uint32_t)h_);
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // rgb
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    png_chunk(os, "IHDR", ihdr);

    // raw scanlines with filter byte 0
    std::vector<std::uint8_t> raw;
    raw.reserve((size_t)h_ * (w_ * 3 + 1));
    for (int y = 0; y < h_; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), pix_.begin() + (size_t)y * w_ * 3,
                   pix_.begin() + (size_t)(y + 1) * w_ * 3);
    }
    // zlib stream with stored deflate blocks
    std::vector<std::uint8_t> z;
    z.push_back(0x78);
    z.push_back(0x01);
    size_t pos = 0;
    while (pos < raw.size()) {
        size_t n = std::min<size_t>(65535, raw.size() - pos);
        bool last = pos + n == raw.size();
        z.push_back(last ? 1 : 0);
        z.push_back(n & 0xff);
        z.push_back((n >> 8) & 0xff);
        z.push_back(~n & 0xff);
        z.push_back((~n >> 8) & 0xff);
        z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + n);
        pos += n;
    }
    // adler32
    std::uint32_t a = 1, b = 0;
    for (std::uint8_t byte : raw) {
        a = (a + byte) % 65521;
        b = (b + a) % 65521;
    }
    put_be32(z, (b << 16) | a);
    png_chunk(os, "IDAT", z);
    png_chunk(os, "IEND", {});
}

SvgWriter::SvgWriter(double xmin, double xmax, double ymin, double ymax, int px)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), px_(px) {}

void SvgWriter::add_polyline(const Polyline& pts, const std::string& color, double width,
                             bool closed) {
    if (pts.empty()) return;
    double sx = px_ / (xmax_ - xmin_);
    std::string d = "M";
    char buf[64];
    for (const auto& z : pts) {
        snprintf(buf, sizeof buf, " %.2f %.2f", (z.real() - xmin_) * sx,
                 (ymax_ - z.imag()) * sx);
        d += buf;
        d += " L";
    }
    d.resize(d.size() - 2);
    if (closed) d += " Z";
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             std::to_string(width) + "\"/>\n";
}

void SvgWriter::add_points(const std::vector<Complex>& pts, const std::string& color,
                           double radius) {
    double sx = px_ / (xmax_ - xmin_);
    char buf[128];
    for (const auto& z : pts) {
        snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\"/>\n",
                 (z.real() - xmin_) * sx, (ymax_ - z.imag()) * sx, radius, color.c_str());
        body_ += buf;
    }
}

void SvgWriter::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error(Err::InvalidArgument, "cannot open " + path);
    double sy = px_ * (ymax_ - ymin_) / (xmax_ - xmin_);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_ << "\" height=\""
       << (int)sy << "\" viewBox=\"0 0 " << px_ << " " << (int)sy << "\">\n"
       << body_ << "</svg>\n";
}

}  // namespace nestlab
