#include "nestlab/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace nestlab {

int winding_number(const Polyline& curve, Complex z) {
    // crossing-count form, robust away from the curve
    int wn = 0;
    size_t n = curve.size();
    for (size_t i = 0; i < n; ++i) {
        const Complex& p = curve[i];
        const Complex& q = curve[(i + 1) % n];
        if (p.imag() <= z.imag()) {
            if (q.imag() > z.imag()) {
                double cross = (q.real() - p.real()) * (z.imag() - p.imag()) -
                               (z.real() - p.real()) * (q.imag() - p.imag());
                if (cross > 0) ++wn;
            }
        } else if (q.imag() <= z.imag()) {
            double cross = (q.real() - p.real()) * (z.imag() - p.imag()) -
                           (z.real() - p.real()) * (q.imag() - p.imag());
            if (cross < 0) --wn;
        }
    }
    return wn;
}

static double dist_point_segment(Complex z, Complex a, Complex b) {
    Complex ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0) return std::abs(z - a);
    double t = ((z.real() - a.real()) * ab.real() + (z.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

double distance_to_polyline(const Polyline& curve, Complex z) {
    double d = std::numeric_limits<double>::infinity();
    size_t n = curve.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, dist_point_segment(z, curve[i], curve[(i + 1) % n]));
    return d;
}

double polyline_diameter(const Polyline& curve) {
    BBox b = bounding_box(curve);
    return std::hypot(b.width(), b.height());
}

BBox bounding_box(const Polyline& curve) {
    BBox b;
    if (curve.empty()) return b;
    b.xmin = b.xmax = curve[0].real();
    b.ymin = b.ymax = curve[0].imag();
    for (const Complex& z : curve) {
        b.xmin = std::min(b.xmin, z.real());
        b.xmax = std::max(b.xmax, z.real());
        b.ymin = std::min(b.ymin, z.imag());
        b.ymax = std::max(b.ymax, z.imag());
    }
    return b;
}

namespace {
struct PointGrid {
    double x0, y0, cell;
    int nx, ny;
    std::unordered_map<long long, std::vector<Complex>> buckets;

    PointGrid(const std::vector<Complex>& pts, double cell_size) : cell(cell_size) {
        x0 = pts[0].real();
        y0 = pts[0].imag();
        for (const auto& p : pts) {
            x0 = std::min(x0, p.real());
            y0 = std::min(y0, p.imag());
        }
        for (const auto& p : pts) buckets[key_of(p)].push_back(p);
    }
    long long key_of(Complex p) const {
        long long ix = (long long)std::floor((p.real() - x0) / cell);
        long long iy = (long long)std::floor((p.imag() - y0) / cell);
        return ix * 2000003LL + iy;
    }
    double nearest(Complex q, double upper) const {
        long long ix = (long long)std::floor((q.real() - x0) / cell);
        long long iy = (long long)std::floor((q.imag() - y0) / cell);
        double best = upper;
        int r = 1;
        while (true) {
            double cand = best;
            for (long long dx = -r; dx <= r; ++dx)
                for (long long dy = -r; dy <= r; ++dy) {
                    auto it = buckets.find((ix + dx) * 2000003LL + (iy + dy));
                    if (it == buckets.end()) continue;
                    for (const auto& p : it->second) cand = std::min(cand, std::abs(p - q));
                }
            best = cand;
            if (best <= (r - 1) * cell || r * cell > upper + cell) return best;
            ++r;
        }
    }
};
}  // namespace

double hausdorff_distance(const std::vector<Complex>& A, const std::vector<Complex>& B) {
    if (A.empty() || B.empty()) return std::numeric_limits<double>::infinity();
    auto one_sided = [](const std::vector<Complex>& X, const std::vector<Complex>& Y) {
        BBox bx, by;
        double diam = 0;
        for (const auto& p : Y) diam = std::max(diam, std::abs(p - Y[0]));
        double cell = std::max(1e-12, diam / std::max(8.0, std::sqrt((double)Y.size())));
        PointGrid grid(Y, cell);
        double h = 0;
        for (const auto& x : X) {
            double d = grid.nearest(x, std::numeric_limits<double>::infinity());
            h = std::max(h, d);
        }
        (void)bx;
        (void)by;
        return h;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

std::vector<Complex> grid_points_inside(const Polyline& curve, int nx, int ny) {
    std::vector<Complex> out;
    BBox b = bounding_box(curve);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            Complex z(b.xmin + (i + 0.5) * b.width() / nx, b.ymin + (j + 0.5) * b.height() / ny);
            if (winding_number(curve, z) != 0) out.push_back(z);
        }
    return out;
}

static bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
    auto orient = [](Complex p, Complex q, Complex r) {
        double v = (q.real() - p.real()) * (r.imag() - p.imag()) -
                   (q.imag() - p.imag()) * (r.real() - p.real());
        return (v > 0) - (v < 0);
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4;
}

bool polyline_self_intersects(const Polyline& curve) {
    size_t n = curve.size();
    if (n < 4) return false;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
            if (segments_intersect(curve[i], curve[(i + 1) % n], curve[j], curve[(j + 1) % n]))
                return true;
        }
    }
    return false;
}

}  // namespace nestlab
