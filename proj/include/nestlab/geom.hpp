#pragma once

#include <complex>
#include <vector>

namespace nestlab {

using Complex = std::complex<double>;
using Polyline = std::vector<Complex>;  // closed curves repeat no point; closure implicit

// Winding number of a closed polyline around z (integer for z off the curve).
int winding_number(const Polyline& curve, Complex z);

// Distance from z to the polyline (treated as a closed curve).
double distance_to_polyline(const Polyline& curve, Complex z);

double polyline_diameter(const Polyline& curve);

struct BBox {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool contains(Complex z, double pad = 0) const {
        return z.real() >= xmin - pad && z.real() <= xmax + pad && z.imag() >= ymin - pad &&
               z.imag() <= ymax + pad;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};
BBox bounding_box(const Polyline& curve);

// Symmetric Hausdorff distance between finite point sets (grid-bucketed).
double hausdorff_distance(const std::vector<Complex>& A, const std::vector<Complex>& B);

// Points of a uniform nx x ny grid over the box that lie inside the closed
// curve (even-odd rule).
std::vector<Complex> grid_points_inside(const Polyline& curve, int nx, int ny);

// True if any two non-adjacent segments of the closed polyline intersect.
bool polyline_self_intersects(const Polyline& curve);

}  // namespace nestlab
