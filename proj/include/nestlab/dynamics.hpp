#pragma once

#include <optional>
#include <vector>

#include "nestlab/angle.hpp"
#include "nestlab/errors.hpp"
#include "nestlab/geom.hpp"

namespace nestlab {

inline constexpr double kEscapeRadius = 1e8;
// Potential height at which the Boettcher coordinate is machine-exact
// through the two-term asymptotic inverse.
inline constexpr double kTopPotential = 27.63102111592855;  // ln(1e12)

struct ComplexParam {
    Complex c;
    explicit ComplexParam(Complex v);
};

struct OrbitSegment {
    std::vector<Complex> points;  // f^0(0) .. f^n(0), truncated at escape
    bool escaped = false;
    int escape_index = -1;
};

struct RayTrace {
    RationalAngle angle;
    Polyline samples;                // ordered by decreasing potential
    std::vector<double> potentials;  // same length as samples
    std::optional<Complex> landing;
    double potential_floor = 0;

    // First sample at potential <= t (samples are sorted by decreasing t).
    Complex at_potential(double t) const;
    // Sub-polyline with potentials in [t_lo, t_hi], deepest first appended order.
    Polyline segment(double t_lo, double t_hi) const;
};

struct FixedPair {
    Complex alpha;
    Complex beta;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> rotation;  // p/q of alpha
};

OrbitSegment critical_orbit(const ComplexParam& c, int n);
// Same, with the parameter given as a decimal string evaluated in quad
// precision (deep orbits amplify parameter round-off).
OrbitSegment critical_orbit_hi(const std::string& c_decimal, int n);
__float128 parse_quad(const std::string& decimal);

// Forward orbit of an arbitrary point (no 0-start requirement).
std::vector<Complex> forward_orbit(Complex c, Complex z0, int n);

// Numerical Green's potential of z for f_c (0 when the orbit does not escape
// within max_iter).
double green_potential(Complex c, Complex z, int max_iter = 2048);

FixedPair fixed_points(const ComplexParam& c, bool verify_by_rays = false);

struct RayOptions {
    double target_potential = 1e-12;
    bool want_landing = true;
    int max_newton = 12;          // per continuation step
    double newton_tol = 1e-13;
    double landing_move_tol = 1e-10;
    int samples_per_halving = 8;
};

RayTrace trace_ray(const ComplexParam& c, const RationalAngle& angle,
                   const RayOptions& opt = {});

// Point on the equipotential of radius s (potential ln s) at external angle t.
Complex equipotential_point(const ComplexParam& c, double log_s, const RationalAngle& t);

// Closed equipotential curve of radius s sampled at n angles, ordered ccw by angle.
Polyline equipotential(const ComplexParam& c, double s, int n_samples);

// Landing point of the ray at a purely periodic angle, Newton-refined;
// residual of f^{period} fixed-point equation below 1e-11 on success.
std::optional<Complex> refine_landing(Complex c, Complex z0, unsigned preperiod,
                                      unsigned period);

// Continue the external ray through (x, potential t_from) upward to t_to.
// Only doubled angles enter the Newton targets, so the angle may be known
// just modulo a half turn; t_to must stay below kTopPotential/2.
std::optional<Complex> continue_ray_up(Complex c, Complex x, double t_from, double t_to,
                                       const RationalAngle& angle_mod_half);

// Julia set boundary samples by inverse iteration (deterministic seed).
std::vector<Complex> julia_boundary(Complex c, int n_points, unsigned seed = 12345);

// Filled-Julia sample: boundary points plus bounded-orbit grid points.
std::vector<Complex> filled_julia_sample(Complex c, int n_boundary, int grid_n,
                                         double box_radius = 2.0);

}  // namespace nestlab
