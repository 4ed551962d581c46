#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nestlab/laplace.hpp"
#include "nestlab/nest.hpp"
#include "nestlab/qrec.hpp"

namespace nestlab {

struct AnnulusSpec {
    Polyline outer, inner;
};

struct CapacityValue {
    double value = 0;
    Complex basepoint{};
    double error_estimate = 0;
};

// Conformal modulus, normalized so mod{1<|z|<r} = ln r.
double modulus(const AnnulusSpec& a, double* error_estimate = nullptr, int grid = 192);

// cap_z(U) = ln of the conformal radius of U seen from the basepoint.
CapacityValue capacity(const Polyline& boundary, Complex basepoint, int grid = 192);

// Closed capacity formula for a superattracting center of period m:
// -(m-1) ln 2 - sum ln|Q^j(0)|.
double cap0_formula(const HyperbolicCenter& Q);

// Numerical check that cap_inf(K_c) = 0: the Green's function satisfies
// G(z) - ln|z| -> 0; returns the measured value at |z| = R.
double cap_inf_estimate(Complex c, double R = 1e6);

// Largest real root of z^m - (z^{m-1} + ... + 1)/2; exactly 1 at m = 2.
double kappa(int m);

struct GrowthSeries {
    std::vector<double> values;         // mu_n (or x_n)
    std::vector<double> per_level_gap;  // successive differences
    std::vector<double> per_level_ratio;
    double slope = 0, intercept = 0, slope_residual = 0;  // least squares fit
    double lyubich_B = 0, lyubich_C = 0;                  // fit vs kappa-counts
};

// x_{n+m} = (x_{n+m-1} + ... + x_n)/2 + eps, reporting x_n/n for m = 2 and
// x_{n+1}/x_n otherwise.
GrowthSeries simulate_recursion(int m, double eps, int n,
                                const std::vector<double>& seeds = {});

// Boundary of the immediate basin of 0 of a superattracting center, via the
// Boettcher parametrization of Q^m on the component (dyadic refinement).
Polyline superattracting_component_boundary(const HyperbolicCenter& Q, int points = 4096);

struct ShapeLevel {
    int level = 0;
    Complex rescale = 0;       // alpha_n
    Complex s_value = 0;       // the alpha-analog point used for the rescale
    double hausdorff = 0;      // rescaled piece vs sampled K_Q
    double c0 = 0;             // sup |G_n - Q| on the grid
    double c1 = 0;             // sup finite-difference |G_n' - Q'|
    double g0_gap = 0;         // |G_n(0) - Q(0)|
    double frame_hausdorff = -1;
};

struct ShapeReport {
    std::vector<ShapeLevel> levels;
    std::vector<Complex> reference;  // sampled K_Q used
};

ShapeReport shape_convergence(const NestSummary& nest, const HyperbolicCenter& Q,
                              int level_from, int level_to, int grid_n = 33,
                              bool include_frames = false);

struct GrotzschResult {
    double mod_outer = 0;   // mod(V \ U)
    double mod_inner = 0;   // mod(K \ U)
    double mod_ring = 0;    // mod(V \ K)
    double deficit = 0;     // mod_outer - mod_inner - mod_ring
};
// 0 in U subset int_0 K subset V; K given by its outer boundary and the
// boundary of its zero-component.
GrotzschResult grotzsch_check(const Polyline& u_boundary, const Polyline& k_outer,
                              const Polyline& k_inner_component, const Polyline& v_boundary,
                              int grid = 192);

struct KoebeResult {
    double distortion = 1;
    double bound = 1;
    bool bound_ok = true;
};
// Distortion of a univalent map sampled on a grid over U against the Koebe
// bound 1 + C0 * exp(-mod).
KoebeResult koebe_check(const std::vector<Complex>& grid_pts,
                        const std::vector<Complex>& images, double grid_h, double mod,
                        double C0 = 24.0);

// Principal annuli moduli mu_n = mod(V_0^{n-1} \ V_0^n).
GrowthSeries measured_moduli(const NestSummary& nest, int level_from, int level_to,
                             int grid = 160);

}  // namespace nestlab
