#pragma once

#include <optional>
#include <vector>

#include "nestlab/metrics.hpp"
#include "nestlab/nest.hpp"

namespace nestlab {

struct ParaRayTrace {
    RationalAngle angle;
    Polyline samples;
    std::vector<double> potentials;
    std::optional<Complex> landing;
    double potential_floor = 0;
};

struct WakeDescriptor {
    RationalAngle eta;              // p/q
    RationalAngle t_minus, t_plus;  // characteristic angles
    Complex root;                   // c_eta on the cardioid
};

enum class ParapieceRole { Plain, Paranest, AuxXi, AuxStar };

struct ParapieceDescriptor {
    int depth = 0;
    Footprint footprint;
    ParapieceRole role = ParapieceRole::Plain;
    int level = -1;  // paranest level for the aux/paranest roles
};

ParaRayTrace trace_param_ray(const RationalAngle& angle, double target_potential = 1e-10,
                             bool want_landing = true);

// Parameter-plane Boettcher point at the given potential and angle.
Complex param_bottcher_point(double potential, const RationalAngle& angle);

WakeDescriptor wake(std::uint64_t p, std::uint64_t q);

// Parapieces of the wake at the given depth: components of the truncated wake
// cut by the rays with angles in P_n(p/q).  Co-landing is detected from the
// traced ray tips.
std::vector<ParapieceDescriptor> parapiece(const WakeDescriptor& w, int depth,
                                           double tip_potential = 1e-8);

struct Paranest {
    std::vector<ParapieceDescriptor> delta;      // Delta^n per level
    std::vector<ParapieceDescriptor> xi;         // Xi^{n+1}
    std::vector<std::vector<ParapieceDescriptor>> star;  // Delta_*^{n+2} components
    std::vector<std::string> chain_violations;   // nesting chain failures
};

// The paranest around the parameter of a built nest: angle data for Delta^n,
// Xi^{n+1} and Delta_*^{n+2}, with the section 6 nesting chain verified
// combinatorially.
Paranest paranest(const NestSummary& nest, int levels);

// Sampled boundary of a parapiece: parametric rays at the footprint endpoint
// angles joined by equipotential arcs at the piece potential.
Polyline sample_parapiece_boundary(const ParapieceDescriptor& piece, int arc_samples = 24,
                                   double extra_depth = 1.0);

struct ParapieceShapeLevel {
    int level = 0;
    double hausdorff = 0;
    bool image_injective = true;
    int winding = 0;
};

// M_n image of a paranest piece boundary against the model Julia set:
// c -> alpha_{n-2} g_{n-1}(0)[c].
ParapieceShapeLevel parapiece_shape(const NestSummary& nest, const HyperbolicCenter& Q,
                                    int level, Complex alpha_rescale);

struct ParamoduliResult {
    GrowthSeries para;               // moduli of Delta^n \ Delta^{n+1}
    std::vector<double> dynamical;   // mod(V_0^n \ V_0^{n+1}) on the same levels
    std::vector<double> ratio;       // para / dynamical
};

ParamoduliResult paramoduli(const NestSummary& nest, int level_from, int level_to,
                            int grid = 128);

}  // namespace nestlab
