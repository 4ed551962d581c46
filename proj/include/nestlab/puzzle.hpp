#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nestlab/angle.hpp"
#include "nestlab/dynamics.hpp"
#include "nestlab/errors.hpp"
#include "nestlab/geom.hpp"

namespace nestlab {

// Combinatorial identity of a puzzle piece: equipotential depth plus the
// exact set of equipotential arcs on its boundary.  Equality of descriptor
// data is equality of pieces; all containment logic runs on the footprint.
struct PieceDescriptor {
    int depth = 0;  // boundary equipotential has potential ln2 * 2^-depth
    Footprint footprint;
    std::string center_address;  // branch bits of the center's preimage path

    bool same_as(const PieceDescriptor& o) const {
        return depth == o.depth && footprint == o.footprint;
    }
    bool is_central() const { return footprint.is_symmetric(); }
    double potential_level() const { return std::ldexp(M_LN2, -depth); }
};

// Boundary point provenance: which footprint interval an equipotential arc
// sample belongs to, or ray / landing marker.
enum : int { kTagRay = -1, kTagLanding = -2 };

struct TaggedCurve {
    Polyline pts;
    std::vector<int> tags;  // >=0 arc over footprint interval index
    size_t size() const { return pts.size(); }
};

// A sampled piece: exact combinatorics plus numeric boundary, an interior
// marker point, and one fully traced boundary ray (the witness) used to
// resolve angle halving when the piece is pulled back.
struct Corner {
    Complex pt;                                // landing point on the boundary
    std::vector<RationalAngle> touching;       // endpoints of the adjacent arcs
};

struct PieceGeo {
    PieceDescriptor desc;
    TaggedCurve boundary;
    Complex center{};
    RationalAngle witness_angle;
    Polyline witness_pts;             // ordered by decreasing potential
    std::vector<double> witness_pot;  // parallel to witness_pts
    std::vector<Corner> corners;      // landing corners with exact angle data

    bool contains(Complex z) const { return winding_number(boundary.pts, z) != 0; }
    double boundary_distance(Complex z) const { return distance_to_polyline(boundary.pts, z); }
    double diameter() const { return polyline_diameter(boundary.pts); }
};

struct PuzzleOptions {
    int arc_samples = 64;       // samples per bounding arc at construction
    int max_curve_points = 24000;
    double colanding_tol = 1e-8;
    int escape_check_iterates = 4096;
};

// Full puzzle of a parameter in the p/q limb, all pieces per depth.
struct Puzzle {
    Complex c;
    std::uint64_t p = 0, q = 0;
    FixedPair fixed;
    PuzzleOptions opt;
    std::vector<std::vector<PieceGeo>> levels;
    std::vector<int> critical_index;  // per depth: piece containing 0
    std::vector<int> cv_index;        // per depth: piece containing c

    // Index of the depth-n piece containing z; throws OnBoundary / Outside.
    int piece_index_at(int depth, Complex z, double boundary_tol = 1e-9) const;
    const PieceGeo& piece_at(int depth, Complex z) const {
        return levels[depth][piece_index_at(depth, z)];
    }

    // Depth-1 renaming: y_index[j] / z_index[j] give the piece indices of
    // Y_j (j=1..q-1, around alpha) and Z_j (j=1..q-1, around -alpha).
    std::vector<int> y_index, z_index;
};

Puzzle build_puzzle(const ComplexParam& c, std::uint64_t p, std::uint64_t q, int max_depth,
                    const PuzzleOptions& opt = {});

// Image of a piece under f: footprint doubling, one depth shallower.
PieceDescriptor image_piece(const PieceDescriptor& d);

struct MarkovReport {
    std::vector<std::string> violations;
    int pieces_checked = 0;
    bool ok() const { return violations.empty(); }
};
MarkovReport markov_check(const Puzzle& puz);

// ---------------------------------------------------------------------------
// Pullback engine

class PullbackContext {
public:
    PullbackContext(Complex c, const PuzzleOptions& opt);

    Complex c() const { return c_; }
    const PuzzleOptions& options() const { return opt_; }
    bool real_param() const { return c_.imag() == 0.0; }

    // Shallow trace of the ray at `angle` down to `floor` (cached).
    const RayTrace& shallow_ray(const RationalAngle& angle, double floor = 1.0);

private:
    Complex c_;
    PuzzleOptions opt_;
    std::map<size_t, RayTrace> ray_cache_;
};

// All components of f^{-1}(src): one piece (2-to-1, when c inside src) or
// two (conformal).  Footprint splits are exact; each output carries its
// re-matched witness.  A `constraint` footprint of a known piece regionally
// containing one component accelerates the split (a piece disjoint from its
// half turn decides every antipodal pair); without it the witness seed,
// corner propagation and upward ray continuation settle the split.
std::vector<PieceGeo> pullback_step(PullbackContext& ctx, const PieceGeo& src,
                                    const Footprint* constraint = nullptr);

// Pull `src` back along orbit z_0..z_m (f(z_j) = z_{j+1}, z_m in src),
// keeping at each step the component containing the orbit point.  When
// `intermediates` is given it receives the footprints of f^j(result),
// j = m..0 (index j holds the step-j region).
// `locator(step, z)` may return the footprint of a known non-central piece
// containing z strictly (used as the split constraint at that step).
using ConstraintLocator = std::function<const Footprint*(size_t step, Complex z)>;
PieceGeo pullback_along_orbit(PullbackContext& ctx, const PieceGeo& src,
                              const std::vector<Complex>& orbit,
                              std::vector<Footprint>* intermediates = nullptr,
                              const ConstraintLocator& locator = nullptr);

// Slaved pullback: pulls each cell back along the same orbit as a master
// chain whose intermediate footprints are supplied.  Univalent steps keep
// the component inside the master region; if the final step is 2-to-1
// (master footprint symmetric) both components are kept.
struct SlavedCell {
    int source_index;
    PieceGeo geo;
};
std::vector<SlavedCell> pullback_cells_along_orbit(
    PullbackContext& ctx, const std::vector<PieceGeo>& cells,
    const std::vector<Complex>& orbit, const std::vector<Footprint>& master_intermediates,
    const PieceGeo& master_result);

}  // namespace nestlab
