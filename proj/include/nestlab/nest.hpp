#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nestlab/graphs.hpp"
#include "nestlab/puzzle.hpp"

namespace nestlab {

struct GqlMapDescriptor {
    int level = 0;            // n of g_{n,k}
    int index = 0;            // k (0 = central)
    long iterate_count = 0;   // r_{n,k}
    int degree = 1;           // 2 iff k = 0
    PieceDescriptor domain;   // V_k^n
    PieceDescriptor codomain; // V_0^{n-1}
};

struct NestLevel {
    int level = 0;                  // n
    PieceGeo central;               // V_0^n
    std::vector<PieceGeo> laterals; // V_1^n.., ordered by first visit
    std::vector<long> lateral_entry;  // first-visit iterate per lateral
    std::vector<long> lateral_return; // r_{n,k} per lateral (k = 1..)
    long return_time = 0;           // ell_n: first return time to V_0^{n-1}
    bool central_return = false;    // ell_{n} == ell_{n-1}
    std::vector<Footprint> chain;   // footprints of f^j(V_0^n), j = 0..ell_n
    std::vector<std::vector<Footprint>> lateral_chains;  // per lateral
    std::vector<GqlMapDescriptor> gql;
};

struct FrameCell {
    PieceGeo geo;
    LabelChain label;
    int source_cell = -1;  // index in the previous frame (central frames)
    bool is_central = false;
};

struct Frame {
    int level = 0;       // t of F_t
    int host_level = 0;  // cells live inside V_0^{host_level-?}; informational
    int host_index = 0;  // 0 = central frame F_t, k >= 1 = F_{t,k}
    std::vector<FrameCell> cells;
    Complex s_point{};     // the frame point corresponding to alpha of the model
    RationalAngle s_angle; // a boundary-ray angle landing at s
    int s_host = -1;       // a cell whose boundary carries the s corner
    int central_cell = -1;

    int cell_containing(const Footprint& fp) const;  // exact, -1 if none
    int cell_containing_point(Complex z) const;
};

struct Itinerary {
    // (piece index k_i at level n-1, cell label lambda_{n+1,k_i})
    std::vector<std::pair<int, LabelChain>> pairs;
    std::vector<std::string> admissibility_violations;
    bool admissible() const { return admissibility_violations.empty(); }
};

struct NestOptions {
    int max_level = 8;
    long iterate_budget = 10000;
    int max_escape_k = 64;
    int shallow_depth = 6;
    int renorm_window = 8;   // ell constant this long => RenormalizationDetected
    int max_frame_level = 12;
    // laterals are created only for first visits before cap_a * ell + cap_b
    // (orbit combinatorics degrade with iterate count at finite precision)
    long lateral_cap_a = 2;
    long lateral_cap_b = 64;
    // optional high-precision decimal for c; the critical orbit recursion
    // runs on it (combinatorial fidelity at deep iterates needs more than
    // double precision in the parameter)
    std::string c_decimal;
    bool build_lateral_frames = true;
    PuzzleOptions puzzle;
};

struct NestSummary {
    Complex c;
    std::uint64_t p = 0, q = 0;
    long kq = 0;        // first escape time
    int nu = 0;         // escape cell index (dynamical Z_nu)
    long lambda = 0;    // first return to a cell of F_1
    std::vector<NestLevel> levels;
    std::vector<Frame> frames;                      // F_0..F_T (central)
    std::vector<std::vector<Frame>> lateral_frames; // per frame level t: F_{t,k}
    std::vector<LabelChain> sigmas;                 // sigma_0, sigma_1, ...
    std::string stop_reason;
    std::vector<std::string> warnings;
    Puzzle shallow;

    long ell(int n) const { return levels.at(n).return_time; }
    int kappa_count(int n) const;  // non-central levels up to n
    // depth bookkeeping: depth(V_0^n) = kq + 1 + sum ell
    int depth_of_level(int n) const;
};

// Least k with f^{kq}(0) in a Z cell; (k, nu).
std::pair<long, int> first_escape(const Puzzle& puz, long max_k);

NestSummary build_nest(const ComplexParam& c, std::uint64_t p, std::uint64_t q,
                       const NestOptions& opt = {});

// Frames are built inside build_nest; this recomputes itineraries on demand.
Itinerary itinerary(const NestSummary& nest, int level, int index);

}  // namespace nestlab
