#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nestlab/nest.hpp"

namespace nestlab {

// Center of a hyperbolic component: superattracting parameter with its
// critical cycle.
struct HyperbolicCenter {
    Complex c;
    int period = 0;
    std::vector<Complex> cycle;  // z_0 = 0, z_1 = c, ..., z_{m-1}
    std::uint64_t p = 0, q = 0;  // rotation number of alpha
};

// Newton-polishes an approximate center to f_c^m(0) = 0 and fills the cycle.
HyperbolicCenter make_center(Complex approx, int period);

// Label sequence of the puzzle of Q via the doubling construction, with the
// orientation canon that the critical value vertex starts with 'L'.
// Also reports the isolation depth: the least depth at which the puzzle
// separates the critical cycle into distinct pieces.
struct QLabelData {
    LabelSequence seq;
    int isolation_depth = -1;
    std::vector<std::vector<int>> cycle_piece;  // per depth: piece index of z_j
    Puzzle puzzle;
    std::vector<std::vector<LabelChain>> labels;  // per depth: label per piece
};
QLabelData q_label_sequence(const HyperbolicCenter& Q, int depth);

struct QRecurrenceReport {
    int checked_from = 0, checked_to = 0;
    std::vector<int> pieces_per_level;
    std::vector<bool> composition_ok;       // return-time identity per level
    std::vector<bool> sigma_ok;             // label sequence match (mod flips)
    std::vector<bool> itinerary_ok;
    std::optional<std::pair<int, std::string>> first_violation;
    int isolation_depth = -1;
    bool recurrent(int levels_required) const;
};

QRecurrenceReport is_q_recurrent(const NestSummary& nest, const HyperbolicCenter& Q,
                                 int levels);

struct FibonacciCheck {
    bool is_fibonacci = false;
    std::vector<std::string> detail;
};
FibonacciCheck fibonacci_check(const NestSummary& nest);

// Meta-Chebyshev kneading sequence: symbols, check marks and the epsilon
// sign sequence, with the admissibility verdict.
struct KneadingSequence {
    std::string symbols;           // 'L' / 'R'
    std::vector<bool> checked;     // check marks per position
    std::string epsilon;           // '+' / '-'
    bool admissible = false;
    int max_plus_run = 0;
    std::string marked() const;  // "LR!R!..." with '!' after checked symbols
};
KneadingSequence meta_chebyshev(int length);

// Admissibility of a +/- sequence: for each m, the least i with
// eps_{m+i} != eps_m * eps_i has eps_i = '-'.
bool epsilon_admissible(const std::string& eps, int* max_plus_run = nullptr);

// Kneading sequence of the real parameter c (symbols of f^j(0), j >= 1).
std::string real_kneading(double c, int length);

// Closest-return times of the critical orbit (iterates where |f^j(0)| sets a
// new minimum), computed on a quad-precision orbit.  For combinatorially
// recurrent maps these are the first-return times of the principal nest from
// the escape level on.
std::vector<long> closest_return_times(const std::string& c_decimal, long budget,
                                       long skip_through = 3);

// Real-slice bisection for a target kneading sequence on [-2, -1].
struct RealParamResult {
    double c = 0;
    double width = 0;                // final bracket width
    std::string c_decimal;           // quad-refined decimal (30 digits)
};
RealParamResult find_real_parameter(const std::string& target_kneading, double tolerance,
                                    double lo = -2.0, double hi = -1.0);

// Fibonacci kneading target of the given length (cutting times at the
// Fibonacci numbers).
std::string fibonacci_kneading(int length);

// Parameter steering: nested parapiece refinement along an admissible label
// sequence with explicit orientation choices.
struct SteerResult {
    Complex center;                  // center estimate of the deepest parapiece
    double diameter = 0;             // diameter bound of that parapiece
    int levels_done = 0;
    std::vector<Footprint> parapieces;  // angle data per level (wake coordinates)
    std::string note;
};
SteerResult steer_complex_parameter(const HyperbolicCenter& Q,
                                    const std::vector<int>& orientations, int levels,
                                    std::optional<Complex> seed = std::nullopt,
                                    long iterate_budget = 20000);

}  // namespace nestlab
