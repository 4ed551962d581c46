#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nestlab/bigint.hpp"

namespace nestlab {

// Exact rational angle in [0,1).  Internally num/(2^e * d) with d odd,
// fully reduced, so doubling, halving and half-turns never leave the
// representable set.  All puzzle combinatorics run on these; no floats.
class RationalAngle {
public:
    RationalAngle() : e_(0), d_(1) {}  // angle 0
    RationalAngle(std::uint64_t num, std::uint64_t den);
    static RationalAngle from_parts(BigUint num, unsigned e, std::uint64_t d_odd);

    // theta -> 2 theta (mod 1)
    RationalAngle doubled() const;
    // theta -> theta/2 and theta/2 + 1/2
    RationalAngle halved() const;
    RationalAngle half_turn() const;  // theta + 1/2 (mod 1)
    RationalAngle conjugate() const;  // 1 - theta (mod 1)

    bool operator==(const RationalAngle& o) const;
    bool operator!=(const RationalAngle& o) const { return !(*this == o); }
    // Linear order on [0,1).
    static int cmp(const RationalAngle& a, const RationalAngle& b);
    bool operator<(const RationalAngle& o) const { return cmp(*this, o) < 0; }

    // True if this lies in the open ccw arc (a, b); arcs wrap modulo 1.
    bool in_arc(const RationalAngle& a, const RationalAngle& b) const;

    double to_double() const;
    std::string str() const;  // "num/den"

    const BigUint& num() const { return a_; }
    unsigned den_pow2() const { return e_; }
    std::uint64_t den_odd() const { return d_; }
    BigUint den() const { return BigUint(d_) << e_; }
    bool is_zero() const { return a_.is_zero(); }

    // Period and preperiod under doubling (binary expansion structure).
    // preperiod = e, period = multiplicative order of 2 mod d.
    unsigned preperiod() const { return e_; }
    unsigned period() const;

    size_t hash() const;

private:
    void normalize();
    BigUint a_;        // numerator
    unsigned e_ = 0;   // power of two in denominator
    std::uint64_t d_;  // odd part of denominator
};

// Half-open ccw arc [a, b) on the circle; a == b is not allowed.
struct AngleInterval {
    RationalAngle a, b;
    bool contains(const RationalAngle& t) const;
    bool contains_closed(const RationalAngle& t) const;
    double length() const;
};

// Finite union of disjoint ccw arcs with rational endpoints, kept sorted
// by start angle.  Encodes which equipotential arcs belong to a puzzle
// piece ("footprint"); equality of footprints is equality of pieces.
class Footprint {
public:
    Footprint() = default;
    explicit Footprint(std::vector<AngleInterval> ivs);

    const std::vector<AngleInterval>& intervals() const { return ivs_; }
    bool empty() const { return ivs_.empty(); }
    size_t size() const { return ivs_.size(); }

    bool operator==(const Footprint& o) const;

    bool contains_angle(const RationalAngle& t) const;
    bool contains_angle_closed(const RationalAngle& t) const;
    // Set containment (this subseteq o), exact.
    bool subset_of(const Footprint& o) const;
    bool disjoint_from(const Footprint& o) const;

    // {t : 2t in this}: the full doubling preimage (antipodally symmetric).
    Footprint preimage() const;
    // {2t : t in this}: forward image; valid when intervals are short (<1/2).
    Footprint image() const;
    Footprint half_turned() const;
    bool is_symmetric() const;  // invariant under half turn

    double measure() const;
    // All interval endpoints in circular order.
    std::vector<RationalAngle> endpoints() const;

    size_t hash() const;
    std::string str() const;

private:
    void sort_and_check();
    std::vector<AngleInterval> ivs_;
};

// Halved copy of a ccw interval starting at a/2 (the other copy is its
// half turn).
AngleInterval halve_interval(const AngleInterval& iv);

// The unique q-cycle of angle doubling with combinatorial rotation
// number p/q, via the Sturmian binary word; exact.
std::vector<RationalAngle> rotation_cycle(std::uint64_t p, std::uint64_t q);

// Rotation number of a doubling-invariant cycle given as a set of angles,
// or nullopt if the cycle is not a circular rotation.  Brute-force helper
// (used by tests as the independent oracle and by limb detection).
std::optional<std::pair<std::uint64_t, std::uint64_t>> cycle_rotation_number(
    std::vector<RationalAngle> cycle);

}  // namespace nestlab
