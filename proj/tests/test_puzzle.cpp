#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nestlab/puzzle.hpp"

using namespace nestlab;

TEST_CASE("basilica depth 0: two pieces split by rays 1/3, 2/3") {
    Puzzle puz = build_puzzle(ComplexParam(Complex(-1, 0)), 1, 2, 0);
    REQUIRE(puz.levels.size() == 1);
    REQUIRE(puz.levels[0].size() == 2);
    // critical piece first; contains 0 and beta
    CHECK(puz.levels[0][0].contains(Complex(0, 0)));
    CHECK(puz.levels[0][0].contains(puz.fixed.beta * 0.98));
    // other piece contains the critical value
    CHECK(puz.levels[0][1].contains(Complex(-1, 0)));
    CHECK(puz.cv_index[0] == 1);
    // footprints: critical piece owns the arc through angle 0
    CHECK(puz.levels[0][0].desc.footprint.contains_angle(RationalAngle(0, 1)));
    CHECK(puz.levels[0][1].desc.footprint.contains_angle(RationalAngle(1, 2)));
}

TEST_CASE("depth-1 piece count is 2q-1 and footprints partition the circle") {
    // q=2 at a Fibonacci-like real parameter, q=3 at the rabbit
    struct CaseT {
        Complex c;
        std::uint64_t p, q;
    };
    for (CaseT cs : {CaseT{Complex(-1.8705286321, 0), 1, 2},
                     CaseT{Complex(-0.122561166876654, 0.744861766619744), 1, 3}}) {
        Puzzle puz = build_puzzle(ComplexParam(cs.c), cs.p, cs.q, 3);
        REQUIRE(puz.levels[1].size() == 2 * cs.q - 1);
        // piece counts: |P_n| = 2^n (q-1) + 1
        for (size_t d = 0; d < puz.levels.size(); ++d) {
            CHECK(puz.levels[d].size() == (1ull << d) * (cs.q - 1) + 1);
            // footprints tile the whole circle
            double total = 0;
            for (const auto& pc : puz.levels[d]) total += pc.desc.footprint.measure();
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            // exactly one piece contains 0
            int n_crit = 0;
            for (const auto& pc : puz.levels[d])
                if (pc.contains(Complex(0, 0))) ++n_crit;
            CHECK(n_crit == 1);
        }
        // depth-1 renaming complete
        for (std::uint64_t j = 1; j < cs.q; ++j) {
            CHECK(puz.y_index[j] >= 0);
            CHECK(puz.z_index[j] >= 0);
        }
    }
}

TEST_CASE("markov properties hold; perturbed descriptor reports a violation") {
    Puzzle puz = build_puzzle(ComplexParam(Complex(-1.8705286321, 0)), 1, 2, 3);
    MarkovReport rep = markov_check(puz);
    CHECK(rep.ok());
    CHECK(rep.pieces_checked > 0);

    // negative control: shift one piece's footprint
    Puzzle bad = puz;
    auto& pc = bad.levels[2][1];
    Footprint f = pc.desc.footprint;
    std::vector<AngleInterval> ivs = f.intervals();
    ivs[0].b = ivs[0].b.half_turn();
    pc.desc.footprint = Footprint(ivs);
    MarkovReport rep2 = markov_check(bad);
    CHECK_FALSE(rep2.ok());
}

TEST_CASE("image piece: doubling the angles reproduces the image boundary") {
    Puzzle puz = build_puzzle(ComplexParam(Complex(-1.8705286321, 0)), 1, 2, 3);
    // central depth-n piece maps to the critical value piece of depth n-1
    for (int d = 1; d <= 3; ++d) {
        const auto& central = puz.levels[d][puz.critical_index[d]];
        PieceDescriptor img = image_piece(central.desc);
        CHECK(img.footprint == puz.levels[d - 1][puz.cv_index[d - 1]].desc.footprint);
    }
    // any depth-1 Z_j maps onto Y_{j+1}^{(0)}
    for (std::uint64_t j = 1; j < puz.q; ++j) {
        if (puz.z_index[j] < 0) continue;
        PieceDescriptor img = image_piece(puz.levels[1][puz.z_index[j]].desc);
        CHECK(img.footprint == puz.levels[0][(j + 1) % puz.q].desc.footprint);
    }
}

TEST_CASE("piece_containing contracts") {
    Puzzle puz = build_puzzle(ComplexParam(Complex(-1, 0)), 1, 2, 2);
    // 0 is always central
    CHECK(puz.piece_index_at(2, Complex(0, 0)) == puz.critical_index[2]);
    // the critical value sits in a non-central piece at depth 1
    int cv = puz.piece_index_at(1, Complex(-1, 0));
    CHECK(cv != puz.critical_index[1]);
    // a point on a ray reports OnBoundary: take a deep ray sample
    const auto& central = puz.levels[1][puz.critical_index[1]];
    Complex ray_pt = central.witness_pts.back();
    CHECK_THROWS_AS(puz.piece_index_at(1, ray_pt), Error);
    // far outside
    CHECK_THROWS_AS(puz.piece_index_at(1, Complex(10, 10)), Error);
}

TEST_CASE("angle-interval nesting matches numeric containment to depth 5") {
    Puzzle puz = build_puzzle(ComplexParam(Complex(-0.122561166876654, 0.744861766619744)),
                              1, 3, 5);
    for (size_t d = 1; d < puz.levels.size(); ++d) {
        for (const auto& deep : puz.levels[d]) {
            for (const auto& shallow : puz.levels[d - 1]) {
                bool comb = deep.desc.footprint.subset_of(shallow.desc.footprint);
                bool geom = shallow.contains(deep.center);
                CHECK(comb == geom);
            }
        }
    }
}

TEST_CASE("pullback along an orbit reproduces full-puzzle pieces") {
    // V = pullback of the depth-2 piece containing f^3(0) along the orbit; its
    // footprint must match the depth-5 piece of the full puzzle containing 0
    Complex c(-1.8705286321, 0);
    Puzzle puz = build_puzzle(ComplexParam(c), 1, 2, 5);
    auto orb = critical_orbit(ComplexParam(c), 3);
    int idx = puz.piece_index_at(2, orb.points[3]);
    PullbackContext ctx(c, puz.opt);
    PieceGeo pulled = pullback_along_orbit(ctx, puz.levels[2][idx], orb.points);
    CHECK(pulled.desc.depth == 5);
    int direct = puz.piece_index_at(5, Complex(0, 0));
    CHECK(pulled.desc.footprint == puz.levels[5][direct].desc.footprint);
    CHECK(pulled.desc.footprint.is_symmetric());
}
