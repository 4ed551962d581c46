#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "nestlab/graphs.hpp"

using namespace nestlab;

namespace {
std::uint64_t rng_state = 42;
std::uint64_t rnd() {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return rng_state;
}
}  // namespace

TEST_CASE("dual graphs of shallow puzzles") {
    // depth-0 of a q-gon limb is a q-gon; depth 1 is two q-gons joined at xi
    Puzzle puz = build_puzzle(ComplexParam(Complex(-0.122561166876654, 0.744861766619744)),
                              1, 3, 2);
    auto graphs = puzzle_graphs(puz);
    CHECK(graphs[0].vertices.size() == 3);
    CHECK(graphs[0].edges.size() == 3);
    CHECK(graphs[1].vertices.size() == 5);
    CHECK(graphs[1].edges.size() == 6);
    // vertex count at depth n equals piece count
    for (size_t d = 0; d < graphs.size(); ++d)
        CHECK(graphs[d].vertices.size() == puz.levels[d].size());
}

TEST_CASE("graph properties G1-G5 pass exhaustively on three parameters") {
    struct CaseT {
        Complex c;
        std::uint64_t p, q;
        int depth;
    };
    for (CaseT cs : {CaseT{Complex(-1.8705286321, 0), 1, 2, 4},
                     CaseT{Complex(-0.122561166876654, 0.744861766619744), 1, 3, 4},
                     CaseT{Complex(-1.87449300898719, 0), 1, 2, 4}}) {
        Puzzle puz = build_puzzle(ComplexParam(cs.c), cs.p, cs.q, cs.depth);
        auto rep = verify_graph_properties(puz);
        for (auto& v : rep.violations) MESSAGE(v);
        CHECK(rep.ok());
    }
}

TEST_CASE("doubling a triangle gives a bow tie; doubling is access independent") {
    LabelSequence seq;
    seq.q = 3;
    auto g0 = label_graphs(seq)[0];
    LabeledGraph bow = double_graph(g0, 1, 0);
    CHECK(bow.vertices.size() == 5);
    CHECK(bow.edges.size() == 6);
    // two triangles joined at the merged vertex
    int deg4 = 0;
    for (size_t v = 0; v < bow.vertices.size(); ++v)
        if (bow.degree((int)v) == 4) ++deg4;
    CHECK(deg4 == 1);
    // access independence up to planar isomorphism
    LabeledGraph bow2 = double_graph(g0, 1, 1);
    CHECK(planar_rooted_iso_any(bow, bow.marked_xi, bow2, bow2.marked_xi));
    CHECK_THROWS_AS(double_graph(g0, 1, 7), Error);
}

TEST_CASE("smallest doubling: single digon becomes a path of two digons") {
    LabelSequence seq;
    seq.q = 2;
    auto g0 = label_graphs(seq)[0];
    CHECK(g0.vertices.size() == 2);
    CHECK(g0.edges.size() == 2);
    LabeledGraph d = double_graph(g0, 1, 0);
    CHECK(d.vertices.size() == 3);
    CHECK(d.edges.size() == 4);
}

TEST_CASE("frame labeling: first doubling and the meta-Chebyshev prefix") {
    LabelSequence seq;
    seq.q = 2;
    seq.sigmas.push_back(parse_label("Z1"));
    auto graphs = label_graphs(seq);
    REQUIRE(graphs.size() == 2);
    std::set<std::string> labels;
    for (auto& v : graphs[1].vertices) labels.insert(v.label.str());
    CHECK(labels == std::set<std::string>{"LZ0", "RZ0", "Z0Z1"});

    // meta-Chebyshev prefix is admissible
    LabelSequence mc;
    mc.q = 2;
    for (const char* s : {"Z1", "LZ0", "LRZ0", "LRRZ0", "LRRRZ0"})
        mc.sigmas.push_back(parse_label(s));
    auto mg = label_graphs(mc);
    CHECK(mg.size() == 6);
    CHECK(mg.back().vertices.size() == 2 * mg[mg.size() - 2].vertices.size() - 1);

    // inadmissible sigma rejected
    LabelSequence bad;
    bad.q = 2;
    bad.sigmas.push_back(parse_label("Z1"));
    bad.sigmas.push_back(parse_label("RRZ0"));
    CHECK_THROWS_AS(label_graphs(bad), Error);
}

TEST_CASE("label invariants: doubling conservation, symmetry involution, Z0 tails") {
    LabelSequence mc;
    mc.q = 2;
    for (const char* s : {"Z1", "LZ0", "LRZ0", "LRRZ0"}) mc.sigmas.push_back(parse_label(s));
    auto graphs = label_graphs(mc);
    for (size_t t = 1; t < graphs.size(); ++t) {
        CHECK(graphs[t].vertices.size() == 2 * graphs[t - 1].vertices.size() - 1);
        // flip involution is a label bijection fixing the Z_0 vertex
        std::set<std::string> all, flipped;
        for (auto& v : graphs[t].vertices) {
            all.insert(v.label.str());
            flipped.insert(v.label.flipped_head().str());
        }
        CHECK(all == flipped);
        // every label with Z_0 at position j has tail sigma_j, and each j occurs
        std::vector<bool> occurs(t, false);
        for (auto& v : graphs[t].vertices) {
            const auto& sy = v.label.symbols;
            for (size_t j = 0; j < sy.size(); ++j) {
                if (sy[j] != 0) continue;
                if (j + 1 > sy.size()) continue;
                size_t level = t - j - 1;  // symbol j was prefixed j levels later
                if (level < mc.sigmas.size()) {
                    LabelChain tail;
                    tail.symbols.assign(sy.begin() + j + 1, sy.end());
                    CHECK(tail == mc.sigmas[level]);
                    if (j < t) occurs[j] = true;
                }
                break;  // deeper Z_0 symbols belong to the recorded tail
            }
        }
        for (size_t j = 0; j + 1 < t; ++j) CHECK(occurs[j]);
    }
}

TEST_CASE("label round-trip is the identity for random admissible sequences") {
    for (int trial = 0; trial < 100; ++trial) {
        LabelSequence seq;
        seq.q = 2 + rnd() % 3;
        std::vector<LabeledGraph> graphs = label_graphs(seq);
        int len = 1 + (int)(rnd() % 8);
        for (int n = 0; n < len; ++n) {
            const LabeledGraph& g = graphs.back();
            LabelSequence partial;
            partial.q = seq.q;
            partial.sigmas = seq.sigmas;
            // pick any current label as the next sigma
            int v = (int)(rnd() % g.vertices.size());
            partial.sigmas.push_back(g.vertices[v].label);
            graphs = label_graphs(partial);
            seq = partial;
        }
        LabelSequence back = sequence_from_graphs(graphs);
        REQUIRE(back.sigmas.size() == seq.sigmas.size());
        CHECK(back.q == seq.q);
        for (size_t i = 0; i < seq.sigmas.size(); ++i) CHECK(back.sigmas[i] == seq.sigmas[i]);
    }
}

TEST_CASE("forget map: drops the leftmost symbol, 2-to-1, order-preserving") {
    LabelSequence mc;
    mc.q = 2;
    for (const char* s : {"Z1", "LZ0", "LRZ0", "LRRZ0"}) mc.sigmas.push_back(parse_label(s));
    auto graphs = label_graphs(mc);
    for (size_t t = 3; t < graphs.size(); ++t) {
        auto res = forget_map(graphs[t], graphs[t - 1]);
        for (auto& v : res.violations) MESSAGE(v);
        CHECK(res.ok());
        // 'L'sigma and 'R'sigma both map to sigma; marked Z_0 image
        for (size_t v = 0; v < graphs[t].vertices.size(); ++v) {
            LabelChain tail;
            const auto& sy = graphs[t].vertices[v].label.symbols;
            tail.symbols.assign(sy.begin() + 1, sy.end());
            CHECK(graphs[t - 1].vertices[res.vertex_map[v]].label == tail);
        }
        // order preservation on small levels (G5 analogue)
        const LabeledGraph& up = graphs[t];
        const LabeledGraph& lo = graphs[t - 1];
        int xi_up = -1;
        for (size_t v = 0; v < up.vertices.size(); ++v)
            if (up.vertices[v].label.symbols[0] == 0) xi_up = (int)v;
        // downstairs basepoint: the image of the Z_0 vertex (the sigma cell)
        int eta_lo = xi_up >= 0 ? res.vertex_map[xi_up] : -1;
        if (t <= 4 && xi_up >= 0 && eta_lo >= 0) {
            // symmetric partner via head flip
            auto sym_of = [&](int v) {
                LabelChain fl = up.vertices[v].label.flipped_head();
                for (size_t w = 0; w < up.vertices.size(); ++w)
                    if (up.vertices[w].label == fl) return (int)w;
                return v;
            };
            int n = (int)up.vertices.size();
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (a == b || a == xi_up || b == xi_up) continue;
                    if (!order_succ(up, a, xi_up, b, sym_of(b))) continue;
                    int fa = res.vertex_map[a], fb = res.vertex_map[b];
                    if (fa == fb) continue;
                    CHECK(order_succ(lo, fa, eta_lo, fb));
                }
        }
    }
}
