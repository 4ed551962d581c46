#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nestlab/errors.hpp"
#include "nestlab/puzzle.hpp"

namespace nestlab {

// Symbols of label chains: j >= 0 encodes Z_j, kSymL / kSymR the copy prefixes.
inline constexpr int kSymL = -1;
inline constexpr int kSymR = -2;

struct LabelChain {
    std::vector<int> symbols;
    bool empty() const { return symbols.empty(); }
    bool operator==(const LabelChain& o) const { return symbols == o.symbols; }
    std::string str() const;
    // leading-symbol flip L <-> R (identity when the chain starts with Z_j)
    LabelChain flipped_head() const;
};

LabelChain parse_label(const std::string& text);

struct LabelSequence {
    std::uint64_t q = 2;
    std::vector<LabelChain> sigmas;  // sigma_0, sigma_1, ...
    std::string str() const;
};

// Plane multigraph with a rotation system; vertices optionally labeled and
// tied back to pieces by the callers.
struct LabeledGraph {
    struct Vertex {
        LabelChain label;
        std::vector<int> rotation;  // incident edge ids in circular order
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<int, int>> edges;  // unordered; multi-edges allowed
    int marked_xi = -1;
    int marked_eta = -1;
    std::uint64_t q = 0;

    int degree(int v) const { return (int)vertices[v].rotation.size(); }
    int other_end(int e, int v) const {
        return edges[e].first == v ? edges[e].second : edges[e].first;
    }
    std::vector<std::vector<int>> adjacency() const;
    bool connected_without(const std::vector<int>& removed, int from, int to) const;
};

// Dual graph of same-depth pieces: vertices are pieces, one edge per shared
// bounding ray; rotation systems from the circular order of boundary rays.
LabeledGraph dual_graph(const std::vector<PieceGeo>& pieces);

// The puzzle graphs of all built depths, with xi/eta marks.
std::vector<LabeledGraph> puzzle_graphs(const Puzzle& puz);

// f^* (footprint doubling) as a vertex map from level d to level d-1 of the
// puzzle; -1 when the image is not a piece (violation).
std::vector<int> fstar_map(const Puzzle& puz, int d);
// iota^* (inclusion) as a vertex map from level d to level d-1.
std::vector<int> istar_map(const Puzzle& puz, int d);

struct GraphPropertyReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// G1..G5 of the puzzle-graph proposition, checked exhaustively on the built
// depths.
GraphPropertyReport verify_graph_properties(const Puzzle& puz);

// Two copies joined by collapsing a connecting arc at the chosen access of
// `at_vertex` (frame-graph doubling).  Copy one keeps this vertex as the
// merged one; labels are not assigned here.
LabeledGraph double_graph(const LabeledGraph& g, int at_vertex, int access);

// Rooted plane-graph isomorphism: darts anchored at the root pair, rotation
// respected (orientation reversed when mirrored=true).
bool planar_rooted_iso(const LabeledGraph& g, int root_g, const LabeledGraph& h, int root_h,
                       bool mirrored, std::vector<int>* vertex_map = nullptr);
bool planar_rooted_iso_any(const LabeledGraph& g, int root_g, const LabeledGraph& h,
                           int root_h, std::vector<int>* vertex_map = nullptr);

// Abstract labeled frame graphs of an admissible label sequence:
// Gamma(F_0)..Gamma(F_n) with the doubling labels.  Throws InadmissibleSigma
// when some sigma is not a label of its level.
std::vector<LabeledGraph> label_graphs(const LabelSequence& seq);

// Recover the label sequence from labeled graphs (round-trip inverse).
LabelSequence sequence_from_graphs(const std::vector<LabeledGraph>& graphs);

// Map induced by forgetting the leftmost symbol; returns the vertex map onto
// the previous-level graph and verifies it is an admissible 2-to-1 graph map.
struct ForgetMapResult {
    std::vector<int> vertex_map;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
ForgetMapResult forget_map(const LabeledGraph& upper, const LabeledGraph& lower);

// a ">" b relative to basepoint: every path from a to the basepoint passes
// through b (or its central-symmetric partner when sym_partner >= 0).
bool order_succ(const LabeledGraph& g, int a, int basepoint, int b, int sym_partner = -1);

// DOT / JSON export of a labeled graph.
std::string graph_to_dot(const LabeledGraph& g);
std::string graph_to_json(const LabeledGraph& g);

}  // namespace nestlab
