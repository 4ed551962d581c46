#include "nestlab/graphs.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace nestlab {

std::string LabelChain::str() const {
    std::string s;
    for (int sym : symbols) {
        if (sym == kSymL)
            s += "L";
        else if (sym == kSymR)
            s += "R";
        else
            s += "Z" + std::to_string(sym);
    }
    return s;
}

LabelChain LabelChain::flipped_head() const {
    LabelChain out = *this;
    if (!out.symbols.empty()) {
        if (out.symbols[0] == kSymL)
            out.symbols[0] = kSymR;
        else if (out.symbols[0] == kSymR)
            out.symbols[0] = kSymL;
    }
    return out;
}

LabelChain parse_label(const std::string& text) {
    LabelChain out;
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == 'L') {
            out.symbols.push_back(kSymL);
            ++i;
        } else if (text[i] == 'R') {
            out.symbols.push_back(kSymR);
            ++i;
        } else if (text[i] == 'Z') {
            size_t j = i + 1;
            while (j < text.size() && isdigit(text[j])) ++j;
            out.symbols.push_back(std::stoi(text.substr(i + 1, j - i - 1)));
            i = j;
        } else {
            throw Error(Err::InvalidArgument, "bad label symbol in '" + text + "'");
        }
    }
    return out;
}

std::string LabelSequence::str() const {
    std::string s = "(" + std::to_string(q);
    for (const auto& sg : sigmas) s += "; " + sg.str();
    return s + ")";
}

std::vector<std::vector<int>> LabeledGraph::adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].first].push_back(edges[e].second);
        adj[edges[e].second].push_back(edges[e].first);
    }
    return adj;
}

bool LabeledGraph::connected_without(const std::vector<int>& removed, int from, int to) const {
    std::vector<bool> blocked(vertices.size(), false);
    for (int v : removed) blocked[v] = true;
    if (blocked[from] || blocked[to]) return false;
    auto adj = adjacency();
    std::vector<bool> seen(vertices.size(), false);
    std::vector<int> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (int w : adj[v])
            if (!seen[w] && !blocked[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    return false;
}

LabeledGraph dual_graph(const std::vector<PieceGeo>& pieces) {
    if (pieces.empty()) return {};
    int depth = pieces[0].desc.depth;
    for (const auto& pc : pieces)
        if (pc.desc.depth != depth)
            throw Error(Err::MixedDepths, "dual graph needs pieces of one depth");

    LabeledGraph g;
    g.vertices.resize(pieces.size());

    // one edge per boundary ray angle: the piece whose interval ends there
    // meets the piece whose interval starts there
    struct Side {
        int end_piece = -1, start_piece = -1;
    };
    std::map<size_t, std::pair<RationalAngle, Side>> by_angle;
    for (size_t i = 0; i < pieces.size(); ++i) {
        for (const auto& iv : pieces[i].desc.footprint.intervals()) {
            by_angle[iv.a.hash()].first = iv.a;
            by_angle[iv.a.hash()].second.start_piece = (int)i;
            by_angle[iv.b.hash()].first = iv.b;
            by_angle[iv.b.hash()].second.end_piece = (int)i;
        }
    }
    std::map<size_t, int> edge_of_angle;
    for (auto& [h, entry] : by_angle) {
        auto& side = entry.second;
        // one-sided angles are outer boundary rays of the collection (frame
        // cells tile only part of the circle); they carry no edge
        if (side.start_piece < 0 || side.end_piece < 0) continue;
        edge_of_angle[h] = (int)g.edges.size();
        g.edges.push_back({side.end_piece, side.start_piece});
    }
    // rotation systems: boundary rays of a piece in circular footprint order
    for (size_t i = 0; i < pieces.size(); ++i) {
        for (const auto& iv : pieces[i].desc.footprint.intervals()) {
            for (const RationalAngle* t : {&iv.a, &iv.b}) {
                auto it = edge_of_angle.find(t->hash());
                if (it != edge_of_angle.end()) g.vertices[i].rotation.push_back(it->second);
            }
        }
    }
    g.q = 0;
    return g;
}

std::vector<LabeledGraph> puzzle_graphs(const Puzzle& puz) {
    std::vector<LabeledGraph> out;
    for (size_t d = 0; d < puz.levels.size(); ++d) {
        LabeledGraph g = dual_graph(puz.levels[d]);
        g.q = puz.q;
        g.marked_xi = puz.critical_index[d];
        g.marked_eta = puz.cv_index[d];
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<int> fstar_map(const Puzzle& puz, int d) {
    std::vector<int> out(puz.levels[d].size(), -1);
    for (size_t i = 0; i < puz.levels[d].size(); ++i) {
        Footprint img = puz.levels[d][i].desc.footprint.image();
        for (size_t j = 0; j < puz.levels[d - 1].size(); ++j)
            if (puz.levels[d - 1][j].desc.footprint == img) out[i] = (int)j;
    }
    return out;
}

std::vector<int> istar_map(const Puzzle& puz, int d) {
    std::vector<int> out(puz.levels[d].size(), -1);
    for (size_t i = 0; i < puz.levels[d].size(); ++i) {
        for (size_t j = 0; j < puz.levels[d - 1].size(); ++j)
            if (puz.levels[d][i].desc.footprint.subset_of(
                    puz.levels[d - 1][j].desc.footprint))
                out[i] = (int)j;
    }
    return out;
}

namespace {

// vertex pairing under the central symmetry (antipodal footprints)
std::vector<int> symmetry_pairing(const std::vector<PieceGeo>& pieces) {
    std::vector<int> sigma(pieces.size(), -1);
    for (size_t i = 0; i < pieces.size(); ++i) {
        Footprint ht = pieces[i].desc.footprint.half_turned();
        for (size_t j = 0; j < pieces.size(); ++j)
            if (pieces[j].desc.footprint == ht) sigma[i] = (int)j;
    }
    return sigma;
}

// biconnected components as edge sets (simple DFS lowpoint algorithm)
std::vector<std::vector<int>> biconnected_edge_components(const LabeledGraph& g) {
    int n = (int)g.vertices.size();
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge id)
    for (size_t e = 0; e < g.edges.size(); ++e) {
        adj[g.edges[e].first].push_back({g.edges[e].second, (int)e});
        adj[g.edges[e].second].push_back({g.edges[e].first, (int)e});
    }
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<std::vector<int>> comps;
    std::vector<int> estack;
    int timer = 0;

    struct Frame {
        int v, parent_edge;
        size_t idx = 0;
    };
    for (int s = 0; s < n; ++s) {
        if (disc[s] >= 0) continue;
        std::vector<Frame> st{{s, -1}};
        disc[s] = low[s] = timer++;
        while (!st.empty()) {
            Frame& f = st.back();
            if (f.idx < adj[f.v].size()) {
                auto [w, e] = adj[f.v][f.idx++];
                if (e == f.parent_edge) continue;
                if (disc[w] < 0) {
                    estack.push_back(e);
                    disc[w] = low[w] = timer++;
                    st.push_back({w, e});
                } else if (disc[w] < disc[f.v]) {
                    estack.push_back(e);
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            } else {
                int v = f.v, pe = f.parent_edge;
                st.pop_back();
                if (!st.empty()) {
                    int u = st.back().v;
                    low[u] = std::min(low[u], low[v]);
                    if (low[v] >= disc[u]) {
                        comps.push_back({});
                        while (!estack.empty()) {
                            int e = estack.back();
                            estack.pop_back();
                            comps.back().push_back(e);
                            if (e == pe) break;
                        }
                    }
                }
            }
        }
    }
    return comps;
}

std::vector<int> components_without_vertex(const LabeledGraph& g, int removed,
                                           int* n_comps_out) {
    int n = (int)g.vertices.size();
    auto adj = g.adjacency();
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (s == removed || comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = nc;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (w != removed && comp[w] < 0) {
                    comp[w] = nc;
                    stack.push_back(w);
                }
        }
        ++nc;
    }
    if (n_comps_out) *n_comps_out = nc;
    return comp;
}

}  // namespace

GraphPropertyReport verify_graph_properties(const Puzzle& puz) {
    GraphPropertyReport rep;
    auto graphs = puzzle_graphs(puz);
    auto fail = [&](int d, const std::string& what) {
        rep.violations.push_back("depth " + std::to_string(d) + ": " + what);
    };

    for (size_t d = 0; d < graphs.size(); ++d) {
        const LabeledGraph& g = graphs[d];
        const auto& pieces = puz.levels[d];
        std::vector<int> sigma = symmetry_pairing(pieces);

        // G1: central symmetry around xi (the ray system is half-turn
        // invariant from depth 1 on; depth 0 is the plain q-gon)
        if (d >= 1) {
            for (size_t i = 0; i < sigma.size(); ++i) {
                if (sigma[i] < 0) {
                    fail((int)d, "G1: missing symmetric partner");
                    continue;
                }
            }
            if (g.marked_xi >= 0 && sigma[g.marked_xi] != g.marked_xi)
                fail((int)d, "G1: xi is not symmetry-fixed");
            std::map<std::pair<int, int>, int> edge_count;
            for (auto [a, b] : g.edges) edge_count[{std::min(a, b), std::max(a, b)}]++;
            for (auto [a, b] : g.edges) {
                int sa = sigma[a], sb = sigma[b];
                if (sa < 0 || sb < 0) continue;
                if (!edge_count.count({std::min(sa, sb), std::max(sa, sb)}))
                    fail((int)d, "G1: symmetry does not preserve edges");
            }
        }

        // G2: 2^d q-gons, tree-like
        auto blocks = biconnected_edge_components(g);
        size_t qgons = 0;
        for (const auto& blk : blocks) {
            if (blk.size() == puz.q) {
                // must be a closed cycle: count vertices touched
                std::map<int, int> deg;
                for (int e : blk) {
                    deg[g.edges[e].first]++;
                    deg[g.edges[e].second]++;
                }
                bool cyc = deg.size() == puz.q;
                for (auto& [v, dg] : deg) cyc = cyc && dg == 2;
                if (cyc) {
                    ++qgons;
                    continue;
                }
            }
            fail((int)d, "G2: a block is not a q-gon");
        }
        if (qgons != (1ull << d)) fail((int)d, "G2: q-gon count is not 2^depth");

        if (d == 0) continue;
        const LabeledGraph& h = graphs[d - 1];
        auto fs = fstar_map(puz, (int)d);
        auto is = istar_map(puz, (int)d);

        // G3: removing xi splits the graph into two halves isomorphic to the
        // previous depth; eta's half maps with eta in the role of xi_{d-1}
        {
            int nc = 0;
            auto comp = components_without_vertex(g, g.marked_xi, &nc);
            if (nc < 2) {
                fail((int)d, "G3: removing xi does not split the graph");
            } else {
                // halves: eta's side plus one of each remaining sigma-pair
                std::vector<int> half(g.vertices.size(), -1);
                int eta_comp = comp[g.marked_eta];
                for (size_t v = 0; v < g.vertices.size(); ++v) {
                    if ((int)v == g.marked_xi) continue;
                    if (comp[v] == eta_comp)
                        half[v] = 0;
                    else if (comp[sigma[v]] == eta_comp)
                        half[v] = 1;
                }
                // remaining components: assign pairs consistently
                for (size_t v = 0; v < g.vertices.size(); ++v) {
                    if ((int)v == g.marked_xi || half[v] >= 0) continue;
                    // whole component goes to half 0, its mirror to half 1
                    for (size_t w = 0; w < g.vertices.size(); ++w)
                        if (comp[w] == comp[v]) {
                            half[w] = 0;
                            half[sigma[w]] = 1;
                        }
                }
                // f* restricted to each half (plus xi) must biject onto the
                // previous level
                for (int side = 0; side < 2; ++side) {
                    std::vector<bool> hit(h.vertices.size(), false);
                    int cnt = 0;
                    for (size_t v = 0; v < g.vertices.size(); ++v) {
                        if ((int)v != g.marked_xi && half[v] != side) continue;
                        if (fs[v] < 0) {
                            fail((int)d, "G3/G4: f* image is not a piece");
                            continue;
                        }
                        if (hit[fs[v]]) fail((int)d, "G3: f* not injective on a half");
                        hit[fs[v]] = true;
                        ++cnt;
                    }
                    if (cnt != (int)h.vertices.size())
                        fail((int)d, "G3: half size does not match previous depth");
                }
            }
        }

        // G4: f* is 2-to-1 except at xi; iota* collapses the outermost q-gons
        {
            std::vector<int> pre(h.vertices.size(), 0);
            for (size_t v = 0; v < g.vertices.size(); ++v) {
                if (fs[v] < 0) continue;
                pre[fs[v]]++;
            }
            for (size_t w = 0; w < h.vertices.size(); ++w) {
                int expect = ((int)w == h.marked_eta) ? 1 : 2;
                if (pre[w] != expect) fail((int)d, "G4: f* preimage count wrong");
            }
            // edges map to edges under f*
            std::map<std::pair<int, int>, int> hedge;
            for (auto [a, b] : h.edges) hedge[{std::min(a, b), std::max(a, b)}]++;
            for (auto [a, b] : g.edges) {
                int fa = fs[a], fb = fs[b];
                if (fa < 0 || fb < 0) continue;
                if (fa == fb || !hedge.count({std::min(fa, fb), std::max(fa, fb)}))
                    fail((int)d, "G4: f* does not preserve an edge");
            }
            // iota*: every q-gon is either collapsed to a vertex or maps onto
            // a q-gon of the previous depth; exactly half are collapsed
            size_t collapsed = 0;
            for (const auto& blk : blocks) {
                std::vector<int> verts;
                for (int e : blk) {
                    verts.push_back(g.edges[e].first);
                    verts.push_back(g.edges[e].second);
                }
                std::sort(verts.begin(), verts.end());
                verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
                bool constant = true;
                for (int v : verts)
                    if (is[v] != is[verts[0]]) constant = false;
                if (constant) ++collapsed;
            }
            if (collapsed != (1ull << (d - 1)))
                fail((int)d, "G4: iota* does not collapse exactly the outermost q-gons");
        }

        // G5: f* respects order (xi-order upstairs, eta-order downstairs)
        {
            int n = (int)g.vertices.size();
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (a == b || a == g.marked_xi || b == g.marked_xi) continue;
                    if (!order_succ(g, a, g.marked_xi, b, sigma[b])) continue;
                    if (fs[a] < 0 || fs[b] < 0) continue;
                    if (fs[a] == fs[b]) continue;
                    if (!order_succ(h, fs[a], h.marked_eta, fs[b]))
                        fail((int)d, "G5: f* does not respect order");
                }
            }
        }
    }
    return rep;
}

bool order_succ(const LabeledGraph& g, int a, int basepoint, int b, int sym_partner) {
    if (a == b || b == basepoint) return true;
    if (a == basepoint) return false;
    std::vector<int> removed{b};
    if (sym_partner >= 0 && sym_partner != b) removed.push_back(sym_partner);
    if (a == removed[0] || (removed.size() > 1 && a == removed[1])) return true;
    return !g.connected_without(removed, a, basepoint);
}

LabeledGraph double_graph(const LabeledGraph& g, int at_vertex, int access) {
    int deg = g.degree(at_vertex);
    if (access < 0 || access > std::max(0, deg - 1))
        throw Error(Err::InvalidAccess, "no such access at the chosen vertex");
    int n = (int)g.vertices.size();
    int m = (int)g.edges.size();
    LabeledGraph out;
    out.q = g.q;
    out.vertices.resize(2 * n - 1);
    // copy L keeps vertex ids, copy R is appended with at_vertex identified
    auto rid = [&](int v) {
        if (v == at_vertex) return at_vertex;
        return v < at_vertex ? n + v : n + v - 1;
    };
    for (auto [a, b] : g.edges) out.edges.push_back({a, b});
    for (auto [a, b] : g.edges) out.edges.push_back({rid(a), rid(b)});
    for (int v = 0; v < n; ++v) {
        if (v == at_vertex) continue;
        out.vertices[v].rotation = g.vertices[v].rotation;
        out.vertices[v].label = g.vertices[v].label;
        auto& rv = out.vertices[rid(v)];
        rv.label = g.vertices[v].label;
        for (int e : g.vertices[v].rotation) rv.rotation.push_back(e + m);
    }
    // merged vertex: L accesses grouped from the chosen access, then R's
    auto& mv = out.vertices[at_vertex];
    mv.label = g.vertices[at_vertex].label;
    for (int i = 0; i < deg; ++i)
        mv.rotation.push_back(g.vertices[at_vertex].rotation[(access + i) % deg]);
    for (int i = 0; i < deg; ++i)
        mv.rotation.push_back(g.vertices[at_vertex].rotation[(access + i) % deg] + m);
    out.marked_xi = at_vertex;
    return out;
}

bool planar_rooted_iso(const LabeledGraph& g, int root_g, const LabeledGraph& h, int root_h,
                       bool mirrored, std::vector<int>* vertex_map) {
    if (g.vertices.size() != h.vertices.size() || g.edges.size() != h.edges.size())
        return false;
    if (g.degree(root_g) != h.degree(root_h)) return false;
    int dg = g.degree(root_g);
    if (dg == 0) return g.vertices.size() == 1;

    // darts: (vertex, rotation position). Try all alignments of the root's
    // rotation; propagation of one dart determines everything.
    for (int shift = 0; shift < dg; ++shift) {
        std::vector<int> vmap(g.vertices.size(), -1);
        std::vector<int> emap(g.edges.size(), -1);
        vmap[root_g] = root_h;
        bool ok = true;
        // map rotation of root_g position i to root_h position shift +/- i
        struct Item {
            int vg, vh, pg, ph;  // aligned rotation start positions
        };
        std::vector<Item> queue{{root_g, root_h, 0, shift}};
        std::vector<bool> processed(g.vertices.size(), false);
        while (!queue.empty() && ok) {
            Item it = queue.back();
            queue.pop_back();
            if (processed[it.vg]) continue;
            processed[it.vg] = true;
            int d = g.degree(it.vg);
            if (d != h.degree(it.vh)) {
                ok = false;
                break;
            }
            for (int i = 0; i < d && ok; ++i) {
                int eg = g.vertices[it.vg].rotation[(it.pg + i) % d];
                int eh = h.vertices[it.vh]
                             .rotation[((it.ph + (mirrored ? -i : i)) % d + d) % d];
                if (emap[eg] >= 0 && emap[eg] != eh) {
                    ok = false;
                    break;
                }
                emap[eg] = eh;
                int wg = g.other_end(eg, it.vg);
                int wh = h.other_end(eh, it.vh);
                if (vmap[wg] >= 0 && vmap[wg] != wh) {
                    ok = false;
                    break;
                }
                if (vmap[wg] < 0) {
                    vmap[wg] = wh;
                    // align rotations at the far end: position of eg in wg's
                    // rotation vs eh in wh's (multi-edges need care: try all)
                    int dw = g.degree(wg);
                    int pg = -1, ph = -1;
                    for (int k = 0; k < dw; ++k)
                        if (g.vertices[wg].rotation[k] == eg) pg = k;
                    for (int k = 0; k < h.degree(wh); ++k)
                        if (h.vertices[wh].rotation[k] == eh) ph = k;
                    if (pg < 0 || ph < 0) {
                        ok = false;
                        break;
                    }
                    queue.push_back({wg, wh, pg, ph});
                }
            }
        }
        if (ok) {
            // verify completeness
            for (size_t v = 0; v < g.vertices.size() && ok; ++v)
                if (vmap[v] < 0) ok = false;
            if (ok) {
                if (vertex_map) *vertex_map = vmap;
                return true;
            }
        }
    }
    return false;
}

bool planar_rooted_iso_any(const LabeledGraph& g, int root_g, const LabeledGraph& h,
                           int root_h, std::vector<int>* vertex_map) {
    return planar_rooted_iso(g, root_g, h, root_h, false, vertex_map) ||
           planar_rooted_iso(g, root_g, h, root_h, true, vertex_map);
}

std::vector<LabeledGraph> label_graphs(const LabelSequence& seq) {
    std::vector<LabeledGraph> out;
    LabeledGraph g0;
    g0.q = seq.q;
    g0.vertices.resize(seq.q);
    for (std::uint64_t i = 0; i < seq.q; ++i) {
        g0.vertices[i].label.symbols = {(int)i};
        int e1 = (int)i;
        int e0 = (int)((i + seq.q - 1) % seq.q);
        g0.vertices[i].rotation = {e0, e1};
        g0.edges.push_back({(int)i, (int)((i + 1) % seq.q)});
    }
    g0.marked_xi = 0;
    out.push_back(g0);

    for (size_t n = 0; n < seq.sigmas.size(); ++n) {
        const LabeledGraph& g = out.back();
        int at = -1;
        for (size_t v = 0; v < g.vertices.size(); ++v)
            if (g.vertices[v].label == seq.sigmas[n]) at = (int)v;
        if (at < 0)
            throw Error(Err::InadmissibleSigma,
                        "sigma_" + std::to_string(n) + " = " + seq.sigmas[n].str() +
                            " is not a label at level " + std::to_string(n));
        LabeledGraph dbl = double_graph(g, at, 0);
        int nold = (int)g.vertices.size();
        for (int v = 0; v < (int)dbl.vertices.size(); ++v) {
            if (v == at) {
                dbl.vertices[v].label.symbols.clear();
                dbl.vertices[v].label.symbols.push_back(0);  // Z_0
                for (int s : seq.sigmas[n].symbols)
                    dbl.vertices[v].label.symbols.push_back(s);
            } else {
                int prefix = v < nold ? kSymL : kSymR;
                LabelChain base = dbl.vertices[v].label;
                dbl.vertices[v].label.symbols.clear();
                dbl.vertices[v].label.symbols.push_back(prefix);
                for (int s : base.symbols) dbl.vertices[v].label.symbols.push_back(s);
            }
        }
        out.push_back(std::move(dbl));
    }
    return out;
}

LabelSequence sequence_from_graphs(const std::vector<LabeledGraph>& graphs) {
    LabelSequence seq;
    if (graphs.empty()) return seq;
    seq.q = graphs[0].vertices.size();
    for (size_t t = 1; t < graphs.size(); ++t) {
        // the vertex merged at this doubling is the unique one whose label
        // begins with Z_0; sigma_{t-1} is its tail
        const LabeledGraph& g = graphs[t];
        int found = -1;
        for (size_t v = 0; v < g.vertices.size(); ++v) {
            const auto& sy = g.vertices[v].label.symbols;
            if (!sy.empty() && sy[0] == 0) {
                found = (int)v;
                break;
            }
        }
        if (found < 0)
            throw Error(Err::InadmissibleSigma, "no Z_0-led vertex at level " +
                                                     std::to_string(t));
        LabelChain tail;
        tail.symbols.assign(g.vertices[found].label.symbols.begin() + 1,
                            g.vertices[found].label.symbols.end());
        seq.sigmas.push_back(tail);
    }
    return seq;
}

ForgetMapResult forget_map(const LabeledGraph& upper, const LabeledGraph& lower) {
    ForgetMapResult res;
    res.vertex_map.assign(upper.vertices.size(), -1);
    auto find_lower = [&](const LabelChain& lbl) {
        for (size_t v = 0; v < lower.vertices.size(); ++v)
            if (lower.vertices[v].label == lbl) return (int)v;
        return -1;
    };
    for (size_t v = 0; v < upper.vertices.size(); ++v) {
        const auto& sy = upper.vertices[v].label.symbols;
        if (sy.size() < 2) {
            res.violations.push_back("label too short to forget a symbol");
            continue;
        }
        LabelChain tail;
        tail.symbols.assign(sy.begin() + 1, sy.end());
        int img = find_lower(tail);
        if (img < 0) {
            res.violations.push_back("forgotten label " + tail.str() +
                                     " is not a vertex below");
            continue;
        }
        res.vertex_map[v] = img;
    }
    // 2-to-1 everywhere except the Z_0 vertex's image
    std::vector<int> pre(lower.vertices.size(), 0);
    for (int img : res.vertex_map)
        if (img >= 0) pre[img]++;
    int ones = 0;
    for (size_t w = 0; w < lower.vertices.size(); ++w) {
        if (pre[w] == 1)
            ++ones;
        else if (pre[w] != 2)
            res.violations.push_back("forget map preimage count " +
                                     std::to_string(pre[w]) + " at " +
                                     lower.vertices[w].label.str());
    }
    if (ones != 1) res.violations.push_back("forget map must be 1-to-1 at one vertex only");
    // edges map to edges or collapse at the merged vertex
    std::map<std::pair<int, int>, int> ledge;
    for (auto [a, b] : lower.edges) ledge[{std::min(a, b), std::max(a, b)}]++;
    for (auto [a, b] : upper.edges) {
        int fa = res.vertex_map[a], fb = res.vertex_map[b];
        if (fa < 0 || fb < 0) continue;
        if (fa != fb && !ledge.count({std::min(fa, fb), std::max(fa, fb)}))
            res.violations.push_back("forget map breaks an edge");
    }
    return res;
}

std::string graph_to_dot(const LabeledGraph& g) {
    std::ostringstream os;
    os << "graph frame {\n";
    for (size_t v = 0; v < g.vertices.size(); ++v) {
        os << "  v" << v << " [label=\"" << g.vertices[v].label.str() << "\"";
        if ((int)v == g.marked_xi) os << " shape=doublecircle";
        if ((int)v == g.marked_eta) os << " style=bold";
        os << "];\n";
    }
    for (auto [a, b] : g.edges) os << "  v" << a << " -- v" << b << ";\n";
    os << "}\n";
    return os.str();
}

std::string graph_to_json(const LabeledGraph& g) {
    std::ostringstream os;
    os << "{\"q\":" << g.q << ",\"xi\":" << g.marked_xi << ",\"eta\":" << g.marked_eta
       << ",\"vertices\":[";
    for (size_t v = 0; v < g.vertices.size(); ++v) {
        if (v) os << ",";
        os << "{\"label\":\"" << g.vertices[v].label.str() << "\",\"rotation\":[";
        for (size_t i = 0; i < g.vertices[v].rotation.size(); ++i) {
            if (i) os << ",";
            os << g.vertices[v].rotation[i];
        }
        os << "]}";
    }
    os << "],\"edges\":[";
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (e) os << ",";
        os << "[" << g.edges[e].first << "," << g.edges[e].second << "]";
    }
    os << "]}";
    return os.str();
}

}  // namespace nestlab
