#include "nestlab/nest.hpp"

#include <algorithm>
#include <cmath>

namespace nestlab {

namespace {

// deepest registered non-central piece strictly containing z, shallower than
// `max_depth`; used as the split constraint during pullbacks
class PieceRegistry {
public:
    void add(const PieceGeo* pc) {
        if (pc->desc.footprint.is_symmetric()) return;
        items_.push_back(pc);
        boxes_.push_back(bounding_box(pc->boundary.pts));
    }
    const Footprint* locate(Complex z, int max_depth) const {
        // pieces of depth equal to the region are the region itself (Markov)
        const PieceGeo* best = nullptr;
        for (size_t i = 0; i < items_.size(); ++i) {
            const PieceGeo* pc = items_[i];
            if (pc->desc.depth > max_depth) continue;
            if (best && pc->desc.depth <= best->desc.depth) continue;
            if (!boxes_[i].contains(z, 1e-12)) continue;
            if (pc->contains(z)) best = pc;
        }
        return best ? &best->desc.footprint : nullptr;
    }

private:
    std::vector<const PieceGeo*> items_;
    std::vector<BBox> boxes_;
};

bool point_in(const PieceGeo& pc, Complex z) { return pc.contains(z); }

// frame-cell label prefixes via the halves of the frame graph minus the
// central cell; the half holding the lexicographically smallest footprint
// start angle is 'L' (a deterministic orientation; flips are free data)
std::vector<int> half_assignment(const std::vector<FrameCell>& cells, int central) {
    std::vector<PieceGeo> geos;
    for (const auto& cl : cells) geos.push_back(cl.geo);
    LabeledGraph g = dual_graph(geos);
    int n = (int)cells.size();
    // components without the central vertex
    std::vector<int> comp(n, -1);
    auto adj = g.adjacency();
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (s == central || comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = nc;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (w != central && comp[w] < 0) {
                    comp[w] = nc;
                    stack.push_back(w);
                }
        }
        ++nc;
    }
    // antipodal pairing of cells
    std::vector<int> sigma(n, -1);
    for (int i = 0; i < n; ++i) {
        Footprint ht = cells[i].geo.desc.footprint.half_turned();
        for (int j = 0; j < n; ++j)
            if (cells[j].geo.desc.footprint == ht) sigma[i] = j;
    }
    // choose the half: the component pair member holding the globally
    // smallest interval start angle
    std::vector<int> half(n, -1);
    std::vector<bool> comp_done(nc, false);
    // order cells by smallest start angle
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return RationalAngle::cmp(cells[a].geo.desc.footprint.intervals()[0].a,
                                  cells[b].geo.desc.footprint.intervals()[0].a) < 0;
    });
    for (int idx : order) {
        if (idx == central || half[idx] >= 0) continue;
        int cm = comp[idx];
        if (comp_done[cm]) continue;
        for (int v = 0; v < n; ++v) {
            if (v == central) continue;
            if (comp[v] == cm) {
                half[v] = 0;
                if (sigma[v] >= 0) half[sigma[v]] = 1;
            }
        }
        comp_done[cm] = true;
        if (sigma[idx] >= 0 && comp[sigma[idx]] >= 0) comp_done[comp[sigma[idx]]] = true;
    }
    return half;
}

}  // namespace

int Frame::cell_containing(const Footprint& fp) const {
    for (size_t i = 0; i < cells.size(); ++i)
        if (fp.subset_of(cells[i].geo.desc.footprint)) return (int)i;
    return -1;
}

int Frame::cell_containing_point(Complex z) const {
    for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i].geo.contains(z)) return (int)i;
    return -1;
}

int NestSummary::kappa_count(int n) const {
    int k = 0;
    for (int i = 1; i <= n && i < (int)levels.size(); ++i)
        if (!levels[i].central_return) ++k;
    return k;
}

int NestSummary::depth_of_level(int n) const {
    long d = kq + 1;
    for (int i = 1; i <= n; ++i) d += levels.at(i).return_time;
    return (int)d;
}

std::pair<long, int> first_escape(const Puzzle& puz, long max_k) {
    Complex c = puz.c;
    Complex z = 0;
    long q = (long)puz.q;
    for (long k = 1; k <= max_k; ++k) {
        for (long s = 0; s < q; ++s) z = z * z + c;
        int idx;
        try {
            idx = puz.piece_index_at(1, z);
        } catch (const Error& e) {
            throw Error(Err::CriticalHitsAlpha,
                        std::string("escape scan hit a boundary: ") + e.what());
        }
        if (idx == puz.critical_index[1]) continue;  // still in Y_0^(1)
        for (std::uint64_t j = 1; j < puz.q; ++j)
            if (puz.z_index[j] == idx) return {k * q, (int)j};
        throw Error(Err::CriticalHitsAlpha,
                    "escape left Y_0^(0) without entering a Z piece");
    }
    throw Error(Err::ImmediateRenormalizable,
                "orbit of 0 under f^q stays in Y_0^(1); nest undefined");
}

namespace {

struct FramePullResult {
    std::vector<FrameCell> cells;
    PieceGeo central_geo;
    Complex s_point;
    RationalAngle s_angle;
    int s_host = -1;
};

// find the corner of a pulled piece whose touching rays are halved copies of
// the tracked junction angle and whose position is an f-preimage of s
bool find_s_corner(Complex c, Complex s, const RationalAngle& a_s, const PieceGeo& pulled,
                   Complex& s_out, RationalAngle& a_out) {
    RationalAngle c0 = a_s.halved();
    RationalAngle c1 = c0.half_turn();
    const Corner* best = nullptr;
    RationalAngle best_angle;
    Complex guess0 = std::sqrt(s - c);
    double best_d = 1e300;
    for (const auto& cor : pulled.corners) {
        for (const auto& t : cor.touching) {
            if (!(t == c0) && !(t == c1)) continue;
            double d = std::min(std::abs(cor.pt - guess0), std::abs(cor.pt + guess0));
            if (d < best_d) {
                best_d = d;
                best = &cor;
                best_angle = t;
            }
        }
    }
    if (!best || best_d > 1e-5 * (1 + std::abs(guess0))) return false;
    s_out = best->pt;
    a_out = best_angle;
    return true;
}

// Pull all cells of `prev` back along orbit[0..m] (z_m in the sigma cell).
// master_chain[j] = footprint of a region whose image chain contains every
// cell pullback at step j (non-central except possibly at j = 0).
FramePullResult pull_frame(PullbackContext& ctx, const Frame& prev, int sigma_cell,
                           const std::vector<Complex>& orbit,
                           const std::vector<Footprint>& master_chain,
                           std::pair<Complex, RationalAngle> s_prev, int s_host_prev) {
    size_t m = orbit.size() - 1;
    FramePullResult out;

    // central chain: pull the sigma cell with the orbit anchor
    PieceGeo central = prev.cells[sigma_cell].geo;
    for (size_t step = m; step-- > 0;) {
        const Footprint* cons = master_chain.empty() ? nullptr : &master_chain[step];
        if (cons && cons->is_symmetric()) cons = nullptr;
        auto comps = pullback_step(ctx, central, cons);
        bool found = false;
        for (auto& p : comps) {
            if (p.contains(orbit[step])) {
                central = std::move(p);
                found = true;
                break;
            }
        }
        if (!found) {
            std::string msg = "frame central pullback lost its anchor at step " +
                              std::to_string(step) + "/" + std::to_string(m) + " z=(" +
                              std::to_string(orbit[step].real()) + "," +
                              std::to_string(orbit[step].imag()) + ") comps:";
            for (auto& p : comps) {
                char b[160];
                snprintf(b, sizeof b, " [diam %.3e dist %.3e w %d pts %zu]", p.diameter(),
                         p.boundary_distance(orbit[step]),
                         winding_number(p.boundary.pts, orbit[step]), p.boundary.pts.size());
                msg += b;
            }
            throw Error(Err::OnBoundary, msg);
        }
    }
    out.central_geo = central;

    // slaved cells
    for (size_t ci = 0; ci < prev.cells.size(); ++ci) {
        if ((int)ci == sigma_cell) continue;
        std::vector<PieceGeo> cur{prev.cells[ci].geo};
        for (size_t step = m; step-- > 0;) {
            const Footprint* cons = master_chain.empty() ? nullptr : &master_chain[step];
            bool final_sym = cons && cons->is_symmetric();
            std::vector<PieceGeo> next;
            for (auto& g : cur) {
                auto comps = pullback_step(ctx, g, final_sym ? nullptr : cons);
                if (comps.size() == 1) {
                    next.push_back(std::move(comps[0]));
                    continue;
                }
                if (final_sym) {
                    for (auto& p : comps) next.push_back(std::move(p));
                } else if (cons) {
                    bool taken = false;
                    for (auto& p : comps) {
                        if (p.desc.footprint.subset_of(*cons)) {
                            next.push_back(std::move(p));
                            taken = true;
                            break;
                        }
                    }
                    if (!taken)
                        throw Error(Err::RayTraceDiverged,
                                    "frame cell pullback left the master region");
                } else {
                    throw Error(Err::RayTraceDiverged,
                                "frame cell pullback without a constraint");
                }
            }
            cur = std::move(next);
        }
        for (auto& g : cur) {
            FrameCell cell;
            cell.geo = std::move(g);
            cell.source_cell = (int)ci;
            out.cells.push_back(std::move(cell));
        }
    }
    FrameCell cc;
    cc.geo = out.central_geo;
    cc.source_cell = sigma_cell;
    cc.is_central = true;
    out.cells.push_back(std::move(cc));

    // the junction corner: the rays incident at the previous junction are
    // collected from every cell touching it; among pulled corners whose rays
    // descend (m-fold doubling) to that set, the junction is the position
    // where cells of distinct sources meet again
    {
        std::vector<RationalAngle> prev_rays;
        for (const auto& cl : prev.cells) {
            for (const auto& cor : cl.geo.corners) {
                if (std::abs(cor.pt - s_prev.first) > 1e-9 * (1 + std::abs(s_prev.first)))
                    continue;
                for (const auto& t : cor.touching) prev_rays.push_back(t);
            }
        }
        if (prev_rays.empty()) prev_rays.push_back(s_prev.second);
        struct Cand {
            Complex pt;
            RationalAngle ray;
            int source;
        };
        std::vector<Cand> cands;
        for (const auto& cell : out.cells) {
            for (const auto& cor : cell.geo.corners) {
                for (const auto& t : cor.touching) {
                    RationalAngle up = t;
                    for (size_t j = 0; j < m; ++j) up = up.doubled();
                    for (const auto& pr : prev_rays)
                        if (up == pr) cands.push_back({cor.pt, t, cell.source_cell});
                }
            }
        }
        if (cands.empty())
            throw Error(Err::RayTraceDiverged, "lost the frame junction corner");
        // prefer a position shared by at least two distinct sources
        int best = 0;
        int best_sources = 1;
        for (size_t i = 0; i < cands.size(); ++i) {
            std::vector<int> srcs{cands[i].source};
            for (size_t j = 0; j < cands.size(); ++j) {
                if (i == j) continue;
                if (std::abs(cands[i].pt - cands[j].pt) <
                        1e-9 * (1 + std::abs(cands[i].pt)) &&
                    std::find(srcs.begin(), srcs.end(), cands[j].source) == srcs.end())
                    srcs.push_back(cands[j].source);
            }
            if ((int)srcs.size() > best_sources) {
                best_sources = (int)srcs.size();
                best = (int)i;
            }
        }
        out.s_point = cands[best].pt;
        out.s_angle = cands[best].ray;
        out.s_host = -1;
        for (size_t idx = 0; idx < out.cells.size(); ++idx)
            for (const auto& cor : out.cells[idx].geo.corners)
                if (std::abs(cor.pt - out.s_point) < 1e-12 * (1 + std::abs(out.s_point)))
                    out.s_host = (int)idx;
    }
    return out;
}

void label_frame(Frame& fr, const Frame& prev, const LabelChain& sigma) {
    int central = -1;
    for (size_t i = 0; i < fr.cells.size(); ++i)
        if (fr.cells[i].is_central) central = (int)i;
    fr.central_cell = central;
    // merged cell: Z_0 sigma
    fr.cells[central].label.symbols.clear();
    fr.cells[central].label.symbols.push_back(0);
    for (int s : sigma.symbols) fr.cells[central].label.symbols.push_back(s);

    std::vector<int> half = half_assignment(fr.cells, central);
    for (size_t i = 0; i < fr.cells.size(); ++i) {
        if ((int)i == central) continue;
        const LabelChain& src = prev.cells[fr.cells[i].source_cell].label;
        fr.cells[i].label.symbols.clear();
        fr.cells[i].label.symbols.push_back(half[i] == 0 ? kSymL : kSymR);
        for (int s : src.symbols) fr.cells[i].label.symbols.push_back(s);
    }
}

}  // namespace

NestSummary build_nest(const ComplexParam& cp, std::uint64_t p, std::uint64_t q,
                       const NestOptions& opt) {
    NestSummary nest;
    nest.levels.reserve(opt.max_level + 2);
    nest.c = cp.c;
    nest.p = p;
    nest.q = q;
    nest.shallow = build_puzzle(cp, p, q, opt.shallow_depth, opt.puzzle);
    Puzzle& puz = nest.shallow;

    auto [kq, nu] = first_escape(puz, opt.max_escape_k);
    nest.kq = kq;
    nest.nu = nu;

    auto orb = opt.c_decimal.empty()
                   ? critical_orbit(cp, (int)opt.iterate_budget + 2)
                   : critical_orbit_hi(opt.c_decimal, (int)opt.iterate_budget + 2);
    if (orb.escaped)
        throw Error(Err::WrongLimb, "critical orbit escapes; no nest");
    const auto& z = orb.points;

    PullbackContext ctx(cp.c, opt.puzzle);
    PieceRegistry registry;
    for (auto& lvl : puz.levels)
        for (auto& pc : lvl) registry.add(&pc);

    auto make_locator = [&](int final_depth, size_t /*m*/) {
        // region at step j is the j-fold image of the result: depth final - j
        return ConstraintLocator([&registry, final_depth](size_t step, Complex zz) {
            return registry.locate(zz, final_depth - (int)step);
        });
    };

    // V_0^0: pull Z_nu back along the first kq iterates
    NestLevel lvl0;
    lvl0.level = 0;
    {
        const PieceGeo& znu = puz.levels[1][puz.z_index[nu]];
        std::vector<Complex> seg(z.begin(), z.begin() + kq + 1);
        int final_depth = znu.desc.depth + (int)kq;
        lvl0.central = pullback_along_orbit(ctx, znu, seg, &lvl0.chain,
                                            make_locator(final_depth, kq));
        lvl0.return_time = 0;
    }
    nest.levels.push_back(std::move(lvl0));

    // higher levels
    std::string stop = "max_level";
    for (int n = 1; n <= opt.max_level; ++n) {
        const PieceGeo& prev = nest.levels[n - 1].central;
        BBox box = bounding_box(prev.boundary.pts);
        long ell = -1;
        for (long j = 1; j + 1 < (long)z.size(); ++j) {
            if (!box.contains(z[j], 1e-12)) continue;
            if (prev.contains(z[j])) {
                ell = j;
                break;
            }
        }
        if (ell < 0) {
            stop = "BudgetExhausted: no return to V_0^" + std::to_string(n - 1) +
                   " within the iterate budget";
            break;
        }
        NestLevel lvl;
        lvl.level = n;
        lvl.return_time = ell;
        lvl.central_return = n >= 2 && ell == nest.levels[n - 1].return_time;
        try {
            std::vector<Complex> seg(z.begin(), z.begin() + ell + 1);
            int final_depth = prev.desc.depth + (int)ell;
            lvl.central = pullback_along_orbit(ctx, prev, seg, &lvl.chain,
                                               make_locator(final_depth, ell));
        } catch (const Error& e) {
            throw Error(e.code(), "central level " + std::to_string(n) + ": " + e.what());
        }
        // gql descriptor for the central piece
        {
            GqlMapDescriptor g;
            g.level = n;
            g.index = 0;
            g.iterate_count = ell;
            g.degree = 2;
            g.domain = lvl.central.desc;
            g.codomain = prev.desc;
            lvl.gql.push_back(g);
        }
        nest.levels.push_back(std::move(lvl));
        NestLevel& cur = nest.levels[n];

        // lateral pieces: returns of the critical orbit to V_0^{n-1} that
        // miss V_0^n, ordered by first visit
        long horizon = std::min<long>((long)z.size() - 2,
                                      opt.lateral_cap_a * ell + opt.lateral_cap_b);
        for (long j = 1; j <= horizon; ++j) {
            if (!box.contains(z[j], 1e-12)) continue;
            if (!prev.contains(z[j])) continue;
            if (prev.boundary_distance(z[j]) < 1e-11) continue;  // too marginal
            if (cur.central.contains(z[j])) continue;
            bool in_existing = false;
            for (const auto& lat : cur.laterals)
                if (lat.contains(z[j])) in_existing = true;
            if (in_existing) continue;
            if (cur.laterals.size() >= 32)
                throw Error(Err::BudgetExhausted, "unexpectedly many lateral pieces");
            // first return of z_j to V_0^{n-1}
            long r = -1;
            for (long s = 1; j + s + 1 < (long)z.size(); ++s) {
                if (box.contains(z[j + s], 1e-12) && prev.contains(z[j + s])) {
                    r = s;
                    break;
                }
            }
            if (r < 0) break;  // budget: stop materializing laterals
            std::vector<Complex> seg(z.begin() + j, z.begin() + j + r + 1);
            std::vector<Footprint> chain;
            int final_depth = prev.desc.depth + (int)r;
            PieceGeo lat;
            try {
                lat = pullback_along_orbit(ctx, prev, seg, &chain,
                                           make_locator(final_depth, r));
            } catch (const Error& e) {
                // a marginal candidate: likely a precision artifact of deep
                // iterates; record and move on
                nest.warnings.push_back("lateral candidate at level " +
                                        std::to_string(n) + " entry " +
                                        std::to_string(j) + " skipped: " + e.what());
                continue;
            }
            GqlMapDescriptor g;
            g.level = n;
            g.index = (int)cur.laterals.size() + 1;
            g.iterate_count = r;
            g.degree = 1;
            g.domain = lat.desc;
            g.codomain = prev.desc;
            cur.gql.push_back(g);
            cur.laterals.push_back(std::move(lat));
            cur.lateral_entry.push_back(j);
            cur.lateral_return.push_back(r);
            cur.lateral_chains.push_back(std::move(chain));
        }
        for (const auto& lat : cur.laterals) registry.add(&lat);
        registry.add(&cur.central);  // central is symmetric: ignored by add()

        // renormalization heuristic: ell constant over the window
        if (n >= opt.renorm_window) {
            bool constant = true;
            for (int i = n - opt.renorm_window + 1; i <= n; ++i)
                if (nest.levels[i].return_time != nest.levels[n].return_time)
                    constant = false;
            if (constant) {
                stop = "RenormalizationDetected: return times constant over window";
                break;
            }
        }
        if (nest.levels[n].return_time > opt.iterate_budget) {
            stop = "BudgetExhausted: return time exceeds the iterate budget";
            break;
        }
    }
    nest.stop_reason = stop;

    // ---- frames
    if (kq != (long)q) {
        nest.stop_reason += "; frames skipped (first escape beyond q)";
        return nest;
    }

    // F_0
    Frame f0;
    f0.level = 0;
    {
        std::vector<int> cell_pieces{puz.critical_index[1]};
        for (std::uint64_t j = 1; j < q; ++j) cell_pieces.push_back(puz.z_index[j]);
        // sectors at -alpha from the depth-1 angles landing there: the
        // non-cycle endpoints of the Z cells
        std::vector<RationalAngle> tprime;
        for (std::uint64_t j = 1; j < q; ++j) {
            const auto& fp = puz.levels[1][puz.z_index[j]].desc.footprint;
            for (const auto& iv : fp.intervals()) {
                tprime.push_back(iv.a);
                tprime.push_back(iv.b);
            }
        }
        std::sort(tprime.begin(), tprime.end());
        tprime.erase(std::unique(tprime.begin(), tprime.end(),
                                 [](const RationalAngle& a, const RationalAngle& b) {
                                     return a == b;
                                 }),
                     tprime.end());
        auto sector_of = [&](const RationalAngle& t) {
            for (size_t i = 0; i < tprime.size(); ++i) {
                const RationalAngle& a = tprime[i];
                const RationalAngle& b = tprime[(i + 1) % tprime.size()];
                if (t == a || t.in_arc(a, b)) return (int)i;
            }
            return -1;
        };
        std::vector<std::pair<int, int>> order;  // (sector, piece index)
        for (int pcidx : cell_pieces) {
            const auto& fp = puz.levels[1][pcidx].desc.footprint;
            order.push_back({sector_of(fp.intervals()[0].a), pcidx});
        }
        int central_sector = order[0].first;
        std::sort(order.begin(), order.end(), [&](auto& a, auto& b) {
            int sa = (a.first - central_sector + (int)tprime.size()) % (int)tprime.size();
            int sb = (b.first - central_sector + (int)tprime.size()) % (int)tprime.size();
            return sa < sb;
        });
        for (size_t i = 0; i < order.size(); ++i) {
            FrameCell cell;
            cell.geo = puz.levels[1][order[i].second];
            cell.label.symbols = {(int)i};
            cell.is_central = order[i].second == puz.critical_index[1];
            if (cell.is_central) f0.central_cell = (int)i;
            f0.cells.push_back(std::move(cell));
        }
    }
    f0.s_point = -puz.fixed.alpha;
    f0.s_host = f0.central_cell;
    {
        // an endpoint of the central cell landing at -alpha: any footprint
        // endpoint outside the alpha cycle
        auto cyc = rotation_cycle(p, q);
        for (const auto& iv : f0.cells[f0.central_cell].geo.desc.footprint.intervals()) {
            for (const RationalAngle* t : {&iv.a, &iv.b}) {
                bool in_cycle = false;
                for (const auto& a : cyc)
                    if (a == *t) in_cycle = true;
                if (!in_cycle) f0.s_angle = *t;
            }
        }
    }
    nest.frames.push_back(std::move(f0));

    // master chains for F_1 (critical depth-0 piece) and F_2 (depth-1)
    auto orbit_prefix = [&](long m) {
        return std::vector<Complex>(z.begin(), z.begin() + m + 1);
    };

    int max_frames = std::min(opt.max_frame_level, (int)nest.levels.size() + 1);
    for (int t = 1; t <= max_frames; ++t) {
        const Frame& prev = nest.frames[t - 1];
        long step;
        std::vector<Footprint> master_chain;
        if (t == 1) {
            step = kq;
            pullback_along_orbit(ctx, puz.levels[0][puz.critical_index[0]],
                                 orbit_prefix(kq), &master_chain,
                                 make_locator((int)kq, kq));
        } else if (t == 2) {
            // first return of 0 to a cell of F_1
            long lam = -1;
            for (long j = 1; j + 1 < (long)z.size() && lam < 0; ++j)
                for (const auto& cl : prev.cells)
                    if (cl.geo.contains(z[j])) {
                        lam = j;
                        break;
                    }
            if (lam < 0) break;
            nest.lambda = lam;
            step = lam;
            pullback_along_orbit(ctx, puz.levels[1][puz.critical_index[1]],
                                 orbit_prefix(lam), &master_chain,
                                 make_locator(1 + (int)lam, lam));
        } else {
            if (t - 2 >= (int)nest.levels.size()) break;
            step = nest.levels[t - 2].return_time;
            if (step <= 0) break;
            master_chain = nest.levels[t - 2].chain;
        }

        int sigma_cell = prev.cell_containing_point(z[step]);
        if (sigma_cell < 0) break;
        nest.sigmas.push_back(prev.cells[sigma_cell].label);

        FramePullResult pulled = pull_frame(ctx, prev, sigma_cell, orbit_prefix(step),
                                            master_chain, {prev.s_point, prev.s_angle},
                                            prev.s_host);
        Frame fr;
        fr.level = t;
        fr.host_index = 0;
        fr.cells = std::move(pulled.cells);
        fr.s_point = pulled.s_point;
        fr.s_angle = pulled.s_angle;
        fr.s_host = pulled.s_host;
        label_frame(fr, prev, nest.sigmas.back());
        nest.frames.push_back(std::move(fr));

        // lateral frames F_{t,k} inside V_k^{t-2}
        nest.lateral_frames.push_back({});
        if (opt.build_lateral_frames && t >= 2 && t - 2 < (int)nest.levels.size()) {
            const NestLevel& host = nest.levels[t - 2];
            for (size_t k = 0; k < host.laterals.size(); ++k) {
                long e = host.lateral_entry[k];
                long r = host.lateral_return[k];
                std::vector<Complex> seg(z.begin() + e, z.begin() + e + r + 1);
                Frame lf;
                lf.level = t;
                lf.host_index = (int)k + 1;
                const Frame& base = nest.frames[t - 1];
                for (size_t ci = 0; ci < base.cells.size(); ++ci) {
                    std::vector<PieceGeo> cur{base.cells[ci].geo};
                    for (size_t stp = seg.size() - 1; stp-- > 0;) {
                        const Footprint& cons = host.lateral_chains[k][stp];
                        auto comps = pullback_step(ctx, cur[0], &cons);
                        bool taken = false;
                        for (auto& pcc : comps)
                            if (pcc.desc.footprint.subset_of(cons)) {
                                cur[0] = std::move(pcc);
                                taken = true;
                                break;
                            }
                        if (!taken)
                            throw Error(Err::RayTraceDiverged,
                                        "lateral frame cell left its host");
                    }
                    FrameCell cell;
                    cell.geo = std::move(cur[0]);
                    cell.label = base.cells[ci].label;
                    cell.source_cell = (int)ci;
                    cell.is_central = base.cells[ci].is_central;
                    lf.cells.push_back(std::move(cell));
                }
                nest.lateral_frames.back().push_back(std::move(lf));
            }
        }
    }
    return nest;
}

Itinerary itinerary(const NestSummary& nest, int level, int index) {
    Itinerary chi;
    int n = level;
    if (n < 1 || n >= (int)nest.levels.size())
        throw Error(Err::InvalidArgument, "itinerary level out of range");
    const NestLevel& lower = nest.levels[n - 1];
    const NestLevel& upper = nest.levels[n];
    const PieceGeo* piece =
        index == 0 ? &upper.central
                   : (index - 1 < (int)upper.laterals.size() ? &upper.laterals[index - 1]
                                                             : nullptr);
    if (!piece) throw Error(Err::InvalidArgument, "no such nest piece");
    if (n + 1 >= (int)nest.frames.size())
        throw Error(Err::InvalidArgument, "frames not built deep enough for itinerary");

    // track the footprint of successive level-(n-1) return images
    Footprint curf = piece->desc.footprint;
    auto advance = [&](long iterates) {
        Footprint f = curf;
        for (long s = 0; s < iterates; ++s) f = f.image();
        curf = f;
    };
    // first map: g_n restricted to this piece is f^{r_{n,index}}; the
    // itinerary instead records the level-(n-1) stops, so iterate g_{n-1}
    // starting from the first return of the piece into level n-1
    long r0 = index == 0 ? upper.return_time : upper.lateral_return[index - 1];
    (void)r0;
    const Footprint& target = lower.central.desc.footprint;

    // g_{n-1} on the piece: it sits inside V_0^{n-1}, so apply the first
    // return to V_0^{n-2} repeatedly
    advance(lower.return_time);
    int guard = 64;
    while (guard-- > 0) {
        // which level-(n-1) piece contains the current image
        int k = -1;
        long rk = 0;
        if (curf.subset_of(lower.central.desc.footprint) ||
            curf == lower.central.desc.footprint) {
            k = 0;
            rk = lower.return_time;
        } else {
            for (size_t i = 0; i < lower.laterals.size(); ++i)
                if (curf.subset_of(lower.laterals[i].desc.footprint) ||
                    curf == lower.laterals[i].desc.footprint) {
                    k = (int)i + 1;
                    rk = lower.lateral_return[i];
                }
        }
        if (k < 0)
            throw Error(Err::AdmissibilityViolation,
                        "itinerary image escaped the level pieces");
        // frame cell label: the cell of F_{n+1,k} containing the image
        const Frame* host_frame = nullptr;
        if (k == 0) {
            host_frame = &nest.frames[n + 1];
        } else if (n + 1 - 1 < (int)nest.lateral_frames.size() &&
                   k - 1 < (int)nest.lateral_frames[n + 1 - 1].size()) {
            host_frame = &nest.lateral_frames[n + 1 - 1][k - 1];
        }
        LabelChain lbl;
        if (host_frame) {
            int ci = host_frame->cell_containing(curf);
            if (ci >= 0) lbl = host_frame->cells[ci].label;
        }
        chi.pairs.push_back({k, lbl});
        if (k == 0 && (curf == target || curf.subset_of(target))) {
            // admissibility: the last label must start with Z_0
            if (!lbl.symbols.empty() && lbl.symbols[0] != 0)
                chi.admissibility_violations.push_back(
                    "final cell label does not start with Z_0");
        }
        if (k == 0) break;
        advance(rk);
    }
    return chi;
}

}  // namespace nestlab
