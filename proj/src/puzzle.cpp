#include "nestlab/puzzle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace nestlab {

namespace {

struct Run {
    int tag;            // arc interval index (source indexing), kTagRay, kTagLanding
    size_t begin, end;  // [begin, end) into the curve arrays
};

std::vector<Run> extract_runs(const std::vector<int>& tags) {
    std::vector<Run> runs;
    size_t n = tags.size();
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && tags[j] == tags[i]) ++j;
        runs.push_back({tags[i], i, j});
        i = j;
    }
    // merge wrap-around run
    if (runs.size() > 1 && runs.front().tag == runs.back().tag) {
        runs.back().end = runs.front().end + n;  // virtual extension
        runs.erase(runs.begin());
    }
    return runs;
}

// Angle of each ray run, derived from neighbouring arc runs: the ray between
// arc(I) and later boundary pieces starts at an endpoint of I.
struct RunAngles {
    std::vector<std::optional<RationalAngle>> ray_angle;  // per run
};

RunAngles ray_run_angles(const std::vector<Run>& runs, const Footprint& fp,
                         const std::vector<int>& /*tags*/) {
    RunAngles ra;
    size_t m = runs.size();
    ra.ray_angle.resize(m);
    auto arc_of = [&](size_t r) -> std::optional<int> {
        if (runs[r].tag >= 0) return runs[r].tag;
        return std::nullopt;
    };
    for (size_t r = 0; r < m; ++r) {
        if (runs[r].tag != kTagRay) continue;
        // walk backward to previous arc run, counting landings between
        size_t back = (r + m - 1) % m;
        int hops = 0;
        while (runs[back].tag < 0 && hops < 4) {
            back = (back + m - 1) % m;
            ++hops;
        }
        size_t fwd = (r + 1) % m;
        int fhops = 0;
        while (runs[fwd].tag < 0 && fhops < 4) {
            fwd = (fwd + 1) % m;
            ++fhops;
        }
        auto prev_arc = arc_of(back);
        auto next_arc = arc_of(fwd);
        // descending ray after arc I ends at b(I); ascending ray before arc J
        // starts at a(J).  Identify by whether a landing separates us from the
        // previous arc.
        bool landing_before = runs[(r + m - 1) % m].tag == kTagLanding;
        if (!landing_before && prev_arc) {
            ra.ray_angle[r] = fp.intervals()[*prev_arc].b;
        } else if (next_arc) {
            ra.ray_angle[r] = fp.intervals()[*next_arc].a;
        } else if (prev_arc) {
            ra.ray_angle[r] = fp.intervals()[*prev_arc].b;
        }
    }
    return ra;
}

Complex pull_root(Complex c, Complex w, Complex near) {
    Complex r = std::sqrt(w - c);
    return std::norm(r - near) <= std::norm(-r - near) ? r : -r;
}

// Continuity pullback of a closed tagged curve.  Returns the walk (closed; for
// a 2-to-1 source region the walk traverses the source twice).  src_index[i]
// records the source point index each pulled point derives from.
struct PulledWalk {
    Polyline pts;
    std::vector<int> tags;       // source tags
    std::vector<int> src_index;  // source point index
    bool degree_two = false;
};

PulledWalk pull_curve(Complex c, const TaggedCurve& src, bool degree_two) {
    // pull back through the continuous branch of sqrt(w - c): the argument of
    // w - c is unwrapped along the walk, so the branch follows the curve even
    // through the critical passage, and the 2 pi monodromy of a 2-to-1 source
    // negates the second pass automatically
    PulledWalk out;
    out.degree_two = degree_two;
    size_t n = src.pts.size();
    int passes = degree_two ? 2 : 1;

    double theta = std::arg(src.pts[0] - c);
    auto point_at = [&](Complex w, double th) {
        return std::polar(std::sqrt(std::abs(w - c)), th / 2);
    };
    out.pts.push_back(point_at(src.pts[0], theta));
    out.tags.push_back(src.tags[0]);
    out.src_index.push_back(0);

    auto emit = [&](Complex z, int tag, int sidx) {
        out.pts.push_back(z);
        out.tags.push_back(tag);
        out.src_index.push_back(sidx);
    };

    // advance theta continuously from w0 to w1, subdividing when the argument
    // or the log-radius moves too fast
    auto advance = [&](Complex w0, Complex w1, int tag, int sidx, auto&& self,
                       int depth) -> void {
        double a0 = std::arg(w0 - c);
        double a1 = std::arg(w1 - c);
        double da = a1 - a0;
        while (da > M_PI) da -= 2 * M_PI;
        while (da < -M_PI) da += 2 * M_PI;
        double r0 = std::abs(w0 - c), r1 = std::abs(w1 - c);
        bool fine = std::abs(da) < 0.5 &&
                    (r0 == 0 || r1 == 0 || std::abs(std::log(r1 / r0)) < 0.5);
        if (!fine && depth < 48) {
            Complex wm = 0.5 * (w0 + w1);
            self(w0, wm, tag, sidx, self, depth + 1);
            self(wm, w1, tag, sidx, self, depth + 1);
            return;
        }
        theta += da;
        emit(point_at(w1, theta), tag, sidx);
    };

    double theta0 = theta;
    for (int pass = 0; pass < passes; ++pass) {
        for (size_t i = 1; i <= n; ++i) {
            size_t j = i % n;
            if (pass == passes - 1 && i == n) break;  // closure implicit
            advance(src.pts[(i - 1) % n], src.pts[j], src.tags[j], (int)j, advance, 0);
        }
        if (getenv("NESTLAB_SPLIT_DEBUG"))
            fprintf(stderr, "pull_curve pass %d: dtheta/2pi = %.4f  (deg2=%d)\n", pass,
                    (theta - theta0) / (2 * M_PI), (int)degree_two);
    }
    return out;
}

void decimate_tagged(Polyline& pts, std::vector<int>& tags, size_t max_points) {
    if (pts.size() <= max_points) return;
    double perim = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) perim += std::abs(pts[i + 1] - pts[i]);
    double min_step = perim / (double)max_points;
    Polyline np;
    std::vector<int> nt;
    np.push_back(pts[0]);
    nt.push_back(tags[0]);
    double acc = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
        acc += std::abs(pts[i] - pts[i - 1]);
        bool keep = acc >= min_step || tags[i] != tags[i - 1] ||
                    (i + 1 < pts.size() && tags[i + 1] != tags[i]) || tags[i] == kTagLanding;
        if (keep) {
            np.push_back(pts[i]);
            nt.push_back(tags[i]);
            acc = 0;
        }
    }
    pts = std::move(np);
    tags = std::move(nt);
}

void decimate_witness(Polyline& pts, std::vector<double>& pot, size_t max_points) {
    if (pts.size() <= max_points) return;
    Polyline np;
    std::vector<double> npot;
    double last_log = 1e300;
    double step = std::log(pot.front() / std::max(pot.back(), 1e-280)) / (double)max_points;
    for (size_t i = 0; i < pts.size(); ++i) {
        double lg = std::log(std::max(pot[i], 1e-280));
        if (i == 0 || i + 1 == pts.size() || last_log - lg >= step) {
            np.push_back(pts[i]);
            npot.push_back(pot[i]);
            last_log = lg;
        }
    }
    pts = std::move(np);
    pot = std::move(npot);
}

}  // namespace

PullbackContext::PullbackContext(Complex c, const PuzzleOptions& opt) : c_(c), opt_(opt) {}

const RayTrace& PullbackContext::shallow_ray(const RationalAngle& angle, double floor) {
    size_t key = angle.hash() ^ std::hash<double>()(floor);
    auto it = ray_cache_.find(key);
    if (it != ray_cache_.end()) return it->second;
    RayOptions ro;
    ro.target_potential = floor;
    ro.want_landing = false;
    RayTrace rt = trace_ray(ComplexParam(c_), angle, ro);
    return ray_cache_.emplace(key, std::move(rt)).first->second;
}

// ---------------------------------------------------------------------------
// pullback_step

std::vector<PieceGeo> pullback_step(PullbackContext& ctx, const PieceGeo& src,
                                    const Footprint* constraint) {
    const Complex c = ctx.c();
    const Footprint& F = src.desc.footprint;
    const auto& ivs = F.intervals();
    const size_t K = ivs.size();

    // child interval candidates per source interval
    std::vector<AngleInterval> child0(K), child1(K);
    for (size_t k = 0; k < K; ++k) {
        child0[k] = halve_interval(ivs[k]);
        child1[k] = AngleInterval{child0[k].a.half_turn(), child0[k].b.half_turn()};
    }

    // --- witness: pull the witness polyline, then identify its new angle by
    // matching against the two halved candidates at high potential.
    Polyline wpts;
    std::vector<double> wpot;
    wpts.reserve(src.witness_pts.size());
    wpot.reserve(src.witness_pot.size());
    {
        Complex prev = std::sqrt(src.witness_pts[0] - c);
        wpts.push_back(prev);
        wpot.push_back(src.witness_pot[0] / 2);
        for (size_t i = 1; i < src.witness_pts.size(); ++i) {
            prev = pull_root(c, src.witness_pts[i], prev);
            wpts.push_back(prev);
            wpot.push_back(src.witness_pot[i] / 2);
        }
    }
    RationalAngle u = src.witness_angle.halved();
    RationalAngle u_alt = u.half_turn();
    {
        double p_match = wpot.front();
        const RayTrace& cand = ctx.shallow_ray(u, std::min(p_match, kTopPotential / 2));
        Complex cu = cand.at_potential(p_match);
        double d0 = std::abs(cu - wpts.front());
        double d1 = std::abs(cu + wpts.front());  // r_{u+1/2} = -r_u
        if (d1 < d0) {
            std::swap(u, u_alt);
        }
        // glue the shallow extension so the witness keeps full height
        const RayTrace& ext = ctx.shallow_ray(u, std::min(p_match, kTopPotential / 2));
        Polyline gd;
        std::vector<double> gp;
        for (size_t i = 0; i < ext.samples.size(); ++i) {
            if (ext.potentials[i] > p_match * (1 + 1e-12)) {
                gd.push_back(ext.samples[i]);
                gp.push_back(ext.potentials[i]);
            }
        }
        wpts.insert(wpts.begin(), gd.begin(), gd.end());
        wpot.insert(wpot.begin(), gp.begin(), gp.end());
    }

    const bool degree_two = src.contains(c);
    PulledWalk walk = pull_curve(c, src.boundary, degree_two);

    // align the walk with the witness branch: a pulled point of the source
    // witness ray must lie on the pulled witness polyline (angle u), not on
    // its negative
    std::vector<Run> src_runs = extract_runs(src.boundary.tags);
    RunAngles src_ra = ray_run_angles(src_runs, F, src.boundary.tags);
    int witness_src_run = -1;
    for (size_t r = 0; r < src_runs.size(); ++r)
        if (src_runs[r].tag == kTagRay && src_ra.ray_angle[r] &&
            *src_ra.ray_angle[r] == src.witness_angle)
            witness_src_run = (int)r;
    if (witness_src_run < 0)
        throw Error(Err::RayTraceDiverged, "piece lost its witness ray run");
    if (!degree_two) {
        size_t mid_src =
            (src_runs[witness_src_run].begin + src_runs[witness_src_run].end) / 2 %
            src.boundary.pts.size();
        // find a pulled point with that source index
        Complex probe{};
        bool found = false;
        for (size_t i = 0; i < walk.pts.size(); ++i)
            if (walk.src_index[i] == (int)mid_src) {
                probe = walk.pts[i];
                found = true;
                break;
            }
        if (found) {
            double d0 = distance_to_polyline(wpts, probe);
            double d1 = distance_to_polyline(wpts, -probe);
            if (d1 < d0)
                for (auto& z : walk.pts) z = -z;
        }
    }

    // --- per-run resolution of the angle-halving choice
    std::vector<Run> runs = extract_runs(walk.tags);
    const size_t NW = walk.pts.size();
    const size_t NR = runs.size();
    const double t_child = std::ldexp(M_LN2, -(src.desc.depth + 1));

    std::vector<int> bit(NR, -1);  // arc runs: 0 -> child0, 1 -> child1
    std::vector<std::optional<RationalAngle>> ray_ang(NR);
    std::vector<std::optional<RationalAngle>> src_ray(NR);

    auto src_run_of = [&](size_t widx) -> int {
        int sidx = walk.src_index[widx % NW];
        size_t n = src.boundary.pts.size();
        for (size_t sr = 0; sr < src_runs.size(); ++sr) {
            size_t b = src_runs[sr].begin, e = src_runs[sr].end;  // e may exceed n (wrap)
            if (((size_t)sidx >= b && (size_t)sidx < e) ||
                ((size_t)sidx + n >= b && (size_t)sidx + n < e))
                return (int)sr;
        }
        return -1;
    };
    for (size_t r = 0; r < NR; ++r) {
        if (runs[r].tag != kTagRay) continue;
        int sr = src_run_of((runs[r].begin + runs[r].end) / 2);
        if (sr >= 0 && src_ra.ray_angle[sr]) src_ray[r] = src_ra.ray_angle[sr];
    }

    // seed: pullbacks of the witness ray match the pulled witness branch or
    // its negative
    for (size_t r = 0; r < NR; ++r) {
        if (runs[r].tag != kTagRay || !src_ray[r]) continue;
        if (!(*src_ray[r] == src.witness_angle)) continue;
        Complex s = walk.pts[(runs[r].begin + runs[r].end) / 2 % NW];
        double du = distance_to_polyline(wpts, s);
        double da = distance_to_polyline(wpts, -s);
        ray_ang[r] = (du <= da) ? u : u_alt;
    }

    // constraint pass: a containing piece disjoint from its own half turn
    // decides every pair at once
    std::vector<int> cbit(K, -1);
    if (constraint && !constraint->is_symmetric()) {
        for (size_t k = 0; k < K; ++k) {
            bool c0 = Footprint({child0[k]}).subset_of(*constraint);
            bool c1 = Footprint({child1[k]}).subset_of(*constraint);
            if (c0 == c1) continue;  // indecisive for this pair
            cbit[k] = c0 ? 0 : 1;
        }
    }

    auto neighbors_of = [&](size_t r) {
        return std::pair<size_t, size_t>{(r + NR - 1) % NR, (r + 1) % NR};
    };

    // propagation between runs sharing a corner (landings block)
    auto propagate = [&]() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t r = 0; r < NR; ++r) {
                auto [rp, rn] = neighbors_of(r);
                if (runs[r].tag >= 0 && bit[r] >= 0) {
                    const AngleInterval& iv = bit[r] == 0 ? child0[runs[r].tag]
                                                          : child1[runs[r].tag];
                    for (size_t rr : {rp, rn}) {
                        if (runs[rr].tag == kTagRay && !ray_ang[rr] && src_ray[rr]) {
                            RationalAngle v0 = src_ray[rr]->halved();
                            RationalAngle v1 = v0.half_turn();
                            if (v0 == iv.a || v0 == iv.b)
                                ray_ang[rr] = v0, changed = true;
                            else if (v1 == iv.a || v1 == iv.b)
                                ray_ang[rr] = v1, changed = true;
                        }
                    }
                } else if (runs[r].tag == kTagRay && ray_ang[r]) {
                    for (size_t rr : {rp, rn}) {
                        if (runs[rr].tag >= 0 && bit[rr] < 0) {
                            int k = runs[rr].tag;
                            bool m0 = (child0[k].a == *ray_ang[r] || child0[k].b == *ray_ang[r]);
                            bool m1 = (child1[k].a == *ray_ang[r] || child1[k].b == *ray_ang[r]);
                            if (m0 != m1) {
                                bit[rr] = m0 ? 0 : 1;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
    };
    propagate();

    // apply the constraint to still-unresolved arc runs.  The walk is the
    // component inside the constraint iff its witness-adjacent arc child is.
    if (!degree_two) {
        int wit_run = -1;
        for (size_t r = 0; r < NR; ++r)
            if (runs[r].tag == kTagRay && ray_ang[r] &&
                (*ray_ang[r] == u || *ray_ang[r] == u_alt))
                wit_run = (int)r;
        bool have_side = false, walk_constrained = false;
        for (size_t r = 0; r < NR && !have_side; ++r) {
            if (runs[r].tag < 0 || bit[r] < 0 || cbit[runs[r].tag] < 0) continue;
            have_side = true;
            walk_constrained = (bit[r] == cbit[runs[r].tag]);
        }
        if (!have_side && wit_run >= 0) {
            // resolve the witness-adjacent arc directly from u
            auto [rp, rn] = neighbors_of((size_t)wit_run);
            for (size_t rr : {rp, rn}) {
                if (runs[rr].tag < 0) continue;
                int k = runs[rr].tag;
                bool m0 = (child0[k].a == *ray_ang[wit_run] || child0[k].b == *ray_ang[wit_run]);
                if (cbit[k] >= 0) {
                    have_side = true;
                    walk_constrained = (m0 ? 0 : 1) == cbit[k];
                    break;
                }
            }
        }
        if (have_side) {
            for (size_t r = 0; r < NR; ++r) {
                if (runs[r].tag < 0 || bit[r] >= 0) continue;
                int k = runs[r].tag;
                if (cbit[k] < 0) continue;
                bit[r] = walk_constrained ? cbit[k] : 1 - cbit[k];
            }
            propagate();
        }
    }

    // real parameters: the leading binary digit of a boundary angle is the
    // half-plane of the point (conjugation symmetry), so arc runs resolve by
    // the sign of the imaginary part; runs crossing the axis resolve by the
    // sign of the real crossing (positive reals carry angle 0)
    if (ctx.real_param()) {
        RationalAngle zero(0, 1), half(1, 2);
        for (size_t r = 0; r < NR; ++r) {
            if (runs[r].tag < 0 || bit[r] >= 0) continue;
            int k = runs[r].tag;
            bool straddle0 = child0[k].contains_closed(zero) || child0[k].contains_closed(half);
            if (!straddle0) {
                // pick the sample farthest from the axis
                double best = 0;
                double im = 0;
                for (size_t i = runs[r].begin; i < runs[r].end; ++i) {
                    double v = walk.pts[i % NW].imag();
                    if (std::abs(v) > best) {
                        best = std::abs(v);
                        im = v;
                    }
                }
                // no straddle: the interval sits inside (0,1/2) or (1/2,1);
                // endpoints are never 0 or 1/2 for puzzle angles
                bool c0_upper = child0[k].a.in_arc(zero, half);
                bit[r] = ((im > 0) == c0_upper) ? 0 : 1;
            } else {
                // run crosses the real axis once; sign of the crossing decides
                double best = 1e300;
                double re = 0;
                for (size_t i = runs[r].begin; i < runs[r].end; ++i) {
                    Complex zz = walk.pts[i % NW];
                    if (std::abs(zz.imag()) < best) {
                        best = std::abs(zz.imag());
                        re = zz.real();
                    }
                }
                bool c0_has_zero = child0[k].contains_closed(zero);
                bit[r] = ((re > 0) == c0_has_zero) ? 0 : 1;
            }
        }
        propagate();
    }

    // exact fallback: walk the ray upward to shallow height and compare with
    // a direct trace (only doubled angles enter, so the half-turn ambiguity
    // does not obstruct the continuation)
    for (size_t r = 0; r < NR; ++r) {
        if (runs[r].tag != kTagRay || ray_ang[r] || !src_ray[r]) continue;
        bool arcs_done = true;
        for (size_t rr = 0; rr < NR; ++rr)
            if (runs[rr].tag >= 0 && bit[rr] < 0) arcs_done = false;
        if (arcs_done) break;
        if (t_child < 1e-12)
            throw Error(Err::BudgetExhausted,
                        "pullback too deep for exact angle resolution at a complex "
                        "parameter");
        auto [rp, rn] = neighbors_of(r);
        Complex corner;
        if (runs[rn].tag >= 0)
            corner = walk.pts[(runs[r].end - 1) % NW];
        else if (runs[rp].tag >= 0)
            corner = walk.pts[runs[r].begin % NW];
        else
            corner = walk.pts[(runs[r].begin + runs[r].end) / 2 % NW];
        RationalAngle v0 = src_ray[r]->halved();
        double p_top = kTopPotential / 2 * 0.9;
        auto up = continue_ray_up(c, corner, t_child, p_top, v0);
        if (!up)
            throw Error(Err::RayTraceDiverged, "upward ray continuation failed in pullback");
        const RayTrace& ref = ctx.shallow_ray(v0, kTopPotential / 2 * 0.8);
        Complex rv = ref.at_potential(p_top);
        ray_ang[r] = (std::abs(*up - rv) <= std::abs(*up + rv)) ? v0 : v0.half_turn();
        propagate();
    }
    // arcs that remain unresolved (blocked by landings on both sides) are
    // settled through their rays above; anything left is an error
    for (size_t r = 0; r < NR; ++r) {
        if (runs[r].tag >= 0 && bit[r] < 0)
            throw Error(Err::RayTraceDiverged, "footprint split unresolved");
    }

    // validation: each pair appears once (conformal) or twice with opposite
    // bits (2-to-1)
    {
        std::vector<int> seen(K, -1);
        for (size_t r = 0; r < NR; ++r) {
            if (runs[r].tag < 0) continue;
            int k = runs[r].tag;
            bool bad = false;
            if (seen[k] < 0)
                seen[k] = bit[r];
            else if (degree_two)
                bad = seen[k] == bit[r];
            else
                bad = seen[k] != bit[r];
            if (bad) {
                std::string msg = "footprint split inconsistency";
                if (getenv("NESTLAB_SPLIT_DEBUG")) {
                    msg += ": deg2=" + std::to_string(degree_two) +
                           " depth=" + std::to_string(src.desc.depth) + " runs:";
                    for (size_t rr = 0; rr < NR; ++rr) {
                        msg += " (" + std::to_string(runs[rr].tag) + ":" +
                               std::to_string(runs[rr].tag >= 0 ? bit[rr] : -9) + ")";
                    }
                    msg += " cons=" + std::string(constraint ? "yes" : "no");
                }
                throw Error(Err::RayTraceDiverged, msg);
            }
        }
    }

    std::vector<PieceGeo> outputs;
    auto emit_piece = [&](const Polyline& pts, bool negated, bool is_deg2) {
        // footprint and per-point.retag
        std::vector<AngleInterval> sel;
        for (size_t k = 0; k < K; ++k) {
            if (is_deg2) {
                sel.push_back(child0[k]);
                sel.push_back(child1[k]);
            } else {
                int b = -1;
                for (size_t r = 0; r < NR; ++r)
                    if (runs[r].tag == (int)k) b = bit[r];
                if (negated) b = 1 - b;
                sel.push_back(b == 0 ? child0[k] : child1[k]);
            }
        }
        Footprint nf{sel};
        auto idx_of = [&](const AngleInterval& iv) {
            for (size_t i = 0; i < nf.intervals().size(); ++i)
                if (nf.intervals()[i].a == iv.a && nf.intervals()[i].b == iv.b) return (int)i;
            return -1;
        };
        std::vector<int> newtag(pts.size(), kTagRay);
        for (size_t r = 0; r < NR; ++r) {
            int nt;
            if (runs[r].tag < 0) {
                nt = runs[r].tag;
            } else {
                int b = bit[r];
                if (negated) b = 1 - b;
                nt = idx_of(b == 0 ? child0[runs[r].tag] : child1[runs[r].tag]);
            }
            for (size_t i = runs[r].begin; i < runs[r].end; ++i) newtag[i % pts.size()] = nt;
        }

        PieceGeo out;
        out.desc.depth = src.desc.depth + 1;
        out.desc.footprint = nf;
        out.boundary.pts = pts;
        out.boundary.tags = std::move(newtag);
        bool wit_on_walk = nf.contains_angle_closed(u) &&
                           [&] {
                               for (const auto& iv : nf.intervals())
                                   if (iv.a == u || iv.b == u) return true;
                               return false;
                           }();
        if (wit_on_walk) {
            out.witness_angle = u;
            out.witness_pts = wpts;
        } else {
            out.witness_angle = u_alt;
            out.witness_pts.resize(wpts.size());
            for (size_t i = 0; i < wpts.size(); ++i) out.witness_pts[i] = -wpts[i];
        }
        out.witness_pot = wpot;

        // landing corners with the exact angles of their incident rays
        for (size_t r = 0; r < NR; ++r) {
            if (runs[r].tag != kTagLanding) continue;
            Corner cor;
            cor.pt = (negated ? -walk.pts[runs[r].begin % NW] : walk.pts[runs[r].begin % NW]);
            for (int dir : {-1, 1}) {
                size_t rr = (r + NR + dir) % NR;
                if (runs[rr].tag != kTagRay || !src_ray[rr]) continue;
                // the incident ray's angle: the halved source angle matching an
                // endpoint of the arc on its far side
                size_t ra = (rr + NR + dir) % NR;
                int hops = 0;
                while (runs[ra].tag < 0 && hops++ < 3) ra = (ra + NR + dir) % NR;
                if (runs[ra].tag < 0) continue;
                int k = runs[ra].tag;
                int b = bit[ra];
                if (b < 0) continue;
                if (negated) b = 1 - b;
                const AngleInterval& iv = b == 0 ? child0[k] : child1[k];
                RationalAngle v0 = src_ray[rr]->halved();
                RationalAngle v1 = v0.half_turn();
                if (v0 == iv.a || v0 == iv.b)
                    cor.touching.push_back(v0);
                else if (v1 == iv.a || v1 == iv.b)
                    cor.touching.push_back(v1);
            }
            out.corners.push_back(std::move(cor));
        }

        if (is_deg2) {
            out.center = 0;
            out.desc.center_address.clear();
        } else {
            Complex rt = std::sqrt(src.center - c);
            if (winding_number(pts, rt) != 0) {
                out.center = rt;
                out.desc.center_address = src.desc.center_address + "0";
            } else {
                out.center = -rt;
                out.desc.center_address = src.desc.center_address + "1";
            }
        }
        if (winding_number(out.boundary.pts, out.center) < 0) {
            std::reverse(out.boundary.pts.begin(), out.boundary.pts.end());
            std::reverse(out.boundary.tags.begin(), out.boundary.tags.end());
        }
        decimate_tagged(out.boundary.pts, out.boundary.tags,
                        (size_t)ctx.options().max_curve_points);
        decimate_witness(out.witness_pts, out.witness_pot, 4096);
        outputs.push_back(std::move(out));
    };

    if (degree_two) {
        emit_piece(walk.pts, false, true);
    } else {
        emit_piece(walk.pts, false, false);
        Polyline neg(walk.pts.size());
        for (size_t i = 0; i < walk.pts.size(); ++i) neg[i] = -walk.pts[i];
        emit_piece(neg, true, false);
    }
    return outputs;
}

PieceGeo pullback_along_orbit(PullbackContext& ctx, const PieceGeo& src,
                              const std::vector<Complex>& orbit,
                              std::vector<Footprint>* intermediates,
                              const ConstraintLocator& locator) {
    size_t m = orbit.size() - 1;  // orbit has z_0..z_m
    PieceGeo cur = src;
    if (intermediates) {
        intermediates->assign(m + 1, Footprint());
        (*intermediates)[m] = cur.desc.footprint;
    }
    for (size_t step = m; step-- > 0;) {
        const Footprint* constraint = locator ? locator(step, orbit[step]) : nullptr;
        auto comps = pullback_step(ctx, cur, constraint);
        bool found = false;
        for (auto& p : comps) {
            if (p.contains(orbit[step])) {
                cur = std::move(p);
                found = true;
                break;
            }
        }
        if (!found)
            throw Error(Err::OnBoundary,
                        "orbit point lies on a pullback boundary at step " +
                            std::to_string(step));
        if (intermediates) (*intermediates)[step] = cur.desc.footprint;
    }
    return cur;
}

std::vector<SlavedCell> pullback_cells_along_orbit(
    PullbackContext& ctx, const std::vector<PieceGeo>& cells,
    const std::vector<Complex>& orbit, const std::vector<Footprint>& master_intermediates,
    const PieceGeo& master_result) {
    (void)master_result;
    size_t m = orbit.size() - 1;
    std::vector<SlavedCell> cur;
    for (size_t i = 0; i < cells.size(); ++i) cur.push_back({(int)i, cells[i]});
    for (size_t step = m; step-- > 0;) {
        const Footprint& constraint = master_intermediates[step];
        bool final_symmetric = constraint.is_symmetric();
        std::vector<SlavedCell> next;
        for (auto& sc : cur) {
            auto comps = pullback_step(ctx, sc.geo, final_symmetric ? nullptr : &constraint);
            if (comps.size() == 1) {
                next.push_back({sc.source_index, std::move(comps[0])});
                continue;
            }
            if (final_symmetric) {
                for (auto& p : comps) next.push_back({sc.source_index, std::move(p)});
            } else {
                bool taken = false;
                for (auto& p : comps) {
                    if (p.desc.footprint.subset_of(constraint)) {
                        if (taken)
                            throw Error(Err::RayTraceDiverged,
                                        "slaved pullback: ambiguous component");
                        next.push_back({sc.source_index, std::move(p)});
                        taken = true;
                    }
                }
                if (!taken)
                    throw Error(Err::RayTraceDiverged,
                                "slaved pullback: no component inside master");
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// full puzzle

PieceDescriptor image_piece(const PieceDescriptor& d) {
    if (d.depth < 1) throw Error(Err::InvalidArgument, "image of a depth-0 piece");
    PieceDescriptor out;
    out.depth = d.depth - 1;
    out.footprint = d.footprint.image();
    if (!d.center_address.empty())
        out.center_address = d.center_address.substr(0, d.center_address.size() - 1);
    return out;
}

int Puzzle::piece_index_at(int depth, Complex z, double boundary_tol) const {
    const auto& ps = levels.at(depth);
    double pot = green_potential(c, z);
    if (pot > std::ldexp(M_LN2, -depth) * (1 + 1e-9))
        throw Error(Err::Outside, "point outside the truncation equipotential");
    for (size_t i = 0; i < ps.size(); ++i) {
        if (ps[i].contains(z)) {
            if (ps[i].boundary_distance(z) < boundary_tol)
                throw Error(Err::OnBoundary, "point within tolerance of a piece boundary");
            return (int)i;
        }
    }
    throw Error(Err::OnBoundary, "point not interior to any piece at this depth");
}

Puzzle build_puzzle(const ComplexParam& cp, std::uint64_t p, std::uint64_t q, int max_depth,
                    const PuzzleOptions& opt) {
    Puzzle puz;
    puz.c = cp.c;
    puz.p = p;
    puz.q = q;
    puz.opt = opt;
    puz.fixed = fixed_points(cp);

    auto cyc = rotation_cycle(p, q);
    // rays of the cycle must co-land at alpha
    std::vector<RayTrace> rays;
    for (const auto& t : cyc) {
        RayOptions ro;
        ro.target_potential = 1e-12;
        RayTrace r = trace_ray(cp, t, ro);
        if (!r.landing)
            throw Error(Err::WrongLimb, "cycle ray " + t.str() + " did not land");
        rays.push_back(std::move(r));
    }
    for (const auto& r : rays) {
        if (std::abs(*r.landing - *rays[0].landing) > opt.colanding_tol)
            throw Error(Err::WrongLimb, "cycle rays do not co-land");
    }
    if (std::abs(*rays[0].landing - puz.fixed.alpha) > 1e-6)
        throw Error(Err::WrongLimb, "cycle rays do not land at alpha");
    Complex alpha = *rays[0].landing;

    // critical orbit must avoid alpha and its preimages (checked numerically
    // against alpha and -alpha here; deeper hits surface as OnBoundary)
    {
        auto orb = critical_orbit(cp, 64);
        for (size_t j = 0; j < orb.points.size(); ++j) {
            if (std::abs(orb.points[j] - alpha) < 1e-9 ||
                std::abs(orb.points[j] + alpha) < 1e-9)
                throw Error(Err::CriticalHitsAlpha,
                            "critical orbit hits alpha at iterate " + std::to_string(j));
        }
    }

    // depth-0 pieces
    std::vector<PieceGeo> depth0;
    for (size_t i = 0; i < cyc.size(); ++i) {
        const RationalAngle& a = cyc[i];
        const RationalAngle& b = cyc[(i + 1) % cyc.size()];
        PieceGeo piece;
        piece.desc.depth = 0;
        piece.desc.footprint = Footprint({AngleInterval{a, b}});

        TaggedCurve& bc = piece.boundary;
        // equipotential arc from a to b at potential ln2, dyadic sample angles
        double fa = a.to_double(), fb = b.to_double();
        if (fb <= fa) fb += 1.0;
        for (int s = 0; s <= opt.arc_samples; ++s) {
            double th = fa + (fb - fa) * s / opt.arc_samples;
            RationalAngle ts;
            if (s == 0)
                ts = a;
            else if (s == opt.arc_samples)
                ts = b;
            else
                ts = RationalAngle((std::uint64_t)std::llround(th * (double)(1ull << 40)) %
                                       (1ull << 40),
                                   1ull << 40);
            bc.pts.push_back(equipotential_point(cp, M_LN2, ts));
            bc.tags.push_back(0);
        }
        // down ray b, landing, up ray a
        const RayTrace& rb = rays[(i + 1) % cyc.size()];
        for (size_t s = 0; s < rb.samples.size(); ++s) {
            if (rb.potentials[s] < M_LN2) {
                bc.pts.push_back(rb.samples[s]);
                bc.tags.push_back(kTagRay);
            }
        }
        bc.pts.push_back(alpha);
        bc.tags.push_back(kTagLanding);
        const RayTrace& ra = rays[i];
        for (size_t s = ra.samples.size(); s-- > 0;) {
            if (ra.potentials[s] < M_LN2) {
                bc.pts.push_back(ra.samples[s]);
                bc.tags.push_back(kTagRay);
            }
        }
        // corner: the cycle rays land at alpha
        {
            Corner cor;
            cor.pt = alpha;
            cor.touching.push_back(a);
            cor.touching.push_back(b);
            piece.corners.push_back(std::move(cor));
        }
        // witness: full trace of ray a
        piece.witness_angle = a;
        piece.witness_pts = ra.samples;
        piece.witness_pot = ra.potentials;
        if (ra.landing) {
            piece.witness_pts.push_back(*ra.landing);
            piece.witness_pot.push_back(0.0);
        }
        depth0.push_back(std::move(piece));
    }

    // identify the critical piece and orient indices so f(Y_j cap K) = Y_{j+1} cap K;
    // Y_{j+1} is the piece whose footprint starts at the double of Y_j's start
    {
        int crit = -1;
        for (size_t i = 0; i < depth0.size(); ++i)
            if (winding_number(depth0[i].boundary.pts, Complex(0, 0)) != 0) crit = (int)i;
        if (crit < 0) throw Error(Err::WrongLimb, "no depth-0 piece contains 0");
        std::vector<PieceGeo> ordered;
        std::vector<bool> taken(depth0.size(), false);
        int cur = crit;
        for (size_t j = 0; j < depth0.size(); ++j) {
            taken[cur] = true;
            RationalAngle next_start = depth0[cur].desc.footprint.intervals()[0].a.doubled();
            ordered.push_back(std::move(depth0[cur]));
            int nxt = -1;
            for (size_t i = 0; i < depth0.size(); ++i)
                if (!taken[i] && depth0[i].desc.footprint.intervals()[0].a == next_start)
                    nxt = (int)i;
            if (nxt < 0 && j + 1 < depth0.size())
                throw Error(Err::WrongLimb, "depth-0 index chain broken");
            cur = nxt;
        }
        depth0 = std::move(ordered);
    }
    // centers: critical piece holds 0; going backwards around the cycle each
    // piece holds the preimage of the next center
    depth0[0].center = 0;
    depth0[0].desc.center_address = "";
    for (size_t j = depth0.size(); j-- > 1;) {
        Complex target = depth0[(j + 1) % depth0.size()].center;
        Complex r = std::sqrt(target - cp.c);
        if (winding_number(depth0[j].boundary.pts, r) != 0) {
            depth0[j].center = r;
            depth0[j].desc.center_address = "0";
        } else if (winding_number(depth0[j].boundary.pts, -r) != 0) {
            depth0[j].center = -r;
            depth0[j].desc.center_address = "1";
        } else {
            throw Error(Err::WrongLimb, "depth-0 center not found in piece");
        }
    }

    puz.levels.push_back(std::move(depth0));
    puz.critical_index.push_back(0);
    {
        int cv = -1;
        for (size_t i = 0; i < puz.levels[0].size(); ++i)
            if (puz.levels[0][i].contains(cp.c)) cv = (int)i;
        if (cv < 0) throw Error(Err::WrongLimb, "critical value piece not found at depth 0");
        puz.cv_index.push_back(cv);
    }

    PullbackContext ctx(cp.c, opt);
    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<PieceGeo> lvl;
        for (const auto& src : puz.levels[depth - 1]) {
            auto children = pullback_step(ctx, src);
            for (auto& ch : children) lvl.push_back(std::move(ch));
        }
        int crit = -1, cv = -1;
        for (size_t i = 0; i < lvl.size(); ++i) {
            if (lvl[i].contains(Complex(0, 0))) crit = (int)i;
            if (lvl[i].contains(cp.c)) cv = (int)i;
        }
        if (crit < 0 || cv < 0)
            throw Error(Err::CriticalHitsAlpha,
                        "critical point/value not interior to depth-" +
                            std::to_string(depth) + " pieces");
        puz.levels.push_back(std::move(lvl));
        puz.critical_index.push_back(crit);
        puz.cv_index.push_back(cv);
    }

    // depth-1 renaming: Y_j are the pieces matching the outer Y_j^(0)
    // footprints, Z_j the remaining non-central pieces with f(Z_j) = Y_{j+1}^(0)
    if (max_depth >= 1) {
        puz.y_index.assign(q, -1);
        puz.z_index.assign(q, -1);
        const auto& d0 = puz.levels[0];
        const auto& d1 = puz.levels[1];
        for (size_t i = 0; i < d1.size(); ++i) {
            if ((int)i == puz.critical_index[1]) continue;
            Footprint img = d1[i].desc.footprint.image();
            // Y_j: footprint equals that of a depth-0 piece
            bool matched = false;
            for (size_t j = 0; j < d0.size(); ++j) {
                if (d1[i].desc.footprint == d0[j].desc.footprint) {
                    puz.y_index[j] = (int)i;
                    matched = true;
                }
            }
            if (matched) continue;
            for (size_t j = 0; j < d0.size(); ++j) {
                if (img == d0[j].desc.footprint) {
                    // f(Z_k) = Y_{k+1}^{(0)}, so k = j-1 mod q
                    puz.z_index[(j + q - 1) % q] = (int)i;
                }
            }
        }
    }
    return puz;
}

MarkovReport markov_check(const Puzzle& puz) {
    MarkovReport rep;
    // P1: nested or disjoint, across all built depths
    std::vector<const PieceGeo*> all;
    std::vector<int> depth_of;
    for (size_t d = 0; d < puz.levels.size(); ++d)
        for (const auto& pc : puz.levels[d]) {
            all.push_back(&pc);
            depth_of.push_back((int)d);
        }
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j) {
            ++rep.pieces_checked;
            const Footprint& A = all[i]->desc.footprint;
            const Footprint& B = all[j]->desc.footprint;
            if (depth_of[i] == depth_of[j]) {
                if (!(A == B) && !A.disjoint_from(B))
                    rep.violations.push_back("depth-" + std::to_string(depth_of[i]) +
                                             " pieces overlap: " + A.str() + " vs " + B.str());
                continue;
            }
            const Footprint& deep = depth_of[i] > depth_of[j] ? A : B;
            const Footprint& shallow = depth_of[i] > depth_of[j] ? B : A;
            if (!deep.subset_of(shallow) && !deep.disjoint_from(shallow))
                rep.violations.push_back("pieces neither nested nor disjoint: " + A.str() +
                                         " vs " + B.str());
        }
    // P2: the image of each piece is a single piece one depth up; degree 2
    // exactly on the central piece
    for (size_t d = 1; d < puz.levels.size(); ++d) {
        for (size_t i = 0; i < puz.levels[d].size(); ++i) {
            const auto& pc = puz.levels[d][i];
            Footprint img = pc.desc.footprint.image();
            bool found = false;
            for (const auto& up : puz.levels[d - 1])
                if (up.desc.footprint == img) found = true;
            if (!found)
                rep.violations.push_back("image of a depth-" + std::to_string(d) +
                                         " piece is not a piece of depth " +
                                         std::to_string(d - 1));
            bool symmetric = pc.desc.footprint.is_symmetric();
            bool is_central = (int)i == puz.critical_index[d];
            if (symmetric != is_central)
                rep.violations.push_back("degree-2 exactly on the central piece violated at "
                                         "depth " +
                                         std::to_string(d));
        }
    }
    return rep;
}

}  // namespace nestlab
