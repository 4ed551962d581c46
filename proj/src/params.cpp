#include "nestlab/params.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nestlab {

namespace {

// scaled complex product, as in the dynamical-plane walker
struct ScaledC {
    Complex m{1.0, 0.0};
    long e = 0;
    void mul(Complex w) {
        m *= w;
        double am = std::abs(m);
        if (am > 1e120 || (am > 0 && am < 1e-120)) {
            int ex;
            std::frexp(am, &ex);
            m = Complex(std::ldexp(m.real(), -ex), std::ldexp(m.imag(), -ex));
            e += ex;
        }
    }
    Complex divide_into(Complex num) const {
        Complex q = num / m;
        long sh = std::clamp(-e, -2000L, 2000L);
        return Complex(std::ldexp(q.real(), (int)sh), std::ldexp(q.imag(), (int)sh));
    }
};

// f_c^k(c) and its c-derivative
bool param_iterate(Complex c, int k, Complex& out, ScaledC& d) {
    Complex w = c;
    d = ScaledC{};
    // w_1 = c, w' = 1
    Complex wp{1, 0};
    for (int j = 1; j < k; ++j) {
        wp = 2.0 * w * wp + 1.0;
        w = w * w + c;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > 1e30)
            return false;
        double am = std::abs(wp);
        if (am > 1e120) {
            // renormalize through the scaled accumulator
            d.mul(wp);
            wp = Complex(1, 0);
        }
    }
    d.mul(wp);
    out = w;
    return true;
}

int height_level_p(double t) {
    int k = 1;
    while (std::ldexp(t, k) < kTopPotential) ++k;
    return k;
}

class ParamWalker {
public:
    explicit ParamWalker(const RationalAngle& theta) { angles_.push_back(theta); }

    const RationalAngle& doubled_angle(int k) {
        while ((int)angles_.size() <= k) angles_.push_back(angles_.back().doubled());
        return angles_[k];
    }

    Complex target(double t, int k) {
        double r = std::exp(std::ldexp(t, k));
        double a = 2 * M_PI * doubled_angle(k).to_double();
        return std::polar(r, a);
    }

    Complex init() {
        Complex w = target(kTopPotential, 0);
        c_ = w;  // Phi_M ~ id at large radius
        t_ = kTopPotential;
        return c_;
    }

    bool step_to(double t_new, int max_newton = 14, double tol = 1e-13) {
        // Phi_M(c) = e^{t+2pi i theta}  <=>  f_c^k(c) = target at level k-1;
        // the k-th iterate of c has potential 2^{k-1} G_M(c)
        int k = height_level_p(t_new);
        Complex w = target(t_new, k - 1);
        Complex c = c_;
        for (int it = 0; it < max_newton; ++it) {
            Complex fk;
            ScaledC d;
            if (!param_iterate(c, k, fk, d)) return false;
            Complex delta = d.divide_into(fk - w);
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) return false;
            c -= delta;
            if (std::abs(delta) < tol * std::max(1.0, std::abs(c))) {
                if (std::abs(c - c_) > 0.5 * (1.0 + std::abs(c_))) return false;
                c_ = c;
                t_ = t_new;
                return true;
            }
        }
        return false;
    }

    Complex c() const { return c_; }

private:
    Complex c_{};
    double t_ = kTopPotential;
    std::vector<RationalAngle> angles_;
};

}  // namespace

Complex param_bottcher_point(double potential, const RationalAngle& angle) {
    ParamWalker w(angle);
    w.init();
    double t = kTopPotential;
    while (t > potential * (1 + 1e-15)) {
        double nxt = std::max(t / 2, potential);
        int substeps = 2;
        for (;;) {
            ParamWalker save = w;
            bool ok = true;
            double tw = t;
            double ratio = std::pow(nxt / t, 1.0 / substeps);
            for (int s = 0; s < substeps; ++s) {
                tw = (s + 1 == substeps) ? nxt : tw * ratio;
                if (!w.step_to(tw)) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
            w = save;
            substeps *= 2;
            if (substeps > 4096)
                throw Error(Err::RayTraceDiverged, "parameter ray continuation failed");
        }
        t = nxt;
    }
    return w.c();
}

ParaRayTrace trace_param_ray(const RationalAngle& angle, double target_potential,
                             bool want_landing) {
    ParaRayTrace ray;
    ray.angle = angle;
    ParamWalker w(angle);
    w.init();
    ray.samples.push_back(w.c());
    ray.potentials.push_back(kTopPotential);
    double t = kTopPotential;
    int stall = 0;
    Complex anchor = w.c();
    double t_floor = want_landing ? std::min(target_potential, 1e-13) : target_potential;
    while (t > t_floor) {
        double nxt = std::max(t / 2, t_floor);
        int substeps = 6;
        for (;;) {
            ParamWalker save = w;
            size_t save_len = ray.samples.size();
            bool ok = true;
            double tw = t;
            double ratio = std::pow(nxt / t, 1.0 / substeps);
            for (int s = 0; s < substeps; ++s) {
                tw = (s + 1 == substeps) ? nxt : tw * ratio;
                if (!w.step_to(tw)) {
                    ok = false;
                    break;
                }
                ray.samples.push_back(w.c());
                ray.potentials.push_back(tw);
            }
            if (ok) break;
            w = save;
            ray.samples.resize(save_len);
            ray.potentials.resize(save_len);
            substeps *= 2;
            if (substeps > 8192)
                throw Error(Err::RayTraceDiverged,
                            "parameter ray continuation failed near potential " +
                                std::to_string(t));
        }
        t = nxt;
        if (want_landing) {
            double moved = std::abs(w.c() - anchor);
            anchor = w.c();
            if (moved < 1e-10) {
                if (++stall >= 3) {
                    ray.landing = w.c();
                    break;
                }
            } else {
                stall = 0;
            }
        }
    }
    ray.potential_floor = t;
    if (want_landing && !ray.landing) ray.landing = w.c();  // best estimate
    return ray;
}

WakeDescriptor wake(std::uint64_t p, std::uint64_t q) {
    WakeDescriptor w;
    w.eta = RationalAngle(p, q);
    auto cyc = rotation_cycle(p, q);
    // the pair spanning the shortest ccw arc
    double best = 2.0;
    for (size_t i = 0; i < cyc.size(); ++i) {
        const RationalAngle& a = cyc[i];
        const RationalAngle& b = cyc[(i + 1) % cyc.size()];
        double len = AngleInterval{a, b}.length();
        if (len < best) {
            best = len;
            w.t_minus = a;
            w.t_plus = b;
        }
    }
    double eta = (double)p / (double)q;
    Complex e1 = std::polar(0.5, 2 * M_PI * eta);
    Complex e2 = std::polar(0.25, 4 * M_PI * eta);
    w.root = e1 - e2;
    return w;
}

std::vector<ParapieceDescriptor> parapiece(const WakeDescriptor& w, int depth,
                                           double tip_potential) {
    std::vector<ParapieceDescriptor> out;
    if (depth == 0) {
        ParapieceDescriptor d;
        d.depth = 0;
        d.footprint = Footprint({AngleInterval{w.t_minus, w.t_plus}});
        out.push_back(d);
        return out;
    }
    // angles of P_n(p/q) inside the wake arc
    std::uint64_t p = 0, q = 0;
    {
        // recover p/q from eta
        q = w.eta.den().fits_u64() ? w.eta.den().low64() : 0;
        p = w.eta.num().fits_u64() ? w.eta.num().low64() : 0;
    }
    auto cyc = rotation_cycle(p, q);
    std::vector<RationalAngle> angles;
    for (const auto& t0 : cyc) {
        // n-fold preimages of each cycle angle
        std::vector<RationalAngle> cur{t0};
        for (int j = 0; j < depth; ++j) {
            std::vector<RationalAngle> next;
            for (const auto& t : cur) {
                next.push_back(t.halved());
                next.push_back(t.halved().half_turn());
            }
            cur = std::move(next);
        }
        for (const auto& t : cur)
            if (t.in_arc(w.t_minus, w.t_plus) || t == w.t_minus || t == w.t_plus)
                angles.push_back(t);
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](const RationalAngle& a, const RationalAngle& b) {
                                 return a == b;
                             }),
                 angles.end());

    // co-landing classes from traced tips
    std::vector<Complex> tips(angles.size());
    for (size_t i = 0; i < angles.size(); ++i) {
        ParaRayTrace r = trace_param_ray(angles[i], tip_potential, false);
        tips[i] = r.samples.back();
    }
    std::vector<int> cls(angles.size(), -1);
    int ncls = 0;
    for (size_t i = 0; i < angles.size(); ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = ncls;
        for (size_t j = i + 1; j < angles.size(); ++j)
            if (cls[j] < 0 && std::abs(tips[i] - tips[j]) < 2e-3) cls[j] = cls[i];
        ++ncls;
    }
    // the wake's own angles co-land at the root (parabolic, so the traced
    // tips converge too slowly to cluster); merge them by hand
    {
        int c_lo = -1, c_hi = -1;
        for (size_t i = 0; i < angles.size(); ++i) {
            if (angles[i] == w.t_minus) c_lo = cls[i];
            if (angles[i] == w.t_plus) c_hi = cls[i];
        }
        if (c_lo >= 0 && c_hi >= 0 && c_lo != c_hi)
            for (auto& cc : cls)
                if (cc == c_hi) cc = c_lo;
    }
    // gap walk inside the wake arc: successor of a ray within its class going
    // ccw, then the next ray ccw; pieces are the cycles
    size_t n = angles.size();
    auto class_next = [&](size_t i) {
        // next angle of the same class after i (ccw), wrapping
        for (size_t s = 1; s <= n; ++s) {
            size_t j = (i + s) % n;
            if (cls[j] == cls[i]) return j;
        }
        return i;
    };
    // gap walk: push the arc right of the current ray (none exists right of
    // t_plus), descend the next ray and continue ccw within its landing class
    std::vector<bool> used(n, false);
    for (size_t start = 0; start + 1 < n; ++start) {
        if (used[start]) continue;
        std::vector<AngleInterval> ivs;
        size_t i = start;
        int guard = 2 * (int)n + 4;
        while (guard-- > 0) {
            if (i + 1 < n) {
                ivs.push_back(AngleInterval{angles[i], angles[i + 1]});
                used[i] = true;
                i = class_next(i + 1);
            } else {
                i = class_next(n - 1);
            }
            if (i == start) break;
        }
        if (!ivs.empty()) {
            ParapieceDescriptor d;
            d.depth = depth;
            d.footprint = Footprint(ivs);
            out.push_back(d);
        }
    }
    return out;
}

Paranest paranest(const NestSummary& nest, int levels) {
    Paranest out;
    int maxn = std::min<int>(levels, (int)nest.levels.size() - 1);
    PullbackContext ctx(nest.c, nest.shallow.opt);

    std::vector<Footprint> xi_dyn;  // pullback of V_1^n along the return orbit
    auto orb = critical_orbit(ComplexParam(nest.c), (int)nest.ell(maxn) + 2);

    for (int n = 1; n <= maxn; ++n) {
        ParapieceDescriptor d;
        d.depth = nest.levels[n].central.desc.depth - 1;
        d.footprint = nest.levels[n].central.desc.footprint.image();
        d.role = ParapieceRole::Paranest;
        d.level = n;
        out.delta.push_back(d);

        // Xi^{n+1}: parameters whose return g_n(0) falls in V_1^n
        if (!nest.levels[n].laterals.empty() && n < maxn) {
            long ell = nest.ell(n);
            std::vector<Complex> seg(orb.points.begin(), orb.points.begin() + ell + 1);
            try {
                PieceGeo w = pullback_along_orbit(ctx, nest.levels[n].laterals[0], seg);
                ParapieceDescriptor x;
                x.depth = w.desc.depth - 1;
                x.footprint = w.desc.footprint.image();
                x.role = ParapieceRole::AuxXi;
                x.level = n + 1;
                out.xi.push_back(x);
            } catch (const Error&) {
                // lateral pullback failed; Xi stays missing for this level
            }
        }
        // Delta_*^{n+2}: images of the F_{n+2} cells
        if (n + 2 < (int)nest.frames.size()) {
            std::vector<ParapieceDescriptor> comps;
            for (const auto& cell : nest.frames[n + 2].cells) {
                ParapieceDescriptor s;
                s.depth = cell.geo.desc.depth - 1;
                s.footprint = cell.geo.desc.footprint.image();
                s.role = ParapieceRole::AuxStar;
                s.level = n + 2;
                comps.push_back(s);
            }
            out.star.push_back(comps);
        }
    }

    // nesting chain: Delta_*^{n+3} subset Delta^{n+1} subset Xi^{n+1} subset
    // Delta_*^{n+2} subset Delta^n, checked on the angle data
    auto subset_of_union = [&](const Footprint& f, const std::vector<ParapieceDescriptor>& u) {
        for (const auto& iv : f.intervals()) {
            bool ok = false;
            for (const auto& pc : u)
                if (Footprint({iv}).subset_of(pc.footprint)) ok = true;
            if (!ok) return false;
        }
        return true;
    };
    for (int n = 1; n + 1 <= (int)out.delta.size(); ++n) {
        const auto& dn = out.delta[n - 1];
        const auto& dn1 = out.delta[n];
        auto fail = [&](const std::string& s) {
            out.chain_violations.push_back("level " + std::to_string(n) + ": " + s);
        };
        if (!dn1.footprint.subset_of(dn.footprint))
            fail("Delta^{n+1} not inside Delta^n");
        if ((int)out.xi.size() >= n) {
            const auto& xi = out.xi[n - 1];
            if (!dn1.footprint.subset_of(xi.footprint)) fail("Delta^{n+1} not inside Xi^{n+1}");
            if ((int)out.star.size() >= n) {
                if (!subset_of_union(xi.footprint, out.star[n - 1]))
                    fail("Xi^{n+1} not inside Delta_*^{n+2}");
            }
        }
        if ((int)out.star.size() >= n) {
            for (const auto& comp : out.star[n - 1])
                if (!comp.footprint.subset_of(dn.footprint))
                    fail("Delta_*^{n+2} component leaves Delta^n");
        }
        if ((int)out.star.size() >= n + 2) {
            for (const auto& comp : out.star[n + 1])
                if (!comp.footprint.subset_of(dn1.footprint))
                    fail("Delta_*^{n+3} component leaves Delta^{n+1}");
        }
    }
    return out;
}

Polyline sample_parapiece_boundary(const ParapieceDescriptor& piece, int arc_samples,
                                   double extra_depth) {
    double t_piece = std::ldexp(M_LN2, -piece.depth);
    double t_tip = t_piece * std::pow(2.0, -extra_depth * 8);
    Polyline out;
    const auto& ivs = piece.footprint.intervals();
    for (size_t i = 0; i < ivs.size(); ++i) {
        // arc over the interval at the piece potential
        double fa = ivs[i].a.to_double(), fb = ivs[i].b.to_double();
        if (fb <= fa) fb += 1.0;
        for (int s = 0; s <= arc_samples; ++s) {
            double th = fa + (fb - fa) * s / arc_samples;
            RationalAngle ts;
            if (s == 0)
                ts = ivs[i].a;
            else if (s == arc_samples)
                ts = ivs[i].b;
            else
                ts = RationalAngle(
                    (std::uint64_t)std::llround(th * (double)(1ull << 40)) % (1ull << 40),
                    1ull << 40);
            out.push_back(param_bottcher_point(t_piece, ts));
        }
        // ray down from b, then collect the next interval's a-ray up
        ParaRayTrace rb = trace_param_ray(ivs[i].b, t_tip, false);
        for (size_t s = 0; s < rb.samples.size(); ++s)
            if (rb.potentials[s] < t_piece) out.push_back(rb.samples[s]);
        const auto& nxt = ivs[(i + 1) % ivs.size()];
        ParaRayTrace ra = trace_param_ray(nxt.a, t_tip, false);
        for (size_t s = ra.samples.size(); s-- > 0;)
            if (ra.potentials[s] < t_piece) out.push_back(ra.samples[s]);
    }
    return out;
}

ParapieceShapeLevel parapiece_shape(const NestSummary& nest, const HyperbolicCenter& Q,
                                    int level, Complex alpha_rescale) {
    ParapieceShapeLevel out;
    out.level = level;
    if (level < 1 || level >= (int)nest.levels.size())
        throw Error(Err::InvalidArgument, "parapiece_shape level out of range");
    ParapieceDescriptor d;
    d.depth = nest.levels[level].central.desc.depth - 1;
    d.footprint = nest.levels[level].central.desc.footprint.image();
    Polyline bdry = sample_parapiece_boundary(d, 16, 1.0);

    long ell = nest.ell(level);
    Polyline image;
    for (const Complex& c : bdry) {
        Complex z = 0;
        for (long j = 0; j < ell; ++j) z = z * z + c;
        image.push_back(alpha_rescale * z);
    }
    auto K = filled_julia_sample(Q.c, 20000, 160);
    out.hausdorff = hausdorff_distance(image, K);
    out.image_injective = !polyline_self_intersects(image);
    // winding of the raw (unrescaled) image around the return target of c_Q
    Complex target = 0;
    for (long j = 0; j < ell; ++j) target = target * target + nest.c;
    Polyline rel;
    for (const Complex& w : image) rel.push_back(w - alpha_rescale * target);
    out.winding = winding_number(rel, Complex(0, 0));
    return out;
}

ParamoduliResult paramoduli(const NestSummary& nest, int level_from, int level_to,
                            int grid) {
    ParamoduliResult out;
    int maxn = std::min<int>(level_to, (int)nest.levels.size() - 2);
    std::vector<Polyline> boundaries;
    for (int n = level_from; n <= maxn + 1; ++n) {
        ParapieceDescriptor d;
        d.depth = nest.levels[n].central.desc.depth - 1;
        d.footprint = nest.levels[n].central.desc.footprint.image();
        boundaries.push_back(sample_parapiece_boundary(d, 16, 1.0));
    }
    for (int n = level_from; n <= maxn; ++n) {
        AnnulusSpec a;
        a.outer = boundaries[n - level_from];
        a.inner = boundaries[n - level_from + 1];
        out.para.values.push_back(annulus_modulus(a.outer, a.inner, nullptr, grid));
        AnnulusSpec dyn;
        dyn.outer = nest.levels[n].central.boundary.pts;
        dyn.inner = nest.levels[n + 1].central.boundary.pts;
        out.dynamical.push_back(annulus_modulus(dyn.outer, dyn.inner, nullptr, grid));
        out.ratio.push_back(out.para.values.back() / out.dynamical.back());
    }
    for (size_t i = 1; i < out.para.values.size(); ++i) {
        out.para.per_level_gap.push_back(out.para.values[i] - out.para.values[i - 1]);
        out.para.per_level_ratio.push_back(out.para.values[i] / out.para.values[i - 1]);
    }
    return out;
}

}  // namespace nestlab
