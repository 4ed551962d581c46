#include "nestlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace nestlab {

const char* err_name(Err code) {
    switch (code) {
        case Err::InvalidArgument: return "InvalidArgument";
        case Err::DegenerateFixedPoints: return "DegenerateFixedPoints";
        case Err::RayTraceDiverged: return "RayTraceDiverged";
        case Err::NotLanded: return "NotLanded";
        case Err::CriticalHitsAlpha: return "CriticalHitsAlpha";
        case Err::WrongLimb: return "WrongLimb";
        case Err::MixedDepths: return "MixedDepths";
        case Err::OnBoundary: return "OnBoundary";
        case Err::Outside: return "Outside";
        case Err::InvalidAccess: return "InvalidAccess";
        case Err::InadmissibleSigma: return "InadmissibleSigma";
        case Err::ImmediateRenormalizable: return "ImmediateRenormalizable";
        case Err::RenormalizationDetected: return "RenormalizationDetected";
        case Err::AdmissibilityViolation: return "AdmissibilityViolation";
        case Err::NotBracketed: return "NotBracketed";
        case Err::NotPrime: return "NotPrime";
        case Err::DegenerateAnnulus: return "DegenerateAnnulus";
        case Err::BasepointOutside: return "BasepointOutside";
        case Err::NotInjective: return "NotInjective";
        case Err::BudgetExhausted: return "BudgetExhausted";
    }
    return "Error";
}

ComplexParam::ComplexParam(Complex v) : c(v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(Err::InvalidArgument, "parameter must be finite");
}

OrbitSegment critical_orbit(const ComplexParam& cp, int n) {
    if (n < 0) throw Error(Err::InvalidArgument, "orbit length must be >= 0");
    OrbitSegment o;
    // run the recursion in quad precision: orbit points anchor deep pullbacks,
    // and double round-off amplifies past a hundred iterates
    __float128 zr = 0, zi = 0;
    const __float128 cr = cp.c.real(), ci = cp.c.imag();
    o.points.push_back(Complex(0, 0));
    for (int j = 1; j <= n; ++j) {
        __float128 nr = zr * zr - zi * zi + cr;
        __float128 ni = 2 * zr * zi + ci;
        zr = nr;
        zi = ni;
        Complex z((double)zr, (double)zi);
        o.points.push_back(z);
        if (std::abs(z) > kEscapeRadius) {
            o.escaped = true;
            o.escape_index = j;
            break;
        }
    }
    return o;
}

__float128 parse_quad(const std::string& decimal) {
    // minimal decimal parser: [-]digits[.digits]
    __float128 v = 0;
    bool neg = false;
    size_t i = 0;
    if (i < decimal.size() && (decimal[i] == '-' || decimal[i] == '+')) {
        neg = decimal[i] == '-';
        ++i;
    }
    for (; i < decimal.size() && isdigit(decimal[i]); ++i) v = v * 10 + (decimal[i] - '0');
    if (i < decimal.size() && decimal[i] == '.') {
        ++i;
        __float128 scale = 1;
        for (; i < decimal.size() && isdigit(decimal[i]); ++i) {
            scale /= 10;
            v += (decimal[i] - '0') * scale;
        }
    }
    return neg ? -v : v;
}

OrbitSegment critical_orbit_hi(const std::string& c_decimal, int n) {
    OrbitSegment o;
    __float128 cr = parse_quad(c_decimal), ci = 0, zr = 0, zi = 0;
    o.points.push_back(Complex(0, 0));
    for (int j = 1; j <= n; ++j) {
        __float128 nr = zr * zr - zi * zi + cr;
        __float128 ni = 2 * zr * zi + ci;
        zr = nr;
        zi = ni;
        Complex z((double)zr, (double)zi);
        o.points.push_back(z);
        if (std::abs(z) > kEscapeRadius) {
            o.escaped = true;
            o.escape_index = j;
            break;
        }
    }
    return o;
}

std::vector<Complex> forward_orbit(Complex c, Complex z0, int n) {
    std::vector<Complex> out;
    out.reserve(n + 1);
    Complex z = z0;
    out.push_back(z);
    for (int j = 1; j <= n; ++j) {
        z = z * z + c;
        out.push_back(z);
        if (std::abs(z) > kEscapeRadius) break;
    }
    return out;
}

double green_potential(Complex c, Complex z, int max_iter) {
    for (int n = 0; n <= max_iter; ++n) {
        double az = std::abs(z);
        if (az > kEscapeRadius) return std::ldexp(std::log(az), -n);
        z = z * z + c;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Boettcher continuation machinery

namespace {

// (f^k)'(z) overflows doubles at large heights; keep complex mantissa
// with a separate binary exponent.
struct ScaledComplex {
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
    // num / (m * 2^e), clamped to double range
    Complex divide_into(Complex num) const {
        Complex q = num / m;
        long sh = std::clamp(-e, -2000L, 2000L);
        return Complex(std::ldexp(q.real(), (int)sh), std::ldexp(q.imag(), (int)sh));
    }
    // unscaled value when representable
    Complex value() const {
        long sh = std::clamp(e, -1000L, 1000L);
        return Complex(std::ldexp(m.real(), (int)sh), std::ldexp(m.imag(), (int)sh));
    }
};

bool iterate_with_deriv(Complex c, Complex z, int k, Complex& fk, ScaledComplex& deriv) {
    deriv = ScaledComplex{};
    for (int j = 0; j < k; ++j) {
        deriv.mul(2.0 * z);
        z = z * z + c;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e30)
            return false;
    }
    fk = z;
    return true;
}

int height_level(double t) {
    int k = 0;
    while (std::ldexp(t, k) < kTopPotential) ++k;
    return k;
}

// Continuation tracer: walks a ray point to a new potential by Newton on
// f^k(z) = w, seeded from the previous position; k chosen so the target
// lies at asymptotic height.
class BottcherWalker {
public:
    BottcherWalker(Complex c, const RationalAngle& theta) : c_(c) {
        angles_.push_back(theta);
    }

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
        z_ = w - c_ / (2.0 * w);
        t_ = kTopPotential;
        return z_;
    }

    void seed(Complex z, double t) {
        z_ = z;
        t_ = t;
    }

    bool step_to(double t_new, int max_newton, double tol) {
        int k = height_level(t_new);
        Complex w = target(t_new, k);
        Complex z = z_;
        for (int it = 0; it < max_newton; ++it) {
            Complex fk;
            ScaledComplex d;
            if (!iterate_with_deriv(c_, z, k, fk, d)) return false;
            Complex delta = d.divide_into(fk - w);
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) return false;
            z -= delta;
            if (std::abs(delta) < tol * std::max(1.0, std::abs(z))) {
                if (std::abs(z - z_) > 0.5 * (1.0 + std::abs(z_))) return false;  // branch jump
                z_ = z;
                t_ = t_new;
                return true;
            }
        }
        return false;
    }

    Complex z() const { return z_; }
    double t() const { return t_; }

private:
    Complex c_;
    Complex z_{};
    double t_ = kTopPotential;
    std::vector<RationalAngle> angles_;
};

}  // namespace

Complex RayTrace::at_potential(double t) const {
    for (size_t i = 0; i < samples.size(); ++i)
        if (potentials[i] <= t * (1 + 1e-12)) return samples[i];
    return samples.back();
}

Polyline RayTrace::segment(double t_lo, double t_hi) const {
    Polyline out;
    for (size_t i = 0; i < samples.size(); ++i)
        if (potentials[i] <= t_hi * (1 + 1e-12) && potentials[i] >= t_lo * (1 - 1e-12))
            out.push_back(samples[i]);
    return out;
}

RayTrace trace_ray(const ComplexParam& cp, const RationalAngle& angle, const RayOptions& opt) {
    RayTrace ray;
    ray.angle = angle;
    BottcherWalker walker(cp.c, angle);
    walker.init();
    ray.samples.push_back(walker.z());
    ray.potentials.push_back(walker.t());

    double t = kTopPotential;
    int stall_count = 0;
    Complex level_anchor = walker.z();
    double last_moved = 1.0;
    // landing needs depth: allow the walk to continue below the requested
    // floor while the endpoint is still moving
    double t_floor = opt.want_landing ? std::min(opt.target_potential, 1e-13)
                                      : opt.target_potential;

    while (t > t_floor) {
        double t_next_level = std::max(t / 2, t_floor);
        int substeps = opt.samples_per_halving;
        for (;;) {
            BottcherWalker save = walker;
            size_t save_len = ray.samples.size();
            double ratio = std::pow(t_next_level / t, 1.0 / substeps);
            bool ok = true;
            double tw = t;
            for (int s = 0; s < substeps; ++s) {
                tw = (s + 1 == substeps) ? t_next_level : tw * ratio;
                if (!walker.step_to(tw, opt.max_newton, opt.newton_tol)) {
                    ok = false;
                    break;
                }
                ray.samples.push_back(walker.z());
                ray.potentials.push_back(walker.t());
            }
            if (ok) break;
            walker = save;
            ray.samples.resize(save_len);
            ray.potentials.resize(save_len);
            substeps *= 2;
            if (substeps > 4096)
                throw Error(Err::RayTraceDiverged,
                            "ray continuation failed near potential " + std::to_string(t));
        }
        t = t_next_level;
        if (opt.want_landing) {
            double moved = std::abs(walker.z() - level_anchor);
            level_anchor = walker.z();
            last_moved = moved;
            if (moved < opt.landing_move_tol) {
                if (++stall_count >= 3) {
                    auto landed =
                        refine_landing(cp.c, walker.z(), angle.preperiod(), angle.period());
                    if (landed && std::abs(*landed - walker.z()) <
                                      std::max(1e-7, 100 * moved)) {
                        ray.landing = *landed;
                        break;
                    }
                    stall_count = 0;
                }
            } else {
                stall_count = 0;
            }
        }
    }
    if (opt.want_landing && !ray.landing) {
        // final attempt at the floor
        auto landed = refine_landing(cp.c, walker.z(), angle.preperiod(), angle.period());
        if (landed &&
            std::abs(*landed - walker.z()) < std::max(1e-6, 100 * last_moved))
            ray.landing = *landed;
    }
    ray.potential_floor = t;
    return ray;
}

std::optional<Complex> continue_ray_up(Complex c, Complex x, double t_from, double t_to,
                                       const RationalAngle& angle_mod_half) {
    if (t_to > kTopPotential / 2 * (1 + 1e-12)) return std::nullopt;
    BottcherWalker walker(c, angle_mod_half);
    walker.seed(x, t_from);
    double t = t_from;
    while (t < t_to * (1 - 1e-12)) {
        double nxt = std::min(t * 2, t_to);
        int substeps = 2;
        for (;;) {
            BottcherWalker save = walker;
            bool ok = true;
            double tw = t;
            double ratio = std::pow(nxt / t, 1.0 / substeps);
            for (int s = 0; s < substeps; ++s) {
                tw = (s + 1 == substeps) ? nxt : tw * ratio;
                if (!walker.step_to(tw, 16, 1e-13)) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
            walker = save;
            substeps *= 2;
            if (substeps > 2048) return std::nullopt;
        }
        t = nxt;
    }
    return walker.z();
}

std::optional<Complex> refine_landing(Complex c, Complex z0, unsigned preperiod,
                                      unsigned period) {
    // Newton on g(z) = f^{l+p}(z) - f^l(z).
    Complex z = z0;
    for (int it = 0; it < 60; ++it) {
        Complex f_l, f_lp;
        ScaledComplex d_l, d_lp;
        if (!iterate_with_deriv(c, z, (int)preperiod, f_l, d_l)) return std::nullopt;
        if (!iterate_with_deriv(c, z, (int)(preperiod + period), f_lp, d_lp))
            return std::nullopt;
        Complex dg = d_lp.value() - d_l.value();
        if (std::abs(dg) < 1e-300 || !std::isfinite(std::abs(dg))) return std::nullopt;
        Complex delta = (f_lp - f_l) / dg;
        z -= delta;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(delta) < 1e-13) {
            Complex w = z, v = z;
            for (unsigned j = 0; j < preperiod + period; ++j) w = w * w + c;
            for (unsigned j = 0; j < preperiod; ++j) v = v * v + c;
            if (std::abs(w - v) < 1e-9 && std::abs(z - z0) < 0.2 * (1 + std::abs(z0))) return z;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

FixedPair fixed_points(const ComplexParam& cp, bool verify_by_rays) {
    Complex c = cp.c;
    Complex disc = std::sqrt(Complex(1, 0) - 4.0 * c);
    if (std::abs(disc) < 1e-8)
        throw Error(Err::DegenerateFixedPoints, "c = 1/4: fixed points collide");
    FixedPair fp;
    fp.beta = (Complex(1, 0) + disc) / 2.0;
    fp.alpha = (Complex(1, 0) - disc) / 2.0;
    if (c.imag() == 0 && c.real() < 0.25) {
        if (fp.beta.real() < fp.alpha.real()) std::swap(fp.alpha, fp.beta);
    }
    if (verify_by_rays) {
        RayOptions opt;
        opt.target_potential = 1e-10;
        RayTrace r0 = trace_ray(cp, RationalAngle(0, 1), opt);
        if (r0.landing &&
            std::abs(*r0.landing - fp.beta) > std::abs(*r0.landing - fp.alpha))
            std::swap(fp.alpha, fp.beta);
    }
    double lambda = std::abs(2.0 * fp.alpha);
    if (lambda > 1.0 + 1e-9) {
        double rot = std::arg(2.0 * fp.alpha) / (2 * M_PI);
        if (rot < 0) rot += 1.0;
        std::vector<std::pair<double, std::pair<std::uint64_t, std::uint64_t>>> cands;
        for (std::uint64_t q = 2; q <= 32; ++q)
            for (std::uint64_t p = 1; p < q; ++p) {
                if (gcd_u64(p, q) != 1) continue;
                double d = std::abs((double)p / q - rot);
                d = std::min(d, 1 - d);
                cands.push_back({d, {p, q}});
            }
        std::sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < std::min<size_t>(cands.size(), 4); ++i) {
            auto [p, q] = cands[i].second;
            bool all_land = true;
            for (const auto& t : rotation_cycle(p, q)) {
                RayOptions opt;
                opt.target_potential = 1e-9;
                try {
                    RayTrace r = trace_ray(cp, t, opt);
                    if (!r.landing || std::abs(*r.landing - fp.alpha) > 1e-6) {
                        all_land = false;
                        break;
                    }
                } catch (const Error&) {
                    all_land = false;
                    break;
                }
            }
            if (all_land) {
                fp.rotation = cands[i].second;
                break;
            }
        }
    }
    return fp;
}

Complex equipotential_point(const ComplexParam& cp, double log_s, const RationalAngle& t) {
    if (log_s <= 0) throw Error(Err::InvalidArgument, "equipotential radius must exceed 1");
    BottcherWalker walker(cp.c, t);
    walker.init();
    double cur = kTopPotential;
    while (cur > log_s * (1 + 1e-15)) {
        double nxt = std::max(cur / 2, log_s);
        int substeps = 2;
        for (;;) {
            BottcherWalker save = walker;
            bool ok = true;
            double tw = cur;
            double ratio = std::pow(nxt / cur, 1.0 / substeps);
            for (int s = 0; s < substeps; ++s) {
                tw = (s + 1 == substeps) ? nxt : tw * ratio;
                if (!walker.step_to(tw, 12, 1e-13)) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
            walker = save;
            substeps *= 2;
            if (substeps > 1024)
                throw Error(Err::RayTraceDiverged, "equipotential continuation failed");
        }
        cur = nxt;
    }
    return walker.z();
}

Polyline equipotential(const ComplexParam& cp, double s, int n_samples) {
    if (s <= 1) throw Error(Err::InvalidArgument, "equipotential radius must exceed 1");
    double log_s = std::log(s);
    Polyline out(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        RationalAngle t((std::uint64_t)i, (std::uint64_t)n_samples);
        out[i] = equipotential_point(cp, log_s, t);
    }
    return out;
}

std::vector<Complex> julia_boundary(Complex c, int n_points, unsigned seed) {
    std::vector<Complex> out;
    out.reserve(n_points);
    std::uint64_t state = seed * 2654435761u + 1;
    auto rng_bit = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (int)(state & 1);
    };
    Complex z = 1.0;
    for (int i = 0; i < n_points + 64; ++i) {
        Complex w = std::sqrt(z - c);
        if (rng_bit()) w = -w;
        z = w;
        if (i >= 64) out.push_back(z);
    }
    return out;
}

std::vector<Complex> filled_julia_sample(Complex c, int n_boundary, int grid_n,
                                         double box_radius) {
    std::vector<Complex> pts = julia_boundary(c, n_boundary);
    double beta_r = std::abs((1.0 + std::sqrt(Complex(1, 0) - 4.0 * c)) / 2.0);
    double R = std::max(box_radius, beta_r * 1.05);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            Complex z(-R + (2.0 * R * (i + 0.5)) / grid_n, -R + (2.0 * R * (j + 0.5)) / grid_n);
            Complex w = z;
            bool bounded = true;
            for (int k = 0; k < 512; ++k) {
                w = w * w + c;
                if (std::norm(w) > 16.0) {
                    bounded = false;
                    break;
                }
            }
            if (bounded) pts.push_back(z);
        }
    return pts;
}

}  // namespace nestlab
