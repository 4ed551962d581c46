#include "nestlab/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace nestlab {

double modulus(const AnnulusSpec& a, double* error_estimate, int grid) {
    // the inner curve must lie strictly inside the outer one
    for (size_t i = 0; i < a.inner.size(); i += std::max<size_t>(1, a.inner.size() / 128))
        if (winding_number(a.outer, a.inner[i]) == 0)
            throw Error(Err::DegenerateAnnulus, "inner boundary leaves the outer region");
    return annulus_modulus(a.outer, a.inner, error_estimate, grid);
}

CapacityValue capacity(const Polyline& boundary, Complex basepoint, int grid) {
    CapacityValue out;
    out.basepoint = basepoint;
    out.value = log_conformal_radius(boundary, basepoint, &out.error_estimate, grid);
    return out;
}

double cap0_formula(const HyperbolicCenter& Q) {
    double v = -(Q.period - 1) * M_LN2;
    for (int j = 1; j < Q.period; ++j) v -= std::log(std::abs(Q.cycle[j]));
    return v;
}

double cap_inf_estimate(Complex c, double R) {
    // G(z) - ln|z| at |z| = R, should vanish as R grows for connected K
    Complex z(R, 0);
    return green_potential(c, z) - std::log(R);
}

double kappa(int m) {
    if (m < 2) throw Error(Err::InvalidArgument, "kappa needs m >= 2");
    if (m == 2) return 1.0;
    auto p = [m](double z) {
        // z^m - (z^{m-1} + ... + 1)/2, Horner on the geometric tail
        double zm = std::pow(z, m);
        double tail = (std::pow(z, m) - 1.0) / (z - 1.0);
        return zm - 0.5 * tail;
    };
    double lo = 1.0, hi = 1.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (p(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

GrowthSeries simulate_recursion(int m, double eps, int n, const std::vector<double>& seeds) {
    if (m < 2 || n < m) throw Error(Err::InvalidArgument, "simulate_recursion needs n >= m >= 2");
    GrowthSeries out;
    std::vector<double>& x = out.values;
    x = seeds;
    while ((int)x.size() < m) x.push_back(1.0);
    x.resize(m);
    for (double v : x)
        if (v <= 0) throw Error(Err::InvalidArgument, "seeds must be positive");
    for (int i = m; i <= n; ++i) {
        // the capacity correction rides inside the degree-2 halving: with it
        // outside, the m = 2 limit would be 2 eps / 3 instead of eps / 3
        double s = eps;
        for (int j = 1; j <= m; ++j) s += x[i - j];
        x.push_back(0.5 * s);
    }
    for (size_t i = 1; i < x.size(); ++i) {
        out.per_level_gap.push_back(x[i] - x[i - 1]);
        out.per_level_ratio.push_back(x[i] / x[i - 1]);
    }
    // least squares fit x_n ~ slope*n + intercept over the last half
    size_t lo = x.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    for (size_t i = lo; i < x.size(); ++i) {
        sx += (double)i;
        sy += x[i];
        sxx += (double)i * i;
        sxy += (double)i * x[i];
        cnt += 1;
    }
    double den = cnt * sxx - sx * sx;
    if (den != 0) {
        out.slope = (cnt * sxy - sx * sy) / den;
        out.intercept = (sy - out.slope * sx) / cnt;
        for (size_t i = lo; i < x.size(); ++i) {
            double r = x[i] - (out.slope * i + out.intercept);
            out.slope_residual += r * r;
        }
        out.slope_residual = std::sqrt(out.slope_residual / cnt);
    }
    return out;
}

Polyline superattracting_component_boundary(const HyperbolicCenter& Q, int points) {
    const Complex c = Q.c;
    const int m = Q.period;
    auto iterate_m = [&](Complex z) {
        for (int j = 0; j < m; ++j) z = z * z + c;
        return z;
    };
    // membership in the immediate basin of 0 with phase 0
    auto in_u0 = [&](Complex z) {
        for (int k = 0; k < 200; ++k) {
            if (std::abs(z) < 1e-6) return true;
            if (std::norm(z) > 16) return false;
            z = iterate_m(z);
        }
        return std::abs(z) < 0.05;
    };
    // gamma(0): the fixed point of Q^m on the component boundary at internal
    // angle 0.  For a real center this is the basin edge on the positive real
    // axis: bisect the membership transition, then polish on Q^m(x) = x.
    Complex gamma0{};
    if (std::abs(c.imag()) < 1e-13) {
        // walk out to the first membership transition (the basin edge), then
        // bisect inside that bracket
        double lo = 0, hi = 2.0;
        for (double x = 1e-3; x < 2.0; x += 1e-3) {
            if (!in_u0(Complex(x, 0))) {
                lo = x - 1e-3;
                hi = x;
                break;
            }
        }
        for (int it = 0; it < 90; ++it) {
            double mid = 0.5 * (lo + hi);
            (in_u0(Complex(mid, 0)) ? lo : hi) = mid;
        }
        // the angle-0 fixed edge sits on the sign of the Boettcher derivative
        // 1/a, a = prod 2 Q^j(0) (the component is symmetric, so only the
        // sign matters)
        double a_coef = 1;
        for (int j = 1; j < m; ++j) a_coef *= 2 * Q.cycle[j].real();
        Complex z((a_coef > 0 ? 1.0 : -1.0) * 0.5 * (lo + hi), 0);
        if (std::abs(iterate_m(z) - z) > 1e-9)
            throw Error(Err::NotPrime, "basin edge is not fixed under the return");
        gamma0 = z;
    } else {
        // complex center: nearest non-basin fixed point of Q^m that touches
        // the basin
        double best = 1e300;
        for (int s = 0; s < 64; ++s) {
            Complex z = std::polar(0.3 + 0.25 * (s % 4), 2 * M_PI * s / 64.0);
            for (int it = 0; it < 80; ++it) {
                Complex w = z, dw = 1;
                for (int j = 0; j < m; ++j) {
                    dw = 2.0 * w * dw;
                    w = w * w + c;
                }
                if (std::abs(dw - 1.0) < 1e-300) break;
                Complex dlt = (w - z) / (dw - 1.0);
                z -= dlt;
                if (std::abs(dlt) < 1e-14) break;
            }
            if (std::abs(iterate_m(z) - z) > 1e-8) continue;
            if (std::abs(z) < 1e-8) continue;
            if (in_u0(z * 1.0000001 + 1e-9)) continue;
            bool touches = false;
            for (int d = 0; d < 8; ++d) {
                Complex probe = z + (0.0 - z) * 1e-3 + std::polar(1e-4, 2 * M_PI * d / 8.0);
                if (in_u0(probe)) touches = true;
            }
            if (touches && std::abs(z) < best) {
                best = std::abs(z);
                gamma0 = z;
            }
        }
        if (best > 100)
            throw Error(Err::NotPrime, "no boundary fixed point of the basin found");
    }
    // dyadic refinement: gamma(t/2), gamma(t/2 + 1/2) are the preimages of
    // gamma(t) under Q^m restricted to the basin closure
    int levels = 0;
    while ((1 << levels) < points) ++levels;
    int n = 1 << levels;
    std::vector<Complex> gamma(n);
    std::vector<bool> known(n, false);
    gamma[0] = gamma0;
    known[0] = true;
    {
        // gamma(1/2): the other boundary preimage of gamma(0)
        std::vector<Complex> cands{gamma0};
        for (int j = 0; j < m; ++j) {
            std::vector<Complex> next;
            for (Complex w : cands) {
                Complex r = std::sqrt(w - c);
                next.push_back(r);
                next.push_back(-r);
            }
            cands = std::move(next);
        }
        double best = -1;
        for (Complex z : cands) {
            if (std::abs(z - gamma0) < 1e-9) continue;
            if (!in_u0(z + 1e-5 * (0.0 - z))) continue;
            double d = std::abs(z - gamma0);
            if (d > best) {
                best = d;
                gamma[n / 2] = z;
            }
        }
        if (best < 0)
            throw Error(Err::NotPrime, "could not seed the half point of the basin boundary");
        known[n / 2] = true;
    }
    for (int lvl = 2; lvl <= levels; ++lvl) {
        int step = n >> lvl;
        for (int i = step; i < n; i += 2 * step) {
            // target gamma(2t) at index (2i mod n)
            Complex target = gamma[(2 * i) % n];
            // 2^m preimage candidates via nested square roots
            std::vector<Complex> cands{target};
            for (int j = 0; j < m; ++j) {
                std::vector<Complex> next;
                for (Complex w : cands) {
                    Complex r = std::sqrt(w - c);
                    next.push_back(r);
                    next.push_back(-r);
                }
                cands = std::move(next);
            }
            // candidates must touch the basin boundary and sit angularly
            // between the known neighbors (components here are starlike
            // around 0, so the ccw argument is monotone in the parameter)
            Complex nb1 = gamma[(i - step + n) % n];
            Complex nb2 = gamma[(i + step) % n];
            Complex midpoint = 0.5 * (nb1 + nb2);
            double a1 = std::arg(nb1);
            double span = std::arg(nb2) - a1;
            while (span <= 0) span += 2 * M_PI;
            double best = 1e300;
            Complex chosen{};
            auto touches_basin = [&](Complex z) {
                for (double eps : {1e-5, 1e-4, 1e-3})
                    if (in_u0(z + eps * (0.0 - z))) return true;
                return false;
            };
            for (int pass = 0; pass < 2 && best > 1e200; ++pass) {
                for (Complex z : cands) {
                    double rel = std::arg(z) - a1;
                    while (rel < 0) rel += 2 * M_PI;
                    if (pass == 0 && (rel <= 1e-12 || rel >= span)) continue;
                    if (!touches_basin(z)) continue;
                    double d = std::abs(z - midpoint);
                    if (d < best) {
                        best = d;
                        chosen = z;
                    }
                }
            }
            if (best > 1e200) {
                std::string msg = "basin boundary refinement found no admissible preimage";
                if (getenv("NESTLAB_BASIN_DEBUG")) {
                    char b[128];
                    snprintf(b, sizeof b, " at i=%d lvl=%d nb1=(%.4f,%.4f) nb2=(%.4f,%.4f)",
                             i, lvl, nb1.real(), nb1.imag(), nb2.real(), nb2.imag());
                    msg += b;
                    for (Complex z : cands) {
                        double rel = std::arg(z) - a1;
                        while (rel < 0) rel += 2 * M_PI;
                        snprintf(b, sizeof b, " [%.4f,%.4f rel=%.3f/%.3f touch=%d]", z.real(),
                                 z.imag(), rel, span, (int)touches_basin(z));
                        msg += b;
                    }
                }
                throw Error(Err::NotPrime, msg);
            }
            gamma[i] = chosen;
            known[i] = true;
        }
    }
    return gamma;
}

namespace {

Complex iterate_n(Complex c, Complex z, long n) {
    for (long j = 0; j < n; ++j) z = z * z + c;
    return z;
}

// repelling fixed point of f^period close to the seed
std::optional<Complex> return_fixed_point(Complex c, long period, Complex seed) {
    Complex z = seed;
    for (int it = 0; it < 80; ++it) {
        Complex w = z;
        Complex dw = 1;
        for (long j = 0; j < period; ++j) {
            dw = 2.0 * w * dw;
            w = w * w + c;
            if (!std::isfinite(std::abs(w)) || std::abs(w) > 1e12) return std::nullopt;
        }
        Complex dg = dw - 1.0;
        if (std::abs(dg) < 1e-300) return std::nullopt;
        Complex dlt = (w - z) / dg;
        z -= dlt;
        if (std::abs(dlt) < 1e-14) {
            if (std::abs(z - seed) > 4.0 * (std::abs(seed) + 1e-3)) return std::nullopt;
            return z;
        }
    }
    return std::nullopt;
}

}  // namespace

ShapeReport shape_convergence(const NestSummary& nest, const HyperbolicCenter& Q,
                              int level_from, int level_to, int grid_n,
                              bool include_frames) {
    ShapeReport rep;
    rep.reference = filled_julia_sample(Q.c, 40000, 220);
    const Complex c = nest.c;
    const Complex alpha_q = fixed_points(ComplexParam(Q.c)).alpha;

    // the alpha-analog of level j: the repelling fixed point of the first
    // return to V_0^j, seeded from the frame junction corner of F_{j+2}
    auto s_of_level = [&](int j) -> std::optional<Complex> {
        if (j + 1 >= (int)nest.levels.size()) return std::nullopt;
        long period = nest.ell(j + 1);
        std::vector<Complex> seeds;
        if (j + 2 < (int)nest.frames.size()) {
            seeds.push_back(nest.frames[j + 2].s_point);
            seeds.push_back(-nest.frames[j + 2].s_point);
        }
        seeds.push_back(nest.levels[j + 1].central.diameter() * Complex(0.4, 0.0));
        for (Complex sd : seeds) {
            auto z = return_fixed_point(c, period, sd);
            if (!z) continue;
            if (!nest.levels[j].central.contains(*z)) continue;
            if (nest.levels[j + 1].central.contains(*z)) continue;
            return z;
        }
        return std::nullopt;
    };

    std::vector<Complex> alpha(level_to + 2, Complex(0, 0));
    std::vector<Complex> s_val(level_to + 2, Complex(0, 0));
    for (int j = std::max(0, level_from - 1); j <= level_to; ++j) {
        auto s = s_of_level(j);
        if (!s) break;
        s_val[j] = *s;
        alpha[j] = alpha_q / *s;
        // sign of the rescale: the rescaled first return of 0 lands near the
        // critical value of Q (the structure theorem for recurrent nests)
        if (j >= 1 && std::abs(alpha[j - 1]) > 0) {
            long ell = nest.ell(j);
            Complex g0 = iterate_n(c, 0.0, ell);
            Complex img = alpha[j - 1] * g0;
            if (std::abs(-img - Q.c) < std::abs(img - Q.c)) {
                alpha[j - 1] = -alpha[j - 1];
                s_val[j - 1] = -s_val[j - 1];
            }
        }
    }

    for (int j = level_from; j <= level_to && j + 1 < (int)nest.levels.size(); ++j) {
        if (std::abs(alpha[j]) == 0 || std::abs(alpha[j - 1]) == 0) break;
        ShapeLevel lv;
        lv.level = j;
        lv.rescale = alpha[j];
        lv.s_value = s_val[j];

        // rescaled piece sample: boundary plus interior grid
        const PieceGeo& piece = nest.levels[j].central;
        std::vector<Complex> sample;
        for (const Complex& z : piece.boundary.pts) sample.push_back(alpha[j] * z);
        Polyline rescaled_boundary = sample;
        auto inside_pts = grid_points_inside(rescaled_boundary, 96, 96);
        sample.insert(sample.end(), inside_pts.begin(), inside_pts.end());
        lv.hausdorff = hausdorff_distance(sample, rep.reference);

        // C0 / C1 distances of G_j(z) = alpha_{j-1} f^{ell_j}(z / alpha_j)
        long ell = nest.ell(j);
        double c0 = 0, c1 = 0;
        BBox box = bounding_box(rescaled_boundary);
        double h = 1e-5;
        for (int a = 0; a < grid_n; ++a) {
            for (int b = 0; b < grid_n; ++b) {
                Complex z(box.xmin + (a + 0.5) * box.width() / grid_n,
                          box.ymin + (b + 0.5) * box.height() / grid_n);
                if (winding_number(rescaled_boundary, z) == 0) continue;
                auto G = [&](Complex zz) {
                    return alpha[j - 1] * iterate_n(c, zz / alpha[j], ell);
                };
                Complex gz = G(z);
                Complex qz = z * z + Q.c;
                c0 = std::max(c0, std::abs(gz - qz));
                Complex dG = (G(z + h) - G(z - h)) / (2 * h);
                c1 = std::max(c1, std::abs(dG - 2.0 * z));
            }
        }
        lv.c0 = c0;
        lv.c1 = c1;
        lv.g0_gap = std::abs(alpha[j - 1] * iterate_n(c, 0.0, ell) - Q.c);

        if (include_frames && j + 2 < (int)nest.frames.size()) {
            std::vector<Complex> fr_sample;
            for (const auto& cell : nest.frames[j + 2].cells)
                for (const Complex& z : cell.geo.boundary.pts)
                    fr_sample.push_back(alpha[j] * z);
            lv.frame_hausdorff = hausdorff_distance(fr_sample, rep.reference);
        }
        rep.levels.push_back(lv);
    }
    return rep;
}

GrotzschResult grotzsch_check(const Polyline& u_boundary, const Polyline& k_outer,
                              const Polyline& k_inner_component, const Polyline& v_boundary,
                              int grid) {
    GrotzschResult r;
    r.mod_outer = annulus_modulus(v_boundary, u_boundary, nullptr, grid);
    r.mod_inner = annulus_modulus(k_inner_component, u_boundary, nullptr, grid);
    r.mod_ring = annulus_modulus(v_boundary, k_outer, nullptr, grid);
    r.deficit = r.mod_outer - r.mod_inner - r.mod_ring;
    return r;
}

KoebeResult koebe_check(const std::vector<Complex>& grid_pts,
                        const std::vector<Complex>& images, double grid_h, double mod,
                        double C0) {
    KoebeResult out;
    if (grid_pts.size() != images.size() || grid_pts.size() < 4)
        throw Error(Err::InvalidArgument, "koebe_check needs matched samples");
    // sampled injectivity
    for (size_t i = 0; i < images.size(); ++i)
        for (size_t j = i + 1; j < images.size(); ++j)
            if (std::abs(images[i] - images[j]) < 1e-12 * (1 + std::abs(images[i])))
                throw Error(Err::NotInjective, "sampled map is not injective");
    // finite-difference derivative magnitudes over grid neighbors
    double dmin = 1e300, dmax = 0;
    for (size_t i = 0; i < grid_pts.size(); ++i) {
        for (size_t j = i + 1; j < grid_pts.size(); ++j) {
            double dz = std::abs(grid_pts[i] - grid_pts[j]);
            if (dz > 1.5 * grid_h) continue;
            double dv = std::abs(images[i] - images[j]) / dz;
            dmin = std::min(dmin, dv);
            dmax = std::max(dmax, dv);
        }
    }
    out.distortion = dmax / std::max(dmin, 1e-300);
    out.bound = 1.0 + C0 * std::exp(-mod);
    out.bound_ok = out.distortion <= out.bound;
    return out;
}

GrowthSeries measured_moduli(const NestSummary& nest, int level_from, int level_to,
                             int grid) {
    GrowthSeries out;
    for (int n = level_from; n <= level_to && n < (int)nest.levels.size(); ++n) {
        AnnulusSpec a;
        a.outer = nest.levels[n - 1].central.boundary.pts;
        a.inner = nest.levels[n].central.boundary.pts;
        double err;
        out.values.push_back(modulus(a, &err, grid));
    }
    for (size_t i = 1; i < out.values.size(); ++i) {
        out.per_level_gap.push_back(out.values[i] - out.values[i - 1]);
        out.per_level_ratio.push_back(out.values[i] / out.values[i - 1]);
    }
    // linear fit mu_n ~ A n + B
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    for (size_t i = 0; i < out.values.size(); ++i) {
        double xi = level_from + (double)i;
        sx += xi;
        sy += out.values[i];
        sxx += xi * xi;
        sxy += xi * out.values[i];
        cnt += 1;
    }
    double den = cnt * sxx - sx * sx;
    if (den != 0) {
        out.slope = (cnt * sxy - sx * sy) / den;
        out.intercept = (sy - out.slope * sx) / cnt;
        for (size_t i = 0; i < out.values.size(); ++i) {
            double r = out.values[i] - (out.slope * (level_from + (double)i) + out.intercept);
            out.slope_residual += r * r;
        }
        out.slope_residual = std::sqrt(out.slope_residual / std::max(1.0, cnt));
    }
    // Lyubich-style fit mu_{n+2} ~ B kappa(n) + C using non-central counts
    {
        double kx = 0, ky = 0, kxx = 0, kxy = 0, kc = 0;
        for (size_t i = 0; i + 2 < out.values.size() + 0u; ++i) {
            int n = level_from + (int)i;
            if (n + 2 - level_from >= (int)out.values.size()) break;
            double kap = nest.kappa_count(n);
            double mu = out.values[n + 2 - level_from];
            kx += kap;
            ky += mu;
            kxx += kap * kap;
            kxy += kap * mu;
            kc += 1;
        }
        double kden = kc * kxx - kx * kx;
        if (kden != 0) {
            out.lyubich_B = (kc * kxy - kx * ky) / kden;
            out.lyubich_C = (ky - out.lyubich_B * kx) / kc;
        }
    }
    return out;
}

}  // namespace nestlab
