#include "nestlab/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nestlab {

namespace {

// closed polyline mapped to the log cylinder around z0; phi unwrapped so the
// curve is continuous, total phi increase = 2*pi * winding
struct CylCurve {
    std::vector<double> rho, phi;
    bool valid = false;
};

CylCurve to_cylinder(const Polyline& curve, Complex z0) {
    CylCurve out;
    size_t n = curve.size();
    out.rho.resize(n + 1);
    out.phi.resize(n + 1);
    double prev_arg = std::arg(curve[0] - z0);
    double acc = prev_arg;
    for (size_t i = 0; i <= n; ++i) {
        Complex d = curve[i % n] - z0;
        double r = std::abs(d);
        if (r == 0) return out;
        double a = std::arg(d);
        double da = a - prev_arg;
        while (da > M_PI) da -= 2 * M_PI;
        while (da < -M_PI) da += 2 * M_PI;
        acc += (i == 0) ? 0 : da;
        prev_arg = a;
        out.rho[i] = std::log(r);
        out.phi[i] = acc;
    }
    out.valid = std::abs(std::abs(out.phi[n] - out.phi[0]) - 2 * M_PI) < 1e-6;
    return out;
}

struct Crossings {
    // per column: sorted rho values where a curve crosses phi = const
    std::vector<std::vector<double>> per_col;
    // per row: sorted phi values (mod 2pi grid units) where it crosses rho = const
    std::vector<std::vector<double>> per_row;
};

// collect crossings of the cylinder curve with the grid lines
Crossings rasterize(const CylCurve& c, int nphi, double rho0, double drho, int nrho) {
    Crossings out;
    out.per_col.resize(nphi);
    out.per_row.resize(nrho);
    double dphi = 2 * M_PI / nphi;
    size_t n = c.rho.size() - 1;
    for (size_t i = 0; i < n; ++i) {
        double p0 = c.phi[i], p1 = c.phi[i + 1];
        double r0 = c.rho[i], r1 = c.rho[i + 1];
        // vertical lines phi = k*dphi
        if (p0 != p1) {
            double lo = std::min(p0, p1), hi = std::max(p0, p1);
            long k0 = (long)std::ceil(lo / dphi) - 1;
            long k1 = (long)std::floor(hi / dphi) + 1;
            for (long k = k0; k <= k1; ++k) {
                double t = (k * dphi - p0) / (p1 - p0);
                // half-open with rounding guard: a vertex on the line belongs
                // to the segment that starts there
                if (t < -1e-9 || t >= 1 - 1e-9) continue;
                t = std::max(t, 0.0);
                double r = r0 + t * (r1 - r0);
                int col = (int)((k % nphi + nphi) % nphi);
                out.per_col[col].push_back(r);
            }
        }
        // horizontal lines rho = rho0 + j*drho
        if (r0 != r1) {
            double lo = std::min(r0, r1), hi = std::max(r0, r1);
            long j0 = (long)std::ceil((lo - rho0) / drho) - 1;
            long j1 = (long)std::floor((hi - rho0) / drho) + 1;
            for (long j = j0; j <= j1; ++j) {
                if (j < 0 || j >= nrho) continue;
                double t = (rho0 + j * drho - r0) / (r1 - r0);
                if (t < -1e-9 || t >= 1 - 1e-9) continue;
                t = std::max(t, 0.0);
                double p = p0 + t * (p1 - p0);
                out.per_row[j].push_back(p / dphi);  // in column units, unreduced
            }
        }
    }
    for (auto& v : out.per_col) std::sort(v.begin(), v.end());
    for (auto& v : out.per_row) std::sort(v.begin(), v.end());
    return out;
}

int count_below(const std::vector<double>& sorted, double x) {
    return (int)(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

struct GridProblem {
    int nphi, nrho;
    double rho0, drho, dphi;
    std::vector<int> inside;        // node classification
    std::vector<double> u;
    // per node, distances (in grid units, <= 1) to the boundary along each
    // direction and the boundary value there; 1 when the neighbor is regular
    struct Cut {
        float up = 1, down = 1, left = 1, right = 1;
        float vup = 0, vdown = 0, vleft = 0, vright = 0;
    };
    std::vector<Cut> cuts;
    int idx(int j, int k) const { return j * nphi + k; }
};

// relax with SOR, red-black ordering; nodes hugging the boundary are pinned
void solve(GridProblem& g, int iters) {
    double omega = std::min(1.97, 2.0 / (1.0 + std::sin(M_PI / std::max(g.nphi, g.nrho))));
    double hratio = (g.drho / g.dphi);
    double wphi = hratio * hratio;
    // pin nodes with a sub-0.05 cut to the interpolated boundary value
    for (int j = 0; j < g.nrho; ++j)
        for (int k = 0; k < g.nphi; ++k) {
            int id = g.idx(j, k);
            if (g.inside[id] != 1) continue;
            auto& c = g.cuts[id];
            float tmin = std::min(std::min(c.up, c.down), std::min(c.left, c.right));
            if (tmin < 0.05f) {
                double v = c.up == tmin     ? c.vup
                           : c.down == tmin ? c.vdown
                           : c.left == tmin ? c.vleft
                                            : c.vright;
                g.u[id] = v;
                g.inside[id] = 2;  // Dirichlet-pinned
            }
        }
    auto val_up = [&](int id, int j, int k) {
        const auto& c = g.cuts[id];
        if (c.up < 1) return (double)c.vup;
        if (j + 1 < g.nrho && g.inside[g.idx(j + 1, k)]) return g.u[g.idx(j + 1, k)];
        return g.u[id];
    };
    auto val_down = [&](int id, int j, int k) {
        const auto& c = g.cuts[id];
        if (c.down < 1) return (double)c.vdown;
        if (j > 0 && g.inside[g.idx(j - 1, k)]) return g.u[g.idx(j - 1, k)];
        return g.u[id];  // zero-flux fallback (grid bottom)
    };
    auto val_left = [&](int id, int j, int k) {
        const auto& c = g.cuts[id];
        if (c.left < 1) return (double)c.vleft;
        int kk = g.idx(j, (k + g.nphi - 1) % g.nphi);
        return g.inside[kk] ? g.u[kk] : g.u[id];
    };
    auto val_right = [&](int id, int j, int k) {
        const auto& c = g.cuts[id];
        if (c.right < 1) return (double)c.vright;
        int kk = g.idx(j, (k + 1) % g.nphi);
        return g.inside[kk] ? g.u[kk] : g.u[id];
    };
    for (int it = 0; it < iters; ++it) {
        double maxdelta = 0;
        for (int parity = 0; parity < 2; ++parity) {
            for (int j = 0; j < g.nrho; ++j) {
                for (int k = (j + parity) % 2; k < g.nphi; k += 2) {
                    int id = g.idx(j, k);
                    if (g.inside[id] != 1) continue;
                    const auto& c = g.cuts[id];
                    double au = 2.0 / (c.up * (c.up + c.down));
                    double ad = 2.0 / (c.down * (c.up + c.down));
                    double al = 2.0 / (c.left * (c.left + c.right)) * wphi;
                    double ar = 2.0 / (c.right * (c.left + c.right)) * wphi;
                    double unew = (au * val_up(id, j, k) + ad * val_down(id, j, k) +
                                   al * val_left(id, j, k) + ar * val_right(id, j, k)) /
                                  (au + ad + al + ar);
                    double delta = omega * (unew - g.u[id]);
                    g.u[id] += delta;
                    maxdelta = std::max(maxdelta, std::abs(delta));
                }
            }
        }
        if ((it & 15) == 15 && maxdelta < 1e-13) break;
    }
}

double dirichlet_energy(const GridProblem& g) {
    // sum over edges of (du/dl)^2 * area-weight; log-polar is conformal so
    // the energy equals the plane energy
    double E = 0;
    double hr = g.drho, hp = g.dphi;
    for (int j = 0; j < g.nrho; ++j) {
        for (int k = 0; k < g.nphi; ++k) {
            int id = g.idx(j, k);
            if (!g.inside[id]) continue;
            const auto& c = g.cuts[id];
            // each interior up/right edge appears once; cut edges per side
            {
                double t = c.up;
                bool up_in = j + 1 < g.nrho && g.inside[g.idx(j + 1, k)];
                if (c.up < 1 || up_in) {
                    double v = c.up < 1 ? c.vup : g.u[g.idx(j + 1, k)];
                    double d = (v - g.u[id]) / (t * hr);
                    E += d * d * (t * hr) * hp;
                }
            }
            if (c.down < 1) {
                double d = (g.u[id] - c.vdown) / (c.down * hr);
                E += d * d * (c.down * hr) * hp;
            }
            {
                double t = c.right;
                int kr = g.idx(j, (k + 1) % g.nphi);
                if (c.right < 1 || g.inside[kr]) {
                    double v = c.right < 1 ? c.vright : g.u[kr];
                    double d = (v - g.u[id]) / (t * hp);
                    E += d * d * (t * hp) * hr;
                }
            }
            if (c.left < 1) {
                double d = (g.u[id] - c.vleft) / (c.left * hp);
                E += d * d * (c.left * hp) * hr;
            }
        }
    }
    // interior edges counted from both sides with weight 1/2 each; cut edges
    // once with weight 1
    return E;
}

double modulus_on_grid(const Polyline& outer, const Polyline& inner, int nphi) {
    Complex z0 = 0;
    for (const auto& z : inner) z0 += z;
    z0 /= (double)inner.size();
    if (winding_number(outer, z0) == 0 || winding_number(inner, z0) == 0)
        throw Error(Err::DegenerateAnnulus, "annulus center not enclosed by both curves");

    CylCurve co = to_cylinder(outer, z0);
    CylCurve ci = to_cylinder(inner, z0);
    if (!co.valid || !ci.valid)
        throw Error(Err::DegenerateAnnulus, "curves do not wind once around the center");

    double rmin = *std::min_element(ci.rho.begin(), ci.rho.end());
    double rmax = *std::max_element(co.rho.begin(), co.rho.end());
    double ri_max = *std::max_element(ci.rho.begin(), ci.rho.end());
    double ro_min = *std::min_element(co.rho.begin(), co.rho.end());
    if (ri_max >= ro_min + 0.0) {
        // curves overlap radially; still fine unless they touch
    }
    double pad = 2.0 / nphi;
    double rho0 = rmin - pad, rho1 = rmax + pad;
    double dphi = 2 * M_PI / nphi;
    int nrho = std::max(8, (int)std::ceil((rho1 - rho0) / dphi));
    double drho = (rho1 - rho0) / nrho;

    GridProblem g;
    g.nphi = nphi;
    g.nrho = nrho;
    g.rho0 = rho0;
    g.drho = drho;
    g.dphi = dphi;
    g.inside.assign(nphi * nrho, 0);
    g.u.assign(nphi * nrho, 0.5);
    g.cuts.assign(nphi * nrho, {});

    Crossings xo = rasterize(co, nphi, rho0, drho, nrho);
    Crossings xi = rasterize(ci, nphi, rho0, drho, nrho);

    double ri_mean = 0, ro_mean = 0;
    for (double r : ci.rho) ri_mean += r;
    ri_mean /= ci.rho.size();
    for (double r : co.rho) ro_mean += r;
    ro_mean /= co.rho.size();
    for (int j = 0; j < nrho; ++j) {
        double rho = rho0 + j * drho;
        for (int k = 0; k < nphi; ++k) {
            int bi = count_below(xi.per_col[k], rho);
            int bo = count_below(xo.per_col[k], rho);
            bool in = (bi % 2 == 1) && (bo % 2 == 0);
            g.inside[g.idx(j, k)] = in ? 1 : 0;
            // near-harmonic initial guess speeds the relaxation up a lot
            double t = (ro_mean - rho) / std::max(1e-9, ro_mean - ri_mean);
            g.u[g.idx(j, k)] = std::clamp(t, 0.0, 1.0);
        }
    }
    // cuts: vertical from per_col, horizontal from per_row
    auto set_cut_v = [&](int j, int k) {
        int id = g.idx(j, k);
        double rho = rho0 + j * drho;
        for (int dir : {+1, -1}) {
            double best = 2;
            double bv = 0;
            for (const auto* cc : {&xi, &xo}) {
                double val = (cc == &xi) ? 1.0 : 0.0;
                for (double r : cc->per_col[k]) {
                    double t = (r - rho) / drho * dir;
                    if (t > 1e-9 && t < best) {
                        best = t;
                        bv = val;
                    }
                }
            }
            if (best <= 1) {
                if (dir > 0) {
                    g.cuts[id].up = (float)std::max(best, 1e-3);
                    g.cuts[id].vup = (float)bv;
                } else {
                    g.cuts[id].down = (float)std::max(best, 1e-3);
                    g.cuts[id].vdown = (float)bv;
                }
            }
        }
    };
    auto set_cut_h = [&](int j, int k) {
        int id = g.idx(j, k);
        for (int dir : {+1, -1}) {
            double best = 2;
            double bv = 0;
            for (const auto* cc : {&xi, &xo}) {
                double val = (cc == &xi) ? 1.0 : 0.0;
                for (double p : cc->per_row[j]) {
                    // p is in column units, possibly shifted by winding
                    double d = p - k;
                    d -= std::round(d / nphi) * nphi;
                    double t = d * dir;
                    if (t > 1e-9 && t < best && t <= 1.5) {
                        best = t;
                        bv = val;
                    }
                }
            }
            if (best <= 1) {
                if (dir > 0) {
                    g.cuts[id].right = (float)std::max(best, 1e-3);
                    g.cuts[id].vright = (float)bv;
                } else {
                    g.cuts[id].left = (float)std::max(best, 1e-3);
                    g.cuts[id].vleft = (float)bv;
                }
            }
        }
    };
    for (int j = 0; j < nrho; ++j)
        for (int k = 0; k < nphi; ++k)
            if (g.inside[g.idx(j, k)]) {
                set_cut_v(j, k);
                set_cut_h(j, k);
            }

    int iters = 120 * std::max(nphi, nrho);
    solve(g, iters);
    double E = dirichlet_energy(g);
    if (E <= 0) throw Error(Err::DegenerateAnnulus, "degenerate Dirichlet energy");
    return 2 * M_PI / E;
}

}  // namespace

double annulus_modulus(const Polyline& outer, const Polyline& inner, double* error_estimate,
                       int grid) {
    double m1 = modulus_on_grid(outer, inner, grid);
    double m2 = modulus_on_grid(outer, inner, grid * 2);
    // first-order Richardson
    double extrap = m2 + (m2 - m1);
    if (error_estimate) *error_estimate = std::abs(m2 - m1);
    return extrap;
}

namespace {

double capacity_on_grid(const Polyline& boundary, Complex z0, int nphi) {
    if (winding_number(boundary, z0) == 0)
        throw Error(Err::BasepointOutside, "basepoint outside the region");
    CylCurve cb = to_cylinder(boundary, z0);
    if (!cb.valid)
        throw Error(Err::BasepointOutside, "boundary does not wind once around basepoint");

    double rmin = *std::min_element(cb.rho.begin(), cb.rho.end());
    double rmax = *std::max_element(cb.rho.begin(), cb.rho.end());
    double dphi = 2 * M_PI / nphi;
    double depth = std::max(4.0, 0.25 * (rmax - rmin) + 4.0);
    double rho0 = rmin - depth;
    double rho1 = rmax + 2.0 / nphi;
    int nrho = std::max(8, (int)std::ceil((rho1 - rho0) / dphi));
    double drho = (rho1 - rho0) / nrho;

    GridProblem g;
    g.nphi = nphi;
    g.nrho = nrho;
    g.rho0 = rho0;
    g.drho = drho;
    g.dphi = dphi;
    g.inside.assign(nphi * nrho, 0);
    g.u.assign(nphi * nrho, 0.0);
    g.cuts.assign(nphi * nrho, {});

    Crossings xb = rasterize(cb, nphi, rho0, drho, nrho);
    for (int j = 0; j < nrho; ++j) {
        double rho = rho0 + j * drho;
        for (int k = 0; k < nphi; ++k) {
            int b = count_below(xb.per_col[k], rho);
            g.inside[g.idx(j, k)] = (b % 2 == 0) ? 1 : 0;  // below the curve
            g.u[g.idx(j, k)] = rmin;                        // initial guess
        }
    }
    // boundary data: the boundary value at a crossing is its own rho
    for (int j = 0; j < nrho; ++j) {
        double rho = rho0 + j * drho;
        for (int k = 0; k < nphi; ++k) {
            int id = g.idx(j, k);
            if (!g.inside[id]) continue;
            // vertical cuts
            for (int dir : {+1, -1}) {
                double best = 2, bv = 0;
                for (double r : xb.per_col[k]) {
                    double t = (r - rho) / drho * dir;
                    if (t > 1e-9 && t < best) {
                        best = t;
                        bv = r;
                    }
                }
                if (best <= 1) {
                    if (dir > 0) {
                        g.cuts[id].up = (float)std::max(best, 1e-3);
                        g.cuts[id].vup = (float)bv;
                    } else {
                        g.cuts[id].down = (float)std::max(best, 1e-3);
                        g.cuts[id].vdown = (float)bv;
                    }
                }
            }
            for (int dir : {+1, -1}) {
                double best = 2, bv = 0;
                for (double p : xb.per_row[j]) {
                    double d = p - k;
                    d -= std::round(d / nphi) * nphi;
                    double t = d * dir;
                    if (t > 1e-9 && t < best && t <= 1.5) {
                        best = t;
                        // boundary rho at this crossing: interpolate from rho row
                        bv = rho;  // crossing lies on this row: value = rho
                    }
                }
                if (best <= 1) {
                    if (dir > 0) {
                        g.cuts[id].right = (float)std::max(best, 1e-3);
                        g.cuts[id].vright = (float)bv;
                    } else {
                        g.cuts[id].left = (float)std::max(best, 1e-3);
                        g.cuts[id].vleft = (float)bv;
                    }
                }
            }
        }
    }
    // bottom row: Neumann (mirror) — emulate by marking cuts.down with the
    // current value during relaxation; simplest: treat down-neighbor of row 0
    // as the node itself (zero flux), which solve() already does.
    int iters = 120 * std::max(nphi, nrho);
    solve(g, iters);
    // read the value deep at the bottom: average over the lowest interior row
    double sum = 0;
    int cnt = 0;
    for (int k = 0; k < nphi; ++k) {
        if (g.inside[g.idx(0, k)]) {
            sum += g.u[g.idx(0, k)];
            ++cnt;
        }
    }
    if (!cnt) throw Error(Err::BasepointOutside, "no interior at the basepoint depth");
    return sum / cnt;
}

}  // namespace

double log_conformal_radius(const Polyline& boundary, Complex z0, double* error_estimate,
                            int grid) {
    double c1 = capacity_on_grid(boundary, z0, grid);
    double c2 = capacity_on_grid(boundary, z0, grid * 2);
    if (error_estimate) *error_estimate = std::abs(c2 - c1);
    return c2 + (c2 - c1);
}

}  // namespace nestlab
