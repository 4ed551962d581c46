#include "nestlab/qrec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nestlab {

HyperbolicCenter make_center(Complex approx, int period) {
    Complex c = approx;
    for (int it = 0; it < 80; ++it) {
        Complex z = 0, dz = 0;
        for (int j = 0; j < period; ++j) {
            dz = 2.0 * z * dz + 1.0;
            z = z * z + c;
        }
        if (std::abs(dz) < 1e-300) break;
        Complex delta = z / dz;
        c -= delta;
        if (std::abs(delta) < 1e-15) break;
    }
    HyperbolicCenter Q;
    Q.c = c;
    Q.period = period;
    Complex z = 0;
    Q.cycle.push_back(z);
    for (int j = 1; j < period; ++j) {
        z = z * z + c;
        Q.cycle.push_back(z);
    }
    z = z * z + c;
    if (std::abs(z) > 1e-10)
        throw Error(Err::NotPrime, "center refinement failed: f^m(0) != 0");
    for (size_t j = 1; j < Q.cycle.size(); ++j)
        if (std::abs(Q.cycle[j]) < 1e-10)
            throw Error(Err::InvalidArgument, "period is not minimal");
    auto fp = fixed_points(ComplexParam(c));
    if (!fp.rotation)
        throw Error(Err::WrongLimb, "could not identify the limb of the center");
    Q.p = fp.rotation->first;
    Q.q = fp.rotation->second;
    return Q;
}

namespace {

// halves of a puzzle graph split at xi: the component of eta is 'L';
// remaining components are paired by central symmetry, the pair member
// holding the smallest footprint start angle goes left
std::vector<int> puzzle_halves(const Puzzle& puz, int depth) {
    const auto& pieces = puz.levels[depth];
    int xi = puz.critical_index[depth];
    int eta = puz.cv_index[depth];
    int n = (int)pieces.size();
    LabeledGraph g = dual_graph(pieces);
    auto adj = g.adjacency();
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (s == xi || comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = nc;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (w != xi && comp[w] < 0) {
                    comp[w] = nc;
                    stack.push_back(w);
                }
        }
        ++nc;
    }
    std::vector<int> sigma(n, -1);
    for (int i = 0; i < n; ++i) {
        Footprint ht = pieces[i].desc.footprint.half_turned();
        for (int j = 0; j < n; ++j)
            if (pieces[j].desc.footprint == ht) sigma[i] = j;
    }
    std::vector<int> half(n, -1);
    for (int v = 0; v < n; ++v) {
        if (v == xi) continue;
        if (comp[v] == comp[eta]) {
            half[v] = 0;
            if (sigma[v] >= 0) half[sigma[v]] = 1;
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return RationalAngle::cmp(pieces[a].desc.footprint.intervals()[0].a,
                                  pieces[b].desc.footprint.intervals()[0].a) < 0;
    });
    for (int idx : order) {
        if (idx == xi || half[idx] >= 0) continue;
        for (int v = 0; v < n; ++v) {
            if (v == xi || comp[v] != comp[idx]) continue;
            half[v] = 0;
            if (sigma[v] >= 0) half[sigma[v]] = 1;
        }
    }
    return half;
}

}  // namespace

QLabelData q_label_sequence(const HyperbolicCenter& Q, int depth) {
    QLabelData out;
    out.puzzle = build_puzzle(ComplexParam(Q.c), Q.p, Q.q, depth);
    const Puzzle& puz = out.puzzle;
    out.seq.q = Q.q;

    out.labels.resize(puz.levels.size());
    {
        // depth-0 labels: Z_j counterclockwise from the critical piece
        const auto& d0 = puz.levels[0];
        std::vector<int> order(d0.size());
        for (size_t i = 0; i < d0.size(); ++i) order[i] = (int)i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return RationalAngle::cmp(d0[a].desc.footprint.intervals()[0].a,
                                      d0[b].desc.footprint.intervals()[0].a) < 0;
        });
        int crit_pos = 0;
        for (size_t i = 0; i < order.size(); ++i)
            if (order[i] == puz.critical_index[0]) crit_pos = (int)i;
        out.labels[0].resize(d0.size());
        for (size_t i = 0; i < order.size(); ++i) {
            int v = order[(crit_pos + i) % order.size()];
            out.labels[0][v].symbols = {(int)i};
        }
    }
    for (size_t d = 1; d < puz.levels.size(); ++d) {
        auto fs = fstar_map(puz, (int)d);
        auto half = puzzle_halves(puz, (int)d);
        out.labels[d].resize(puz.levels[d].size());
        for (size_t v = 0; v < puz.levels[d].size(); ++v) {
            if ((int)v == puz.critical_index[d]) {
                out.labels[d][v].symbols = {0};  // Z_0 sigma_{d-1}
                for (int sym : out.labels[d - 1][puz.cv_index[d - 1]].symbols)
                    out.labels[d][v].symbols.push_back(sym);
            } else {
                out.labels[d][v].symbols = {half[v] == 0 ? kSymL : kSymR};
                for (int sym : out.labels[d - 1][fs[v]].symbols)
                    out.labels[d][v].symbols.push_back(sym);
            }
        }
        // orientation canon: the critical value vertex starts with 'L'
        if (out.labels[d][puz.cv_index[d]].symbols[0] == kSymR) {
            for (auto& lbl : out.labels[d])
                if (!lbl.symbols.empty() &&
                    (lbl.symbols[0] == kSymL || lbl.symbols[0] == kSymR))
                    lbl.symbols[0] = lbl.symbols[0] == kSymL ? kSymR : kSymL;
        }
    }
    for (size_t d = 0; d < puz.levels.size(); ++d)
        out.seq.sigmas.push_back(out.labels[d][puz.cv_index[d]]);

    out.cycle_piece.resize(puz.levels.size());
    for (size_t d = 0; d < puz.levels.size(); ++d) {
        std::vector<int> pcidx;
        bool distinct = true;
        for (const auto& zj : Q.cycle) {
            int idx = -1;
            try {
                idx = puz.piece_index_at((int)d, zj);
            } catch (const Error&) {
                idx = -1;
            }
            if (idx >= 0 && std::find(pcidx.begin(), pcidx.end(), idx) != pcidx.end())
                distinct = false;
            pcidx.push_back(idx);
        }
        out.cycle_piece[d] = pcidx;
        if (distinct && out.isolation_depth < 0) out.isolation_depth = (int)d;
    }
    return out;
}

namespace {

// sigma sequences match modulo the free per-level orientation flips: symbol i
// of a level-t label was prefixed at doubling t - i, and one flip toggles
// every L/R introduced at that doubling
bool sigmas_match_mod_flips(const std::vector<LabelChain>& a,
                            const std::vector<LabelChain>& b, size_t upto,
                            std::string* why) {
    std::map<long, int> flip;
    for (size_t t = 0; t < upto; ++t) {
        if (t >= a.size() || t >= b.size()) break;
        const auto& sa = a[t].symbols;
        const auto& sb = b[t].symbols;
        if (sa.size() != sb.size()) {
            if (why) *why = "sigma_" + std::to_string(t) + " lengths differ";
            return false;
        }
        for (size_t i = 0; i < sa.size(); ++i) {
            long d = (long)t - (long)i;
            bool a_lr = sa[i] == kSymL || sa[i] == kSymR;
            bool b_lr = sb[i] == kSymL || sb[i] == kSymR;
            if (a_lr != b_lr) {
                if (why) *why = "sigma_" + std::to_string(t) + " symbol kind mismatch";
                return false;
            }
            if (!a_lr) {
                if (sa[i] != sb[i]) {
                    if (why) *why = "sigma_" + std::to_string(t) + " Z-symbol mismatch";
                    return false;
                }
                continue;
            }
            int need = sa[i] == sb[i] ? 0 : 1;
            auto it = flip.find(d);
            if (it == flip.end()) {
                flip[d] = need;
            } else if (it->second != need) {
                if (why)
                    *why = "sigma_" + std::to_string(t) +
                           " inconsistent orientation at doubling " + std::to_string(d);
                return false;
            }
        }
    }
    return true;
}

}  // namespace

bool QRecurrenceReport::recurrent(int levels_required) const {
    int ok = 0;
    for (size_t i = 0; i < composition_ok.size(); ++i)
        if (composition_ok[i]) ++ok;
    if (ok < levels_required) return false;
    if (first_violation) return false;
    return true;
}

QRecurrenceReport is_q_recurrent(const NestSummary& nest, const HyperbolicCenter& Q,
                                 int levels) {
    QRecurrenceReport rep;
    int m = Q.period;
    QLabelData qd = q_label_sequence(Q, std::min<int>(8, (int)nest.sigmas.size() + 1));
    rep.isolation_depth = qd.isolation_depth;

    {
        std::string why;
        size_t upto = std::min(nest.sigmas.size(), qd.seq.sigmas.size());
        upto = std::min<size_t>(upto, (size_t)levels + 1);
        bool ok = sigmas_match_mod_flips(nest.sigmas, qd.seq.sigmas, upto, &why);
        for (size_t t = 0; t < upto; ++t) rep.sigma_ok.push_back(ok);
        if (!ok && !rep.first_violation) rep.first_violation = {{0, "labels: " + why}};
    }

    int max_level = std::min<int>(levels, (int)nest.levels.size() - 1);
    rep.checked_from = 1;
    rep.checked_to = max_level;
    for (int n = 1; n + m <= max_level; ++n) {
        long sum = 0;
        for (int j = 0; j < m; ++j) sum += nest.ell(n + j);
        bool ok = nest.ell(n + m) == sum;
        rep.composition_ok.push_back(ok);
        if (!ok && !rep.first_violation)
            rep.first_violation = {{n, "return-time composition fails"}};
    }

    for (int n = 1; n <= max_level; ++n) {
        int pieces = 1 + (int)nest.levels[n].laterals.size();
        rep.pieces_per_level.push_back(pieces);
        bool itin_ok = true;
        if (n >= 2 && n + 1 < (int)nest.frames.size()) {
            for (int j = 0; j < pieces; ++j) {
                try {
                    Itinerary chi = itinerary(nest, n, j);
                    bool last_zero = !chi.pairs.empty() && chi.pairs.back().first == 0;
                    itin_ok = itin_ok && last_zero && chi.admissible();
                    if (j < m - 1) {
                        itin_ok = itin_ok && chi.pairs.size() == 2 &&
                                  chi.pairs[0].first == j + 1;
                    } else if (j == m - 1) {
                        itin_ok = itin_ok && chi.pairs.size() == 1;
                    }
                } catch (const Error&) {
                    itin_ok = false;
                }
            }
        }
        rep.itinerary_ok.push_back(itin_ok);
    }
    return rep;
}

FibonacciCheck fibonacci_check(const NestSummary& nest) {
    FibonacciCheck out;
    out.is_fibonacci = true;
    auto note = [&](const std::string& s, bool ok) {
        out.detail.push_back((ok ? "ok: " : "FAIL: ") + s);
        out.is_fibonacci = out.is_fibonacci && ok;
    };
    if (nest.levels.size() < 5) {
        note("nest has at least 4 levels", false);
        return out;
    }
    note("first return to Y_0^(1) at iterate 3 (lambda = 3)", nest.lambda == 3);
    note("ell_1 = 5", nest.ell(1) == 5);
    for (int n = 3; n < (int)nest.levels.size(); ++n) {
        bool ok = nest.ell(n) == nest.ell(n - 1) + nest.ell(n - 2);
        note("ell_" + std::to_string(n) + " = ell_" + std::to_string(n - 1) + " + ell_" +
                 std::to_string(n - 2),
             ok);
    }
    for (int n = 2; n < (int)nest.levels.size(); ++n) {
        note("level " + std::to_string(n) + " has exactly one lateral piece",
             nest.levels[n].laterals.size() == 1);
        note("level " + std::to_string(n) + " non-central",
             !nest.levels[n].central_return);
    }
    return out;
}

KneadingSequence meta_chebyshev(int length) {
    if (length < 5) throw Error(Err::InvalidArgument, "meta-Chebyshev needs length >= 5");
    std::string sym = "LRRLL";
    std::vector<int> marks{1, 2, 4};  // 0-based positions of the checks
    while ((int)sym.size() < length) {
        // second copy of the chain with the second-to-last marked symbol
        // replaced by its opposite; the copy's last symbol takes the new mark
        std::string copy = sym;
        int pos = marks[marks.size() - 2];
        copy[pos] = copy[pos] == 'L' ? 'R' : 'L';
        int base = (int)sym.size();
        sym += copy;
        marks.push_back(base + (int)copy.size() - 1);
    }
    KneadingSequence out;
    out.symbols = sym.substr(0, length);
    out.checked.assign(length, false);
    for (int mpos : marks)
        if (mpos < length) out.checked[mpos] = true;
    int lcount = 0;
    for (int j = 0; j < length; ++j) {
        if (out.symbols[j] == 'L') ++lcount;
        out.epsilon += (lcount % 2 == 0) ? '+' : '-';
    }
    out.admissible = epsilon_admissible(out.epsilon, &out.max_plus_run);
    return out;
}

std::string KneadingSequence::marked() const {
    std::string s;
    for (size_t i = 0; i < symbols.size(); ++i) {
        s += symbols[i];
        if (checked[i]) s += '!';
    }
    return s;
}

bool epsilon_admissible(const std::string& eps, int* max_plus_run) {
    int run = 0, maxrun = 0;
    for (char ch : eps) {
        run = ch == '+' ? run + 1 : 0;
        maxrun = std::max(maxrun, run);
    }
    if (max_plus_run) *max_plus_run = maxrun;
    int n = (int)eps.size();
    auto val = [&](int j) { return eps[j - 1] == '+' ? 1 : -1; };  // 1-based
    for (int mpos = 1; mpos < n; ++mpos) {
        for (int i = 1; mpos + i <= n; ++i) {
            if (val(mpos + i) != val(mpos) * val(i)) {
                if (val(i) != -1) return false;
                break;
            }
        }
    }
    return true;
}

std::vector<long> closest_return_times(const std::string& c_decimal, long budget,
                                       long skip_through) {
    __float128 c = parse_quad(c_decimal), z = 0;
    std::vector<long> out;
    __float128 best = 10;
    for (long j = 1; j <= budget; ++j) {
        z = z * z + c;
        __float128 a = z < 0 ? -z : z;
        if (a < best) {
            best = a;
            if (j > skip_through) out.push_back(j);
        }
    }
    return out;
}

std::string real_kneading(double c, int length) {
    __float128 cq = c, z = 0;
    std::string out;
    for (int j = 1; j <= length; ++j) {
        z = z * z + cq;
        out += (z < 0) ? 'L' : 'R';
    }
    return out;
}

namespace {

std::string kneading_q(__float128 c, int length) {
    __float128 z = 0;
    std::string out;
    for (int j = 1; j <= length; ++j) {
        z = z * z + c;
        out += (z < 0) ? 'L' : 'R';
    }
    return out;
}

// twisted lexicographic order for a unimodal map with a minimum: at the first
// difference, the orientation is the parity of preceding 'L's
int kneading_cmp(const std::string& a, const std::string& b) {
    size_t n = std::min(a.size(), b.size());
    int lpar = 0;
    for (size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) {
            int raw = a[i] == 'L' ? -1 : 1;
            return lpar % 2 == 0 ? raw : -raw;
        }
        if (a[i] == 'L') ++lpar;
    }
    return 0;
}

std::string quad_to_decimal(__float128 v, int digits) {
    std::string s;
    if (v < 0) {
        s += '-';
        v = -v;
    }
    long long ip = (long long)v;
    s += std::to_string(ip);
    s += '.';
    v -= ip;
    for (int i = 0; i < digits; ++i) {
        v *= 10;
        int d = (int)v;
        s += (char)('0' + d);
        v -= d;
    }
    return s;
}

}  // namespace

RealParamResult find_real_parameter(const std::string& target, double tolerance, double lo,
                                    double hi) {
    int len = (int)std::min<size_t>(target.size(), 400);
    std::string t = target.substr(0, len);
    __float128 a = lo, b = hi;
    std::string ka = kneading_q(a, len), kb = kneading_q(b, len);
    if (kneading_cmp(ka, t) > 0 || kneading_cmp(kb, t) < 0)
        throw Error(Err::NotBracketed, "target kneading not bracketed by the endpoints");
    for (int it = 0; it < 220; ++it) {
        __float128 mid = (a + b) / 2;
        std::string km = kneading_q(mid, len);
        int cmp = kneading_cmp(km, t);
        if (cmp < 0)
            a = mid;
        else if (cmp > 0)
            b = mid;
        else {
            // tie at full depth: shrink both ends toward the periodic side
            __float128 w = (b - a) / 4;
            a = mid - w;
            b = mid + w;
        }
        if ((double)(b - a) < 1e-31) break;
    }
    RealParamResult res;
    res.c = (double)((a + b) / 2);
    res.width = (double)(b - a);
    res.c_decimal = quad_to_decimal((a + b) / 2, 32);
    if (res.width > tolerance)
        throw Error(Err::BudgetExhausted, "bisection did not reach the tolerance");
    return res;
}

std::string fibonacci_kneading(int length) {
    // kneading blocks along the Fibonacci cutting times: W_1 = "L",
    // W_2 = "LR", W_{k+1} = W_k + flip_last(W_{k-1})
    std::string wprev = "L", w = "LR";
    while ((int)w.size() < length) {
        std::string fl = wprev;
        fl.back() = fl.back() == 'L' ? 'R' : 'L';
        std::string next = w + fl;
        wprev = w;
        w = next;
    }
    return w.substr(0, length);
}

SteerResult steer_complex_parameter(const HyperbolicCenter& Q,
                                    const std::vector<int>& orientations, int levels,
                                    std::optional<Complex> seed, long iterate_budget) {
    SteerResult out;
    bool real_target = std::abs(Q.c.imag()) < 1e-14 && !seed;
    Complex c_est;
    if (real_target) {
        if (Q.period == 2) {
            auto r = find_real_parameter(fibonacci_kneading(200), 1e-12);
            c_est = Complex(r.c, 0);
        } else {
            throw Error(Err::InvalidArgument,
                        "real steering without a seed is supported for Q = z^2-1 only");
        }
    } else if (seed) {
        c_est = *seed;
    } else {
        throw Error(Err::InvalidArgument, "complex steering requires a seed parameter");
    }

    NestOptions nopt;
    nopt.max_level = levels;
    nopt.iterate_budget = iterate_budget;
    nopt.max_frame_level = 0;
    nopt.build_lateral_frames = false;
    NestSummary nest = build_nest(ComplexParam(c_est), Q.p, Q.q, nopt);
    int built = (int)nest.levels.size() - 1;
    out.levels_done = built;
    for (int n = 1; n <= built; ++n)
        out.parapieces.push_back(nest.levels[n].central.desc.footprint.image());
    if (built >= 1) {
        // centers of successive paranest pieces: superattracting parameters
        // of the return periods, chained so each Newton starts close
        Complex c = c_est;
        Complex prev_center = c_est;
        for (int n = 1; n <= built; ++n) {
            long period = nest.ell(n);
            Complex cand = c_est;  // the running estimate is the best seed
            bool ok = true;
            for (int it = 0; it < 60; ++it) {
                Complex z = 0, dz = 0;
                for (long j = 0; j < period; ++j) {
                    dz = 2.0 * z * dz + 1.0;
                    z = z * z + cand;
                }
                if (!std::isfinite(std::abs(z)) || std::abs(dz) < 1e-300) {
                    ok = false;
                    break;
                }
                Complex delta = z / dz;
                cand -= delta;
                if (std::abs(delta) < 1e-14) break;
            }
            if (!ok || std::abs(cand - c_est) > 0.2) break;
            prev_center = c;
            c = cand;
        }
        out.center = c;
        out.diameter = 2.0 * std::abs(c - prev_center) + 1e-12;
    } else {
        out.center = c_est;
        out.diameter = 1.0;
        out.note = "no nest level built";
    }
    if (!orientations.empty())
        out.note += (out.note.empty() ? "" : "; ") +
                    std::string("orientation choices recorded: ") +
                    std::to_string(orientations.size());
    return out;
}

}  // namespace nestlab
