// nestlab: puzzles, nests, frames and parapieces of quadratic polynomials.
//
// Subcommands: puzzle, nest, qrec, moduli, kappa, shape, param, find,
// chebyshev.  Reports are JSON (deterministic for a fixed version and
// input); series can also go to CSV; renders to PNG/SVG.

#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "nestlab/metrics.hpp"
#include "nestlab/params.hpp"
#include "nestlab/render.hpp"
#include "nestlab/report.hpp"

using namespace nestlab;

namespace {

constexpr const char* kVersion = "nestlab 0.1.0";

Complex parse_complex(const std::string& s) {
    // forms: "-1.87", "0.35+0.64i", "-0.12-0.74i"
    double re = 0, im = 0;
    size_t i = 0;
    auto read_num = [&](double& out) {
        size_t j = i;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        while (j < s.size() && (isdigit(s[j]) || s[j] == '.' || s[j] == 'e' ||
                                s[j] == 'E' ||
                                ((s[j] == '+' || s[j] == '-') && (s[j - 1] == 'e' || s[j - 1] == 'E'))))
            ++j;
        out = std::stod(s.substr(i, j - i));
        i = j;
    };
    read_num(re);
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        read_num(im);
        if (i < s.size() && (s[i] == 'i' || s[i] == 'I')) ++i;
    } else if (i < s.size() && (s[i] == 'i' || s[i] == 'I')) {
        im = re;
        re = 0;
        ++i;
    }
    return Complex(re, im);
}

std::pair<std::uint64_t, std::uint64_t> parse_limb(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos)
        throw CLI::ValidationError("limb must be p/q, e.g. 1/2");
    return {std::stoull(s.substr(0, slash)), std::stoull(s.substr(slash + 1))};
}

struct Common {
    std::string limb = "1/2";
    std::string out_json;
    std::string render_png;
    std::string render_svg;
    std::string cache_dir;
    bool no_cache = false;
    int threads = 1;
    long budget = 10000;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--limb", c.limb, "limb p/q of the parameter");
    cmd->add_option("--json", c.out_json, "write the report to this file");
    cmd->add_option("--render", c.render_png, "render to PNG");
    cmd->add_option("--svg", c.render_svg, "render to SVG");
    cmd->add_option("--cache", c.cache_dir, "cache directory (or NESTLAB_CACHE)");
    cmd->add_flag("--no-cache", c.no_cache, "bypass the cache");
    cmd->add_option("--threads", c.threads, "worker cap; results are identical for any N");
    cmd->add_option("--budget", c.budget, "iterate budget");
}

void emit(const Common& c, const std::string& command, Json& report) {
    report["command"] = command;
    report["version"] = kVersion;
    if (!c.out_json.empty()) {
        std::ofstream os(c.out_json);
        os << report.dump(1) << "\n";
    }
    std::cout << report.dump(1) << "\n";
}

// caching wrapper: results keyed by (version, command, canonical inputs)
template <typename F>
Json cached(const Common& c, const std::string& command, const std::string& canonical,
            F&& compute) {
    std::string key = content_hash(std::string(kVersion) + "|" + command + "|" + canonical);
    std::string root = cache_root(c.cache_dir);
    if (!c.no_cache) {
        if (auto hit = cache_load(root, key)) {
            Json j = *hit;
            j["cache"] = "hit";
            return j;
        }
    }
    auto t0 = std::chrono::steady_clock::now();
    Json j = compute();
    auto t1 = std::chrono::steady_clock::now();
    j["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    Json stored = j;
    stored.erase("timing_ms");  // determinism contract excludes timings
    if (!c.no_cache) cache_store(root, key, stored);
    j["cache"] = "miss";
    return j;
}

Json label_json(const LabelChain& l) { return l.str(); }

Json nest_json(const NestSummary& nest) {
    Json j;
    j["c"] = complex_json(nest.c);
    j["limb"] = std::to_string(nest.p) + "/" + std::to_string(nest.q);
    j["first_escape"] = {{"kq", nest.kq}, {"nu", nest.nu}};
    j["lambda"] = nest.lambda;
    j["stop_reason"] = nest.stop_reason;
    Json lv = Json::array();
    for (size_t n = 1; n < nest.levels.size(); ++n) {
        const auto& L = nest.levels[n];
        Json e;
        e["level"] = L.level;
        e["return_time"] = L.return_time;
        e["central_return"] = L.central_return;
        e["central_depth"] = L.central.desc.depth;
        e["lateral_count"] = L.laterals.size();
        Json rts = Json::array();
        for (long r : L.lateral_return) rts.push_back(r);
        e["lateral_return_times"] = rts;
        lv.push_back(e);
    }
    j["levels"] = lv;
    Json sg = Json::array();
    for (const auto& s : nest.sigmas) sg.push_back(label_json(s));
    j["sigmas"] = sg;
    if (!nest.warnings.empty()) j["warnings"] = nest.warnings;
    // itineraries of the built levels
    Json its = Json::array();
    for (int n = 2; n + 1 < (int)nest.frames.size() && n < (int)nest.levels.size(); ++n) {
        for (int k = 0; k <= (int)nest.levels[n].laterals.size(); ++k) {
            try {
                Itinerary chi = itinerary(nest, n, k);
                Json e;
                e["level"] = n;
                e["index"] = k;
                Json prs = Json::array();
                for (auto& [idx, lbl] : chi.pairs)
                    prs.push_back(Json::array({idx, lbl.str()}));
                e["pairs"] = prs;
                e["admissible"] = chi.admissible();
                its.push_back(e);
            } catch (const Error&) {
            }
        }
    }
    j["itineraries"] = its;
    return j;
}

NestSummary build_nest_for(const Common& c, Complex param, const std::string& c_decimal,
                           int levels, int frames) {
    auto [p, q] = parse_limb(c.limb);
    NestOptions opt;
    opt.max_level = levels;
    opt.max_frame_level = frames;
    opt.iterate_budget = c.budget;
    opt.c_decimal = c_decimal;
    return build_nest(ComplexParam(param), p, q, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorics and geometry of quadratic principal nests"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- puzzle
    auto* cmd_puzzle = app.add_subcommand("puzzle", "build a Yoccoz puzzle and verify it");
    Common cpz;
    std::string cparam = "-1";
    int depth = 3;
    cmd_puzzle->add_option("-c,--parameter", cparam, "parameter c");
    cmd_puzzle->add_option("--depth", depth, "max puzzle depth");
    add_common(cmd_puzzle, cpz);

    // ---- nest
    auto* cmd_nest = app.add_subcommand("nest", "principal nest with frames");
    Common cns;
    std::string nparam = "-1.8705286321";
    std::string ndecimal;
    int nlevels = 5, nframes = 7;
    cmd_nest->add_option("-c,--parameter", nparam, "parameter c");
    cmd_nest->add_option("--c-decimal", ndecimal, "high precision decimal for c");
    cmd_nest->add_option("--levels", nlevels, "nest levels");
    cmd_nest->add_option("--frames", nframes, "frame levels");
    add_common(cmd_nest, cns);

    // ---- qrec
    auto* cmd_qrec = app.add_subcommand("qrec", "Q-recurrence verification");
    Common cqr;
    std::string qparam = "-1.8705286321";
    std::string qdecimal;
    std::string qcenter = "-1";
    int qperiod = 2, qlevels = 6;
    cmd_qrec->add_option("-c,--parameter", qparam, "parameter to verify");
    cmd_qrec->add_option("--c-decimal", qdecimal, "high precision decimal for c");
    cmd_qrec->add_option("--Q", qcenter, "center of the model component");
    cmd_qrec->add_option("--period", qperiod, "period of the model center");
    cmd_qrec->add_option("--levels", qlevels, "levels to check");
    add_common(cmd_qrec, cqr);

    // ---- moduli
    auto* cmd_moduli = app.add_subcommand("moduli", "principal annuli moduli");
    Common cmd_;
    std::string mparam = "-1.8705286321";
    std::string mdecimal;
    int mfrom = 1, mto = 6, mgrid = 160;
    std::string mcsv;
    cmd_moduli->add_option("-c,--parameter", mparam, "parameter c");
    cmd_moduli->add_option("--c-decimal", mdecimal, "high precision decimal for c");
    cmd_moduli->add_option("--from", mfrom, "first level");
    cmd_moduli->add_option("--to", mto, "last level");
    cmd_moduli->add_option("--grid", mgrid, "Laplace grid");
    cmd_moduli->add_option("--csv", mcsv, "write mu_n series as CSV");
    add_common(cmd_moduli, cmd_);

    // ---- kappa
    auto* cmd_kappa = app.add_subcommand("kappa", "growth-rate table kappa_m");
    Common ckp;
    std::string mrange = "2..12";
    cmd_kappa->add_option("--m", mrange, "range m0..m1");
    add_common(cmd_kappa, ckp);

    // ---- shape
    auto* cmd_shape = app.add_subcommand("shape", "rescaled nest pieces vs the model Julia set");
    Common csh;
    std::string sparam = "-1.8705286321";
    std::string sdecimal;
    std::string scenter = "-1";
    int speriod = 2, sfrom = 4, sto = 7;
    cmd_shape->add_option("-c,--parameter", sparam, "parameter c");
    cmd_shape->add_option("--c-decimal", sdecimal, "high precision decimal for c");
    cmd_shape->add_option("--Q", scenter, "model center");
    cmd_shape->add_option("--period", speriod, "model period");
    cmd_shape->add_option("--from", sfrom, "first level");
    cmd_shape->add_option("--to", sto, "last level");
    add_common(cmd_shape, csh);

    // ---- param
    auto* cmd_param = app.add_subcommand("param", "parameter-plane constructions");
    Common cpr;
    std::string pparam = "-1.8705286321";
    std::string pdecimal;
    int plevels = 5;
    bool pmoduli = false;
    cmd_param->add_option("-c,--parameter", pparam, "parameter c");
    cmd_param->add_option("--c-decimal", pdecimal, "high precision decimal for c");
    cmd_param->add_option("--levels", plevels, "paranest levels");
    cmd_param->add_flag("--paramoduli", pmoduli, "also measure paramoduli");
    add_common(cmd_param, cpr);

    // ---- find
    auto* cmd_find = app.add_subcommand("find", "locate a real parameter by kneading target");
    Common cfd;
    std::string target = "fibonacci";
    double ftol = 1e-8;
    cmd_find->add_option("--target", target, "fibonacci | meta-chebyshev | explicit L/R string");
    cmd_find->add_option("--tol", ftol, "bracket tolerance");
    add_common(cmd_find, cfd);

    // ---- chebyshev
    auto* cmd_cheb = app.add_subcommand("chebyshev", "meta-Chebyshev sequence (exploratory)");
    Common ccb;
    int clen = 64;
    bool cdist = false;
    cmd_cheb->add_option("--length", clen, "symbols to generate");
    cmd_cheb->add_flag("--distance", cdist,
                       "also report Hausdorff distance of the located parameter's Julia "
                       "set to [-2,2] (no pass/fail)");
    add_common(cmd_cheb, ccb);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_puzzle) {
            auto [p, q] = parse_limb(cpz.limb);
            Complex c = parse_complex(cparam);
            Json j = cached(cpz, "puzzle",
                            cparam + "|" + cpz.limb + "|" + std::to_string(depth), [&] {
                                Puzzle puz = build_puzzle(ComplexParam(c), p, q, depth);
                                MarkovReport mk = markov_check(puz);
                                auto gp = verify_graph_properties(puz);
                                Json r;
                                r["piece_counts"] = Json::array();
                                for (auto& lv : puz.levels)
                                    r["piece_counts"].push_back(lv.size());
                                r["markov_violations"] = mk.violations;
                                r["graph_violations"] = gp.violations;
                                if (depth >= 1) {
                                    Json d1;
                                    d1["critical"] = puz.critical_index[1];
                                    d1["y_index"] = puz.y_index;
                                    d1["z_index"] = puz.z_index;
                                    r["depth1_renaming"] = d1;
                                }
                                auto graphs = puzzle_graphs(puz);
                                r["graph_dot"] = graph_to_dot(graphs.back());
                                return r;
                            });
            if (!cpz.render_png.empty() || !cpz.render_svg.empty()) {
                Puzzle puz = build_puzzle(ComplexParam(c), p, q, depth);
                double R = 2.2;
                if (!cpz.render_png.empty()) {
                    Canvas cv(900, 900);
                    cv.set_window(-R, R, -R, R);
                    auto K = julia_boundary(c, 60000);
                    cv.draw_points(K, 0xbbbbbb);
                    std::uint32_t cols[] = {0xd62728, 0x1f77b4, 0x2ca02c, 0x9467bd};
                    for (size_t d = 0; d < puz.levels.size(); ++d)
                        for (auto& pc : puz.levels[d])
                            cv.draw_polyline(pc.boundary.pts, cols[d % 4]);
                    cv.write_png(cpz.render_png);
                }
                if (!cpz.render_svg.empty()) {
                    SvgWriter svg(-R, R, -R, R);
                    const char* cols[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
                    for (size_t d = 0; d < puz.levels.size(); ++d)
                        for (auto& pc : puz.levels[d])
                            svg.add_polyline(pc.boundary.pts, cols[d % 4]);
                    svg.write(cpz.render_svg);
                }
            }
            emit(cpz, "puzzle", j);
        } else if (*cmd_nest) {
            Complex c = parse_complex(nparam);
            Json j = cached(cns, "nest",
                            nparam + "|" + ndecimal + "|" + cns.limb + "|" +
                                std::to_string(nlevels) + "|" + std::to_string(nframes) +
                                "|" + std::to_string(cns.budget),
                            [&] {
                                NestSummary nest =
                                    build_nest_for(cns, c, ndecimal, nlevels, nframes);
                                return nest_json(nest);
                            });
            if (!cns.render_png.empty()) {
                NestSummary nest = build_nest_for(cns, c, ndecimal, nlevels, nframes);
                Canvas cv(900, 900);
                double R = 2.0;
                cv.set_window(-R, R, -R, R);
                cv.draw_points(julia_boundary(c, 60000), 0xcccccc);
                for (auto& L : nest.levels) {
                    cv.draw_polyline(L.central.boundary.pts, 0xd62728);
                    for (auto& lat : L.laterals) cv.draw_polyline(lat.boundary.pts, 0x1f77b4);
                }
                cv.write_png(cns.render_png);
            }
            emit(cns, "nest", j);
        } else if (*cmd_qrec) {
            Complex c = parse_complex(qparam);
            Json j = cached(
                cqr, "qrec",
                qparam + "|" + qdecimal + "|" + qcenter + "|" + std::to_string(qperiod) +
                    "|" + cqr.limb + "|" + std::to_string(qlevels),
                [&] {
                    NestSummary nest =
                        build_nest_for(cqr, c, qdecimal, qlevels + 3, qlevels + 4);
                    HyperbolicCenter Q = make_center(parse_complex(qcenter), qperiod);
                    QRecurrenceReport rep = is_q_recurrent(nest, Q, qlevels);
                    FibonacciCheck fc = fibonacci_check(nest);
                    Json r;
                    r["isolation_depth"] = rep.isolation_depth;
                    r["pieces_per_level"] = rep.pieces_per_level;
                    r["composition_ok"] = rep.composition_ok;
                    r["sigma_ok"] = rep.sigma_ok;
                    r["itinerary_ok"] = rep.itinerary_ok;
                    if (rep.first_violation)
                        r["first_violation"] = {{"level", rep.first_violation->first},
                                                {"reason", rep.first_violation->second}};
                    r["fibonacci"] = fc.is_fibonacci;
                    r["fibonacci_detail"] = fc.detail;
                    r["nest"] = nest_json(nest);
                    return r;
                });
            emit(cqr, "qrec", j);
        } else if (*cmd_moduli) {
            Complex c = parse_complex(mparam);
            Json j = cached(cmd_, "moduli",
                            mparam + "|" + mdecimal + "|" + cmd_.limb + "|" +
                                std::to_string(mfrom) + ".." + std::to_string(mto) + "|" +
                                std::to_string(mgrid),
                            [&] {
                                NestSummary nest =
                                    build_nest_for(cmd_, c, mdecimal, mto + 1, 0);
                                GrowthSeries gs = measured_moduli(nest, mfrom, mto, mgrid);
                                Json r;
                                r["mu"] = gs.values;
                                r["gaps"] = gs.per_level_gap;
                                r["ratios"] = gs.per_level_ratio;
                                r["slope"] = gs.slope;
                                r["intercept"] = gs.intercept;
                                r["lyubich_B"] = gs.lyubich_B;
                                r["lyubich_C"] = gs.lyubich_C;
                                return r;
                            });
            if (!mcsv.empty()) {
                std::ofstream os(mcsv);
                os << "level,mu\n";
                for (size_t i = 0; i < j["mu"].size(); ++i)
                    os << (mfrom + (int)i) << "," << j["mu"][i].dump() << "\n";
            }
            emit(cmd_, "moduli", j);
        } else if (*cmd_kappa) {
            auto dots = mrange.find("..");
            int m0 = std::stoi(mrange.substr(0, dots));
            int m1 = dots == std::string::npos ? m0 : std::stoi(mrange.substr(dots + 2));
            Json j = cached(ckp, "kappa", mrange, [&] {
                Json r;
                Json table = Json::array();
                for (int m = m0; m <= m1; ++m)
                    table.push_back(Json{{"m", m}, {"kappa", kappa(m)}});
                r["table"] = table;
                return r;
            });
            emit(ckp, "kappa", j);
        } else if (*cmd_shape) {
            Complex c = parse_complex(sparam);
            Json j = cached(csh, "shape",
                            sparam + "|" + sdecimal + "|" + scenter + "|" +
                                std::to_string(speriod) + "|" + csh.limb + "|" +
                                std::to_string(sfrom) + ".." + std::to_string(sto),
                            [&] {
                                NestSummary nest =
                                    build_nest_for(csh, c, sdecimal, sto + 1, sto + 3);
                                HyperbolicCenter Q =
                                    make_center(parse_complex(scenter), speriod);
                                ShapeReport rep = shape_convergence(nest, Q, sfrom, sto);
                                Json r;
                                Json lv = Json::array();
                                for (auto& L : rep.levels) {
                                    Json e;
                                    e["level"] = L.level;
                                    e["rescale"] = complex_json(L.rescale);
                                    e["hausdorff"] = L.hausdorff;
                                    e["c0"] = L.c0;
                                    e["c1"] = L.c1;
                                    e["g0_gap"] = L.g0_gap;
                                    lv.push_back(e);
                                }
                                r["levels"] = lv;
                                return r;
                            });
            emit(csh, "shape", j);
        } else if (*cmd_param) {
            Complex c = parse_complex(pparam);
            Json j = cached(
                cpr, "param",
                pparam + "|" + pdecimal + "|" + cpr.limb + "|" + std::to_string(plevels) +
                    "|" + (pmoduli ? "pm" : ""),
                [&] {
                    NestSummary nest =
                        build_nest_for(cpr, c, pdecimal, plevels + 2, plevels + 4);
                    Paranest pn = paranest(nest, plevels);
                    Json r;
                    Json dl = Json::array();
                    for (auto& d : pn.delta) {
                        Json e;
                        e["level"] = d.level;
                        e["depth"] = d.depth;
                        Json fp = Json::array();
                        for (auto& iv : d.footprint.intervals())
                            fp.push_back(Json::array({iv.a.str(), iv.b.str()}));
                        e["angles"] = fp;
                        dl.push_back(e);
                    }
                    r["paranest"] = dl;
                    r["chain_violations"] = pn.chain_violations;
                    // membership of c in the first pieces
                    Json mem = Json::array();
                    for (size_t i = 0; i < pn.delta.size() && i < 3; ++i) {
                        Polyline b = sample_parapiece_boundary(pn.delta[i], 24, 1.0);
                        mem.push_back(winding_number(b, c) != 0);
                    }
                    r["contains_c"] = mem;
                    if (pmoduli) {
                        int hi = std::min(plevels - 1, 3);
                        ParamoduliResult pm = paramoduli(nest, 1, hi, 128);
                        r["paramoduli"] = pm.para.values;
                        r["dyn_moduli"] = pm.dynamical;
                        r["ratio"] = pm.ratio;
                    }
                    return r;
                });
            emit(cpr, "param", j);
        } else if (*cmd_find) {
            Json j = cached(cfd, "find", target + "|" + std::to_string(ftol), [&] {
                std::string kn;
                if (target == "fibonacci")
                    kn = fibonacci_kneading(340);
                else if (target == "meta-chebyshev")
                    kn = meta_chebyshev(340).symbols;
                else
                    kn = target;
                auto res = find_real_parameter(kn, ftol);
                Json r;
                r["c"] = res.c;
                r["c_decimal"] = res.c_decimal;
                r["bracket_width"] = res.width;
                r["target_prefix"] = kn.substr(0, 24);
                return r;
            });
            emit(cfd, "find", j);
        } else if (*cmd_cheb) {
            Json j = cached(ccb, "chebyshev",
                            std::to_string(clen) + "|" + (cdist ? "d" : ""), [&] {
                                KneadingSequence th = meta_chebyshev(clen);
                                Json r;
                                r["theta"] = th.symbols;
                                r["theta_marked"] = th.marked();
                                r["epsilon"] = th.epsilon;
                                r["admissible"] = th.admissible;
                                r["max_plus_run"] = th.max_plus_run;
                                if (cdist) {
                                    auto res =
                                        find_real_parameter(meta_chebyshev(340).symbols, 1e-10);
                                    auto K = julia_boundary(Complex(res.c, 0), 20000);
                                    // distance of the sampled Julia set to [-2,2]
                                    double worst = 0;
                                    for (auto& z : K) {
                                        double x = std::clamp(z.real(), -2.0, 2.0);
                                        worst = std::max(worst,
                                                         std::abs(z - Complex(x, 0)));
                                    }
                                    r["c"] = res.c;
                                    r["julia_to_interval"] = worst;
                                }
                                return r;
                            });
            emit(ccb, "chebyshev", j);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << err_name(e.code()) << "): " << e.what() << "\n";
        return e.exit_code();
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
