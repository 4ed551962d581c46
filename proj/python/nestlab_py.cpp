#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nestlab/metrics.hpp"
#include "nestlab/params.hpp"

namespace py = pybind11;
using namespace nestlab;

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> rotation_cycle_py(std::uint64_t p,
                                                                       std::uint64_t q) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& t : rotation_cycle(p, q))
        out.push_back({t.num().low64(), t.den().low64()});
    return out;
}

py::dict nest_summary_py(Complex c, std::uint64_t p, std::uint64_t q, int levels,
                         int frames, const std::string& c_decimal) {
    NestOptions opt;
    opt.max_level = levels;
    opt.max_frame_level = frames;
    opt.c_decimal = c_decimal;
    NestSummary nest = build_nest(ComplexParam(c), p, q, opt);
    py::dict d;
    d["kq"] = nest.kq;
    d["nu"] = nest.nu;
    d["lambda"] = nest.lambda;
    py::list ells, laterals, sigmas;
    for (size_t n = 1; n < nest.levels.size(); ++n) {
        ells.append(nest.levels[n].return_time);
        laterals.append(nest.levels[n].laterals.size());
    }
    for (const auto& s : nest.sigmas) sigmas.append(s.str());
    d["return_times"] = ells;
    d["lateral_counts"] = laterals;
    d["sigmas"] = sigmas;
    d["stop_reason"] = nest.stop_reason;
    return d;
}

}  // namespace

PYBIND11_MODULE(_nestlab, m) {
    m.doc() = "principal nests, frames and parapieces of quadratic polynomials";

    m.def("kappa", &kappa, py::arg("m"),
          "largest real root of z^m - (z^{m-1}+...+1)/2; exactly 1 for m = 2");
    m.def(
        "simulate_recursion",
        [](int mm, double eps, int n) {
            auto g = simulate_recursion(mm, eps, n);
            return g.values;
        },
        py::arg("m"), py::arg("eps"), py::arg("n"));
    m.def("rotation_cycle", &rotation_cycle_py, py::arg("p"), py::arg("q"),
          "the doubling cycle with rotation number p/q, as (num, den) pairs");
    m.def(
        "critical_orbit",
        [](std::complex<double> c, int n) {
            auto o = critical_orbit(ComplexParam(c), n);
            return o.points;
        },
        py::arg("c"), py::arg("n"));
    m.def(
        "find_real_parameter",
        [](const std::string& target, double tol) {
            std::string kn = target == "fibonacci" ? fibonacci_kneading(340)
                             : target == "meta-chebyshev" ? meta_chebyshev(340).symbols
                                                          : target;
            auto r = find_real_parameter(kn, tol);
            return py::make_tuple(r.c, r.c_decimal);
        },
        py::arg("target"), py::arg("tol") = 1e-9);
    m.def(
        "meta_chebyshev",
        [](int n) {
            auto th = meta_chebyshev(n);
            py::dict d;
            d["symbols"] = th.symbols;
            d["marked"] = th.marked();
            d["epsilon"] = th.epsilon;
            d["admissible"] = th.admissible;
            return d;
        },
        py::arg("length"));
    m.def("real_kneading", &real_kneading, py::arg("c"), py::arg("length"));
    m.def(
        "modulus",
        [](const std::vector<std::complex<double>>& outer,
           const std::vector<std::complex<double>>& inner, int grid) {
            AnnulusSpec a{Polyline(outer.begin(), outer.end()),
                          Polyline(inner.begin(), inner.end())};
            return modulus(a, nullptr, grid);
        },
        py::arg("outer"), py::arg("inner"), py::arg("grid") = 160,
        "conformal modulus, round annulus 1<|z|<r measuring ln r");
    m.def(
        "capacity",
        [](const std::vector<std::complex<double>>& boundary, std::complex<double> z0,
           int grid) {
            return capacity(Polyline(boundary.begin(), boundary.end()), z0, grid).value;
        },
        py::arg("boundary"), py::arg("basepoint"), py::arg("grid") = 160);
    m.def(
        "cap0_formula",
        [](std::complex<double> c, int period) {
            return cap0_formula(make_center(c, period));
        },
        py::arg("center"), py::arg("period"));
    m.def(
        "hausdorff",
        [](const std::vector<std::complex<double>>& A,
           const std::vector<std::complex<double>>& B) {
            return hausdorff_distance(std::vector<Complex>(A.begin(), A.end()),
                                      std::vector<Complex>(B.begin(), B.end()));
        },
        py::arg("a"), py::arg("b"));
    m.def("julia_boundary", &julia_boundary, py::arg("c"), py::arg("n"),
          py::arg("seed") = 12345u);
    m.def("nest_summary", &nest_summary_py, py::arg("c"), py::arg("p"), py::arg("q"),
          py::arg("levels") = 5, py::arg("frames") = 6, py::arg("c_decimal") = "");
    m.def(
        "wake",
        [](std::uint64_t p, std::uint64_t q) {
            auto w = wake(p, q);
            py::dict d;
            d["t_minus"] = w.t_minus.str();
            d["t_plus"] = w.t_plus.str();
            d["root"] = std::complex<double>(w.root);
            return d;
        },
        py::arg("p"), py::arg("q"));
    m.attr("__version__") = "0.1.0";
}
