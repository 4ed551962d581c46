#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nestlab/dynamics.hpp"

using namespace nestlab;

TEST_CASE("critical orbits") {
    auto o = critical_orbit(ComplexParam(Complex(0, 0)), 3);
    REQUIRE(o.points.size() == 4);
    for (auto& z : o.points) CHECK(std::abs(z) == 0.0);
    CHECK_FALSE(o.escaped);

    auto p2 = critical_orbit(ComplexParam(Complex(-1, 0)), 4);
    CHECK(p2.points[1] == Complex(-1, 0));
    CHECK(p2.points[2] == Complex(0, 0));
    CHECK(p2.points[3] == Complex(-1, 0));
    CHECK(p2.points[4] == Complex(0, 0));
    CHECK_FALSE(p2.escaped);

    // c = 1 escapes: 0,1,2,5,26,...  beyond 1e8 after a few more steps
    auto e = critical_orbit(ComplexParam(Complex(1, 0)), 12);
    CHECK(e.escaped);
    CHECK(e.escape_index >= 4);

    // recurrence invariant up to round-off
    auto fib = critical_orbit(ComplexParam(Complex(-1.8705286321, 0)), 30);
    for (size_t j = 0; j + 1 < fib.points.size(); ++j) {
        Complex expect = fib.points[j] * fib.points[j] + Complex(-1.8705286321, 0);
        CHECK(std::abs(fib.points[j + 1] - expect) < 1e-12);
    }
}

TEST_CASE("fixed points") {
    auto f0 = fixed_points(ComplexParam(Complex(0, 0)));
    CHECK(std::abs(f0.beta - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(f0.alpha) < 1e-12);

    auto f1 = fixed_points(ComplexParam(Complex(-1, 0)));
    CHECK(f1.beta.real() == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-10));
    CHECK(f1.alpha.real() == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-10));
    REQUIRE(f1.rotation.has_value());
    CHECK(f1.rotation->first == 1);
    CHECK(f1.rotation->second == 2);

    auto f2 = fixed_points(ComplexParam(Complex(-2, 0)));
    CHECK(std::abs(f2.beta - Complex(2, 0)) < 1e-12);
    CHECK(std::abs(f2.alpha - Complex(-1, 0)) < 1e-12);

    CHECK_THROWS_AS(fixed_points(ComplexParam(Complex(0.25, 0))), Error);

    // rabbit limb: rotation number 1/3
    auto fr = fixed_points(ComplexParam(Complex(-0.122561166876654, 0.744861766619744)));
    REQUIRE(fr.rotation.has_value());
    CHECK(fr.rotation->first == 1);
    CHECK(fr.rotation->second == 3);
}

TEST_CASE("ray tracing basics") {
    // c=0, angle 0: the positive real axis, landing at 1
    RayTrace r = trace_ray(ComplexParam(Complex(0, 0)), RationalAngle(0, 1));
    REQUIRE(r.landing.has_value());
    CHECK(std::abs(*r.landing - Complex(1, 0)) < 1e-9);
    for (auto& z : r.samples) {
        CHECK(std::abs(z.imag()) < 1e-9);
        CHECK(z.real() > 0.99);
    }
    // potentials strictly decreasing
    for (size_t i = 1; i < r.potentials.size(); ++i)
        CHECK(r.potentials[i] < r.potentials[i - 1]);

    // c=-2: angle 1/2 along the negative real axis, lands at -2
    RayTrace rh = trace_ray(ComplexParam(Complex(-2, 0)), RationalAngle(1, 2));
    REQUIRE(rh.landing.has_value());
    CHECK(std::abs(*rh.landing - Complex(-2, 0)) < 1e-8);
    for (auto& z : rh.samples) CHECK(std::abs(z.imag()) < 1e-9 * (1 + std::abs(z)));

    // c=-1: ray 1/3 lands at alpha
    RayTrace ra = trace_ray(ComplexParam(Complex(-1, 0)), RationalAngle(1, 3));
    REQUIRE(ra.landing.has_value());
    auto fp = fixed_points(ComplexParam(Complex(-1, 0)));
    CHECK(std::abs(*ra.landing - fp.alpha) < 1e-9);
}

TEST_CASE("ray invariants") {
    ComplexParam c(Complex(-0.3, 0.5));
    // functoriality: f maps the trace of r_theta onto the trace of r_{2theta},
    // matched by potential reparametrization
    RayTrace r1 = trace_ray(c, RationalAngle(1, 6), {1e-6, false});
    RayTrace r2 = trace_ray(c, RationalAngle(1, 3), {1e-6, false});
    int checked = 0;
    for (size_t i = 0; i < r1.samples.size(); ++i) {
        double tp = 2 * r1.potentials[i];
        if (tp > kTopPotential || tp < 2e-6) continue;
        Complex img = r1.samples[i] * r1.samples[i] + c.c;
        Complex expect = r2.at_potential(tp);
        // expected sample is the nearest recorded potential; compare loosely
        if (std::abs(tp - [&] {
                double best = 1e99, bt = 0;
                for (double q : r2.potentials)
                    if (std::abs(q - tp) < best) best = std::abs(q - tp), bt = q;
                return bt;
            }()) < 1e-9) {
            CHECK(std::abs(img - expect) < 1e-9 * (1 + std::abs(img)));
            ++checked;
        }
    }
    CHECK(checked > 10);

    // landing consistency: landing fixed by f^{binary period}
    RayTrace r = trace_ray(c, RationalAngle(1, 7));
    REQUIRE(r.landing.has_value());
    Complex z = *r.landing;
    for (int j = 0; j < 3; ++j) z = z * z + c.c;
    CHECK(std::abs(z - *r.landing) < 1e-9);

    // symmetry: for real c the trace of r_theta conjugates to r_{1-theta}
    ComplexParam cr(Complex(-1.3, 0));
    RayTrace rp = trace_ray(cr, RationalAngle(1, 5), {1e-7, false});
    RayTrace rm = trace_ray(cr, RationalAngle(4, 5), {1e-7, false});
    REQUIRE(rp.samples.size() == rm.samples.size());
    for (size_t i = 0; i < rp.samples.size(); ++i)
        CHECK(std::abs(std::conj(rp.samples[i]) - rm.samples[i]) <
              1e-9 * (1 + std::abs(rp.samples[i])));
}

TEST_CASE("equipotentials") {
    // c=0: circle of radius 2
    Polyline e = equipotential(ComplexParam(Complex(0, 0)), 2.0, 64);
    for (auto& z : e) CHECK(std::abs(std::abs(z) - 2.0) < 1e-10);

    // c=0: e_4 is the image of e_2 under z^2
    Polyline e4 = equipotential(ComplexParam(Complex(0, 0)), 4.0, 64);
    for (size_t i = 0; i < e.size(); ++i) {
        // angle doubling maps sample i of e_2 to sample 2i mod 64 of e_4
        Complex img = e[i] * e[i];
        CHECK(std::abs(img - e4[(2 * i) % 64]) < 1e-9);
    }

    // c=-1: f maps the potential-ln2 curve onto potential ln4 within tolerance
    ComplexParam cm1(Complex(-1, 0));
    Polyline c2 = equipotential(cm1, 2.0, 48);
    for (auto& z : c2) {
        Complex img = z * z + cm1.c;
        CHECK(green_potential(cm1.c, img) == doctest::Approx(std::log(4.0)).epsilon(1e-6));
    }
}

TEST_CASE("julia sampling") {
    auto pts = julia_boundary(Complex(-1, 0), 5000);
    CHECK(pts.size() == 5000);
    // all samples lie on the Julia set: bounded orbit and near-zero potential
    int ok = 0;
    for (auto& z : pts)
        if (green_potential(Complex(-1, 0), z, 256) < 1e-3) ++ok;
    CHECK(ok > 4900);
    // basilica symmetric through 0: sampled set close to its reflection
    std::vector<Complex> refl;
    for (auto& z : pts) refl.push_back(-z);
    CHECK(hausdorff_distance(pts, refl) < 0.05);
}
