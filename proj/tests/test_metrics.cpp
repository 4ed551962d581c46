#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nestlab/metrics.hpp"

using namespace nestlab;

namespace {
Polyline circle(Complex c, double r, int n = 512) {
    Polyline p(n);
    for (int i = 0; i < n; ++i) p[i] = c + std::polar(r, 2 * M_PI * i / n);
    return p;
}
}  // namespace

TEST_CASE("kappa: exact m=2, oracle m=3, monotone to 3/2") {
    CHECK(kappa(2) == 1.0);
    // independent oracle: bisection on 2z^3 - z^2 - z - 1
    auto q3 = [](double z) { return 2 * z * z * z - z * z - z - 1; };
    double lo = 1.0, hi = 1.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (q3(mid) < 0 ? lo : hi) = mid;
    }
    double oracle = 0.5 * (lo + hi);
    CHECK(std::abs(kappa(3) - oracle) < 1e-12);
    double prev = 1.0;
    for (int m = 3; m <= 50; ++m) {
        double k = kappa(m);
        CHECK(k > prev);
        CHECK(k < 1.5);
        // p(kappa) = 0 to 1e-12 relative to the term scale
        double zm = std::pow(k, m), tail = (zm - 1) / (k - 1);
        CHECK(std::abs(zm - 0.5 * tail) < 1e-12 * (1 + zm));
        prev = k;
    }
    CHECK(kappa(50) > 1.49);
}

TEST_CASE("recursion law") {
    auto g2 = simulate_recursion(2, M_LN2, 300);
    CHECK(std::abs(g2.values[300] / 300 - M_LN2 / 3) < 0.01);
    // |x_n/n - ln2/3| decreasing past n = 50
    double p50 = std::abs(g2.values[50] / 50 - M_LN2 / 3);
    double p150 = std::abs(g2.values[150] / 150 - M_LN2 / 3);
    double p300 = std::abs(g2.values[300] / 300 - M_LN2 / 3);
    CHECK(p150 < p50);
    CHECK(p300 < p150);

    auto g3 = simulate_recursion(3, 0.7, 200);
    CHECK(std::abs(g3.per_level_ratio.back() - kappa(3)) < 1e-6);
    // eps = 0 with m = 2: x_n/n -> 0
    auto g0 = simulate_recursion(2, 0.0, 300);
    CHECK(std::abs(g0.values[300] / 300) < 0.01);
}

TEST_CASE("modulus invariants: similarity invariance, monotonicity, grotzsch") {
    AnnulusSpec a{circle(0, 2.0), circle(0, 0.5)};
    double base = modulus(a, nullptr, 128);
    CHECK(base == doctest::Approx(std::log(4.0)).epsilon(1e-3));
    // translate, scale, rotate
    Complex shift(0.3, -0.8);
    Complex rot = std::polar(2.7, 0.9);
    AnnulusSpec b;
    for (auto* src : {&a.outer, &a.inner}) {
        Polyline t;
        for (auto& z : *src) t.push_back(rot * z + shift);
        (src == &a.outer ? b.outer : b.inner) = t;
    }
    CHECK(std::abs(modulus(b, nullptr, 128) - base) < 1e-3);
    // monotonicity: smaller annulus inside a bigger one
    AnnulusSpec big{circle(0, 3.0), circle(0, 0.4)};
    CHECK(modulus(big, nullptr, 128) > base);
    // degenerate annulus rejected
    AnnulusSpec bad{circle(0, 1.0), circle(Complex(0.8, 0), 0.5)};
    CHECK_THROWS_AS(modulus(bad, nullptr, 64), Error);

    // grotzsch with concentric circles: deficit 0
    GrotzschResult g = grotzsch_check(circle(0, 0.25), circle(0, 1.0), circle(0, 1.0),
                                      circle(0, 4.0), 128);
    CHECK(std::abs(g.deficit) < 1e-3);
    // non-circular K: strict positive deficit (thin rectangle around a segment)
    Polyline rect;
    for (int i = 0; i <= 64; ++i) rect.push_back(Complex(-1 + 2.0 * i / 64, -0.08));
    for (int i = 0; i <= 8; ++i) rect.push_back(Complex(1, -0.08 + 0.16 * i / 8));
    for (int i = 0; i <= 64; ++i) rect.push_back(Complex(1 - 2.0 * i / 64, 0.08));
    for (int i = 0; i <= 8; ++i) rect.push_back(Complex(-1, 0.08 - 0.16 * i / 8));
    GrotzschResult g2 =
        grotzsch_check(circle(0, 0.02), rect, rect, circle(0, 8.0), 160);
    CHECK(g2.deficit > 0.05);
    CHECK(g2.deficit > -1e-3);
}

TEST_CASE("capacity: scaling law and the basilica central component") {
    auto c1 = capacity(circle(0, 1.0), Complex(0, 0), 128);
    CHECK(std::abs(c1.value) < 1e-6);
    auto cr = capacity(circle(Complex(0.4, 0.2), 1.7), Complex(0.4, 0.2), 128);
    CHECK(cr.value == doctest::Approx(std::log(1.7)).epsilon(1e-6));
    // cap(lambda U) = cap(U) + ln|lambda|
    Polyline blob;
    for (int i = 0; i < 256; ++i) {
        double th = 2 * M_PI * i / 256;
        double r = 1.0 + 0.3 * std::cos(3 * th);
        blob.push_back(std::polar(r, th));
    }
    auto cb = capacity(blob, Complex(0, 0), 160);
    Polyline blob2;
    for (auto& z : blob) blob2.push_back(2.5 * z);
    auto cb2 = capacity(blob2, Complex(0, 0), 160);
    CHECK(cb2.value - cb.value == doctest::Approx(std::log(2.5)).epsilon(1e-4));

    // basilica: numerical capacity of the central Fatou component vs the
    // closed formula -ln 2
    auto bas = make_center(Complex(-1, 0), 2);
    CHECK(cap0_formula(bas) == doctest::Approx(-M_LN2).epsilon(1e-12));
    Polyline u0 = superattracting_component_boundary(bas, 2048);
    auto cap_u0 = capacity(u0, Complex(0, 0), 192);
    CHECK(std::abs(cap_u0.value - (-M_LN2)) < 1e-3);
    // cap_inf(K) = 0 for connected K
    CHECK(std::abs(cap_inf_estimate(Complex(-1, 0))) < 1e-4);

    // airplane formula value (evaluated from the exact center)
    auto air = make_center(Complex(-1.75487, 0), 3);
    double v = cap0_formula(air);
    CHECK(v == doctest::Approx(-2.2299).epsilon(2e-4));

    CHECK_THROWS_AS(capacity(circle(0, 1.0), Complex(2, 0), 64), Error);
}

TEST_CASE("koebe distortion") {
    // identity and affine: distortion 1
    std::vector<Complex> pts, img;
    double h = 0.1;
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) pts.push_back(Complex(a * h, b * h));
    img = pts;
    auto k1 = koebe_check(pts, img, h, 2.0);
    CHECK(k1.distortion == doctest::Approx(1.0));
    CHECK(k1.bound_ok);
    for (auto& z : img) z = Complex(1.5, -2.0) * z + Complex(0.1, 0.2);
    auto k2 = koebe_check(pts, img, h, 2.0);
    CHECK(k2.distortion == doctest::Approx(1.0).epsilon(1e-9));
    // phi(z) = z + 0.01 z^2 into a large disk: distortion near 1
    img.clear();
    for (auto& z : pts) img.push_back(z + 0.01 * z * z);
    auto k3 = koebe_check(pts, img, h, std::log(100.0));
    CHECK(k3.distortion < 1.02);
    CHECK(k3.bound_ok);
    // non-injective rejected
    img.assign(pts.size(), Complex(0, 0));
    CHECK_THROWS_AS(koebe_check(pts, img, h, 1.0), Error);
}

TEST_CASE("hausdorff basics") {
    std::vector<Complex> A = circle(0, 1.0, 256);
    CHECK(hausdorff_distance(A, A) == 0.0);
    std::vector<Complex> B = circle(0, 2.0, 256);
    CHECK(hausdorff_distance(A, B) == doctest::Approx(1.0).epsilon(1e-3));
    // sampled basilica vs its reflection through 0
    auto K = julia_boundary(Complex(-1, 0), 20000);
    std::vector<Complex> R;
    for (auto& z : K) R.push_back(-z);
    CHECK(hausdorff_distance(K, R) < 0.05);
}
