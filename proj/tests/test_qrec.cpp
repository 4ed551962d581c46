#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nestlab/qrec.hpp"

using namespace nestlab;

TEST_CASE("centers") {
    auto basilica = make_center(Complex(-1, 0), 2);
    CHECK(std::abs(basilica.c - Complex(-1, 0)) < 1e-14);
    CHECK(basilica.q == 2);
    auto airplane = make_center(Complex(-1.75487, 0), 3);
    CHECK(airplane.c.real() == doctest::Approx(-1.7548776662466927).epsilon(1e-12));
    CHECK(airplane.q == 2);
    auto rabbit = make_center(Complex(-0.12256, 0.74486), 3);
    CHECK(rabbit.c.real() == doctest::Approx(-0.122561166876654).epsilon(1e-9));
    CHECK(rabbit.c.imag() == doctest::Approx(0.744861766619744).epsilon(1e-9));
    CHECK(rabbit.q == 3);
    // non-minimal period rejected
    CHECK_THROWS_AS(make_center(Complex(-1, 0), 4), Error);
}

TEST_CASE("q label sequences") {
    // z^2 - 1: sequence begins (2; Z1, ...)
    auto bas = make_center(Complex(-1, 0), 2);
    QLabelData qb = q_label_sequence(bas, 4);
    CHECK(qb.seq.q == 2);
    CHECK(qb.seq.sigmas[0].str() == "Z1");
    // sigma_0 = Z_p for the rabbit (p = 1)
    auto rab = make_center(Complex(-0.12256, 0.74486), 3);
    QLabelData qr = q_label_sequence(rab, 3);
    CHECK(qr.seq.sigmas[0].str() == "Z1");
    // the critical value vertex label starts with 'L' at every depth >= 1
    for (size_t d = 1; d < qb.labels.size(); ++d)
        CHECK(qb.labels[d][qb.puzzle.cv_index[d]].symbols[0] == kSymL);
    // airplane isolates its critical orbit at a finite depth
    auto air = make_center(Complex(-1.75487, 0), 3);
    QLabelData qa = q_label_sequence(air, 6);
    CHECK(qa.isolation_depth >= 0);
    CHECK(qa.isolation_depth <= 4);
    // chebyshev-like: z^2 - 2 puzzle labels give the meta-Chebyshev prefix
    // (2; Z1, LZ0, LRZ0, LRRZ0, ...) modulo orientation flips
    HyperbolicCenter cheb;  // not a center; build labels directly
    cheb.c = Complex(-2, 0);
    cheb.period = 0;
    cheb.p = 1;
    cheb.q = 2;
    cheb.cycle = {Complex(0, 0), Complex(-2, 0), Complex(2, 0)};
    QLabelData qc = q_label_sequence(cheb, 5);
    CHECK(qc.seq.sigmas[0].str() == "Z1");
    for (size_t d = 1; d < qc.seq.sigmas.size(); ++d) {
        std::string want = "L";
        for (size_t j = 1; j < d; ++j) want += "R";
        want += "Z0";
        // modulo head flip
        std::string got = qc.seq.sigmas[d].str();
        std::string flip = qc.seq.sigmas[d].flipped_head().str();
        bool match = got == want || flip == want;
        CHECK_MESSAGE(match, "depth ", d, ": got ", got, " want ", want);
    }
}

TEST_CASE("meta-chebyshev sequence matches the printed prefix") {
    KneadingSequence th = meta_chebyshev(20);
    CHECK(th.symbols == "LRRLLLRLLLLRRLRLRLLL");
    // printed: L R! R! L L! L R L L L! L R R L R L R L L L!
    CHECK(th.marked() == "LR!R!LL!LRLLL!LRRLRLRLLL!");
    CHECK(th.epsilon.substr(0, 5) == "---+-");
    CHECK(th.admissible);

    KneadingSequence big = meta_chebyshev(10000);
    CHECK(big.admissible);
    CHECK(big.max_plus_run <= 3);
    // every check sits on an 'L' whose epsilon is '-'
    for (size_t i = 0; i < big.symbols.size(); ++i)
        if (big.checked[i]) CHECK(big.epsilon[i] == '-');
}

TEST_CASE("real kneading and bisection") {
    // orbit of z^2 - 2: 0, -2, 2, 2, ... -> kneading L R R R ...
    CHECK(real_kneading(-2.0, 6) == "LRRRRR");
    auto r2 = find_real_parameter("LRRRRRRRRRRRRRRRRRRRRRRRRRRRRRRR", 1e-10);
    CHECK(r2.c == doctest::Approx(-2.0).epsilon(1e-10));

    // Fibonacci parameter
    std::string fib = fibonacci_kneading(300);
    CHECK(fib.substr(0, 13) == "LRRLLLRLLRRLR");
    auto rf = find_real_parameter(fib, 1e-10);
    CHECK(rf.c == doctest::Approx(-1.8705286321).epsilon(1e-9));
    CHECK(rf.c_decimal.substr(0, 13) == "-1.8705286321");

    // meta-Chebyshev parameter: agrees with the printed value to ~8 digits
    // (the printed decimal stops following the printed Theta at symbol 37,
    // so beyond that the sequence itself is the ground truth)
    KneadingSequence th = meta_chebyshev(300);
    auto rm = find_real_parameter(th.symbols, 1e-12);
    CHECK(rm.c == doctest::Approx(-1.87450961730020085).epsilon(1e-8));
    CHECK(real_kneading(rm.c, 75) == th.symbols.substr(0, 75));

    CHECK_THROWS_AS(find_real_parameter(fib, 1e-10, -0.9, -0.5), Error);
}

TEST_CASE("fibonacci nest is (z^2-1)-recurrent; negative control vs airplane") {
    auto rf = find_real_parameter(fibonacci_kneading(300), 1e-12);
    NestOptions opt;
    opt.max_level = 6;
    opt.max_frame_level = 7;
    opt.c_decimal = rf.c_decimal;
    NestSummary nest = build_nest(ComplexParam(Complex(rf.c, 0)), 1, 2, opt);

    auto fc = fibonacci_check(nest);
    for (auto& d : fc.detail) MESSAGE(d);
    CHECK(fc.is_fibonacci);

    auto bas = make_center(Complex(-1, 0), 2);
    QRecurrenceReport rep = is_q_recurrent(nest, bas, 6);
    CHECK(rep.recurrent(3));
    for (bool b : rep.sigma_ok) CHECK(b);
    for (bool b : rep.composition_ok) CHECK(b);
    for (int pc : rep.pieces_per_level) CHECK(pc == 2);
    // itineraries follow the criss-cross pattern
    for (size_t i = 1; i < rep.itinerary_ok.size(); ++i) CHECK(rep.itinerary_ok[i]);

    // negative control: against the airplane the label sequence must break
    auto air = make_center(Complex(-1.75487, 0), 3);
    QRecurrenceReport rep2 = is_q_recurrent(nest, air, 6);
    REQUIRE(rep2.first_violation.has_value());
}

TEST_CASE("steering the real symmetric choice reproduces c_fib") {
    auto bas = make_center(Complex(-1, 0), 2);
    SteerResult sr = steer_complex_parameter(bas, {}, 4);
    CHECK(sr.center.real() == doctest::Approx(-1.8705286321).epsilon(1e-4));
    CHECK(std::abs(sr.center.imag()) < 1e-8);
    CHECK(sr.levels_done >= 3);
    CHECK(sr.diameter < 0.1);
}
