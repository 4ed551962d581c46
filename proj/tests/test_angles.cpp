#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "nestlab/angle.hpp"
#include "nestlab/bigint.hpp"

using namespace nestlab;

TEST_CASE("biguint basics") {
    BigUint a(0xffffffffffffffffull);
    BigUint b = a + BigUint(1);
    CHECK(b.bit_length() == 65);
    CHECK((b - a).low64() == 1);
    CHECK((b >> 64).low64() == 1);
    CHECK((BigUint(5) << 130).trailing_zeros() == 130);
    std::uint64_t rem;
    BigUint q = (BigUint(1) << 100).div_small(7, rem);
    CHECK(q.mul_small(7) + BigUint(rem) == (BigUint(1) << 100));
    CHECK((BigUint(1) << 100).mod_small(7) == rem);
    CHECK(BigUint(1234567890123456789ull).to_decimal() == "1234567890123456789");
    CHECK(BigUint(10).to_double() == doctest::Approx(10.0));
    CHECK((BigUint(3) << 200).to_double_shifted(200) == doctest::Approx(3.0));
}

TEST_CASE("rational angle arithmetic is exact") {
    RationalAngle t(1, 3);
    CHECK(t.doubled() == RationalAngle(2, 3));
    CHECK(t.doubled().doubled() == t);  // 4/3 = 1/3 mod 1
    CHECK(t.halved() == RationalAngle(1, 6));
    CHECK(t.halved().half_turn() == RationalAngle(2, 3));
    CHECK(t.half_turn() == RationalAngle(5, 6));
    CHECK(t.conjugate() == RationalAngle(2, 3));
    CHECK(RationalAngle(0, 1).half_turn() == RationalAngle(1, 2));
    CHECK(RationalAngle(1, 2).doubled() == RationalAngle(0, 1));
    CHECK(RationalAngle(3, 6) == RationalAngle(1, 2));
    CHECK(RationalAngle(1, 7).period() == 3);
    CHECK(RationalAngle(1, 7).preperiod() == 0);
    CHECK(RationalAngle(1, 6).preperiod() == 1);
    CHECK(RationalAngle(1, 6).period() == 2);

    // deep halving keeps exactness: halve 200 times then double 200 times
    RationalAngle d(5, 31);
    RationalAngle deep = d;
    for (int i = 0; i < 200; ++i) deep = deep.halved();
    RationalAngle back = deep;
    for (int i = 0; i < 200; ++i) back = back.doubled();
    CHECK(back == d);
    CHECK(deep.to_double() == doctest::Approx((5.0 / 31.0) / std::pow(2.0, 200)));
}

TEST_CASE("arc membership") {
    RationalAngle a(1, 8), b(3, 8);
    CHECK(RationalAngle(1, 4).in_arc(a, b));
    CHECK_FALSE(RationalAngle(1, 2).in_arc(a, b));
    // wrapping arc (3/4, 1/4)
    CHECK(RationalAngle(0, 1).in_arc(RationalAngle(3, 4), RationalAngle(1, 4)));
    CHECK(RationalAngle(7, 8).in_arc(RationalAngle(3, 4), RationalAngle(1, 4)));
    CHECK_FALSE(RationalAngle(1, 2).in_arc(RationalAngle(3, 4), RationalAngle(1, 4)));
}

TEST_CASE("footprint operations") {
    Footprint f({AngleInterval{RationalAngle(1, 3), RationalAngle(2, 3)}});
    Footprint pre = f.preimage();
    REQUIRE(pre.size() == 2);
    CHECK(pre.contains_angle(RationalAngle(1, 4)));
    CHECK(pre.contains_angle(RationalAngle(3, 4)));
    CHECK_FALSE(pre.contains_angle(RationalAngle(1, 2)));
    CHECK(pre.is_symmetric());
    CHECK(pre.measure() == doctest::Approx(1.0 / 3));
    CHECK(pre.image() == f);

    Footprint small({AngleInterval{RationalAngle(5, 24), RationalAngle(7, 24)}});
    CHECK(small.subset_of(pre));
    CHECK_FALSE(pre.subset_of(small));
    Footprint other({AngleInterval{RationalAngle(3, 8), RationalAngle(5, 8)}});
    CHECK(other.disjoint_from(pre));

    // wrap-around containment guard
    Footprint big({AngleInterval{RationalAngle(7, 24), RationalAngle(5, 24)}});  // long arc
    CHECK_FALSE(big.subset_of(pre));
}

TEST_CASE("rotation cycles match brute force enumeration for q <= 12") {
    // oracle: enumerate all period-q orbits of doubling on angles k/(2^q-1),
    // keep those whose circular order realizes a rotation, indexed by p/q
    for (std::uint64_t q = 2; q <= 12; ++q) {
        std::uint64_t den = (1ull << q) - 1;
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::set<std::string>> found;
        std::set<std::uint64_t> seen;
        for (std::uint64_t k = 1; k < den; ++k) {
            if (seen.count(k)) continue;
            std::vector<RationalAngle> orbit;
            std::uint64_t j = k;
            do {
                seen.insert(j);
                orbit.push_back(RationalAngle(j, den));
                j = (2 * j) % den;
            } while (j != k);
            if (orbit.size() != q) continue;
            auto rot = cycle_rotation_number(orbit);
            if (!rot) continue;
            std::set<std::string> angles;
            for (auto& t : orbit) angles.insert(t.str());
            found[*rot] = angles;
        }
        for (std::uint64_t p = 1; p < q; ++p) {
            if (gcd_u64(p, q) != 1) continue;
            auto cyc = rotation_cycle(p, q);
            REQUIRE(cyc.size() == q);
            std::set<std::string> angles;
            for (auto& t : cyc) angles.insert(t.str());
            REQUIRE_MESSAGE(found.count({p, q}) == 1, "missing oracle cycle for p/q");
            CHECK(found[{p, q}] == angles);
            // doubling closure
            for (auto& t : cyc) {
                bool in = false;
                for (auto& s : cyc)
                    if (s == t.doubled()) in = true;
                CHECK(in);
            }
        }
    }
}

TEST_CASE("specific rotation cycles") {
    auto c12 = rotation_cycle(1, 2);
    CHECK(c12[0] == RationalAngle(1, 3));
    CHECK(c12[1] == RationalAngle(2, 3));
    auto c13 = rotation_cycle(1, 3);
    CHECK(c13[0] == RationalAngle(1, 7));
    CHECK(c13[1] == RationalAngle(2, 7));
    CHECK(c13[2] == RationalAngle(4, 7));
    auto c25 = rotation_cycle(2, 5);
    CHECK(c25[0] == RationalAngle(5, 31));
    CHECK(c25[1] == RationalAngle(9, 31));
    CHECK(c25[2] == RationalAngle(10, 31));
    CHECK(c25[3] == RationalAngle(18, 31));
    CHECK(c25[4] == RationalAngle(20, 31));
}
