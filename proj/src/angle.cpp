#include "nestlab/angle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nestlab {

RationalAngle::RationalAngle(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("angle denominator is zero");
    num %= den;
    std::uint64_t g = gcd_u64(num == 0 ? den : num, den);
    num /= g;
    den /= g;
    unsigned tz = den == 0 ? 0 : __builtin_ctzll(den);
    e_ = tz;
    d_ = den >> tz;
    a_ = BigUint(num);
    normalize();
}

RationalAngle RationalAngle::from_parts(BigUint num, unsigned e, std::uint64_t d_odd) {
    RationalAngle t;
    t.a_ = std::move(num);
    t.e_ = e;
    t.d_ = d_odd;
    t.normalize();
    return t;
}

void RationalAngle::normalize() {
    assert(d_ % 2 == 1);
    // reduce modulo 1
    BigUint den = BigUint(d_) << e_;
    while (BigUint::cmp(a_, den) >= 0) a_ = a_ - den;  // rarely loops more than once
    if (a_.is_zero()) {
        e_ = 0;
        d_ = 1;
        return;
    }
    // strip common powers of two
    unsigned tz = a_.trailing_zeros();
    unsigned s = std::min(tz, e_);
    if (s) {
        a_ = a_ >> s;
        e_ -= s;
    }
    // reduce odd part
    if (d_ > 1) {
        std::uint64_t g = gcd_u64(a_.mod_small(d_), d_);
        if (g > 1) {
            std::uint64_t rem;
            a_ = a_.div_small(g, rem);
            assert(rem == 0);
            d_ /= g;
        }
    }
}

RationalAngle RationalAngle::doubled() const {
    RationalAngle t;
    t.a_ = a_ << 1;
    t.e_ = e_;
    t.d_ = d_;
    t.normalize();
    return t;
}

RationalAngle RationalAngle::halved() const {
    RationalAngle t;
    t.a_ = a_;
    t.e_ = e_ + 1;
    t.d_ = d_;
    t.normalize();
    return t;
}

RationalAngle RationalAngle::half_turn() const {
    // a/(2^e d) + 1/2 = (2a + 2^e d) / 2^{e+1} d
    RationalAngle t;
    t.a_ = (a_ << 1) + (BigUint(d_) << e_);
    t.e_ = e_ + 1;
    t.d_ = d_;
    t.normalize();
    return t;
}

RationalAngle RationalAngle::conjugate() const {
    if (a_.is_zero()) return RationalAngle();
    RationalAngle t;
    t.a_ = (BigUint(d_) << e_) - a_;
    t.e_ = e_;
    t.d_ = d_;
    t.normalize();
    return t;
}

bool RationalAngle::operator==(const RationalAngle& o) const {
    return e_ == o.e_ && d_ == o.d_ && a_ == o.a_;
}

int RationalAngle::cmp(const RationalAngle& x, const RationalAngle& y) {
    // compare x.a / (2^xe xd) vs y.a / (2^ye yd):  x.a * yd * 2^ye  vs  y.a * xd * 2^xe
    BigUint lhs = x.a_.mul_small(y.d_) << y.e_;
    BigUint rhs = y.a_.mul_small(x.d_) << x.e_;
    return BigUint::cmp(lhs, rhs);
}

bool RationalAngle::in_arc(const RationalAngle& a, const RationalAngle& b) const {
    if (a == b) return false;
    if (cmp(a, b) < 0) return cmp(a, *this) < 0 && cmp(*this, b) < 0;
    return cmp(a, *this) < 0 || cmp(*this, b) < 0;  // wrapping arc
}

double RationalAngle::to_double() const {
    return a_.to_double_shifted(e_) / (double)d_;
}

std::string RationalAngle::str() const {
    return a_.to_decimal() + "/" + den().to_decimal();
}

unsigned RationalAngle::period() const {
    if (d_ == 1) return 1;  // dyadic; orbit ends at fixed angle 0
    unsigned k = 1;
    std::uint64_t pow = 2 % d_;
    while (pow != 1) {
        pow = (std::uint64_t)((unsigned __int128)pow * 2 % d_);
        ++k;
        if (k > 20000) throw std::runtime_error("angle period too large");
    }
    return k;
}

size_t RationalAngle::hash() const {
    size_t h = a_.hash();
    h ^= (size_t)e_ * 0x9e3779b97f4a7c15ull;
    h ^= (size_t)d_ * 0xc2b2ae3d27d4eb4full;
    return h;
}

bool AngleInterval::contains(const RationalAngle& t) const {
    if (t == a) return true;  // half open [a,b)
    return t.in_arc(a, b);
}

bool AngleInterval::contains_closed(const RationalAngle& t) const {
    return t == a || t == b || t.in_arc(a, b);
}

double AngleInterval::length() const {
    double la = a.to_double(), lb = b.to_double();
    double d = lb - la;
    if (d <= 0) d += 1.0;
    return d;
}

Footprint::Footprint(std::vector<AngleInterval> ivs) : ivs_(std::move(ivs)) {
    sort_and_check();
}

void Footprint::sort_and_check() {
    std::sort(ivs_.begin(), ivs_.end(), [](const AngleInterval& x, const AngleInterval& y) {
        return RationalAngle::cmp(x.a, y.a) < 0;
    });
    ivs_.erase(std::unique(ivs_.begin(), ivs_.end(),
                           [](const AngleInterval& x, const AngleInterval& y) {
                               return x.a == y.a && x.b == y.b;
                           }),
               ivs_.end());
    // merge intervals sharing an endpoint exactly
    bool merged = true;
    while (merged && ivs_.size() > 1) {
        merged = false;
        for (size_t i = 0; i < ivs_.size(); ++i) {
            size_t j = (i + 1) % ivs_.size();
            if (ivs_[i].b == ivs_[j].a) {
                ivs_[i].b = ivs_[j].b;
                ivs_.erase(ivs_.begin() + j);
                merged = true;
                break;
            }
        }
    }
}

bool Footprint::operator==(const Footprint& o) const {
    if (ivs_.size() != o.ivs_.size()) return false;
    for (size_t i = 0; i < ivs_.size(); ++i)
        if (!(ivs_[i].a == o.ivs_[i].a && ivs_[i].b == o.ivs_[i].b)) return false;
    return true;
}

bool Footprint::contains_angle(const RationalAngle& t) const {
    for (const auto& iv : ivs_)
        if (iv.contains(t)) return true;
    return false;
}

bool Footprint::contains_angle_closed(const RationalAngle& t) const {
    for (const auto& iv : ivs_)
        if (iv.contains_closed(t)) return true;
    return false;
}

bool Footprint::subset_of(const Footprint& o) const {
    // each interval of *this must sit inside a single interval of o
    for (const auto& iv : ivs_) {
        bool ok = false;
        for (const auto& jv : o.ivs_) {
            if (!jv.contains_closed(iv.a) || !jv.contains_closed(iv.b)) continue;
            // reject wrap-around: iv may not hold jv's endpoint strictly inside
            if (jv.b.in_arc(iv.a, iv.b)) continue;
            ok = true;
            break;
        }
        if (!ok) return false;
    }
    return true;
}

bool Footprint::disjoint_from(const Footprint& o) const {
    for (const auto& iv : ivs_)
        for (const auto& jv : o.ivs_) {
            if (iv.contains(jv.a) || jv.contains(iv.a)) return false;
        }
    return true;
}

AngleInterval halve_interval(const AngleInterval& iv) {
    // ccw interval (a,b); when it wraps past angle 0 the halved copy ends at
    // b/2 + 1/2 rather than b/2
    RationalAngle a2 = iv.a.halved();
    RationalAngle b2 = iv.b.halved();
    if (RationalAngle::cmp(iv.b, iv.a) <= 0) b2 = b2.half_turn();
    return AngleInterval{a2, b2};
}

Footprint Footprint::preimage() const {
    std::vector<AngleInterval> out;
    out.reserve(ivs_.size() * 2);
    for (const auto& iv : ivs_) {
        AngleInterval lo = halve_interval(iv);
        out.push_back(lo);
        out.push_back(AngleInterval{lo.a.half_turn(), lo.b.half_turn()});
    }
    return Footprint(std::move(out));
}

Footprint Footprint::image() const {
    std::vector<AngleInterval> out;
    out.reserve(ivs_.size());
    for (const auto& iv : ivs_) out.push_back(AngleInterval{iv.a.doubled(), iv.b.doubled()});
    return Footprint(std::move(out));
}

Footprint Footprint::half_turned() const {
    std::vector<AngleInterval> out;
    out.reserve(ivs_.size());
    for (const auto& iv : ivs_)
        out.push_back(AngleInterval{iv.a.half_turn(), iv.b.half_turn()});
    return Footprint(std::move(out));
}

bool Footprint::is_symmetric() const { return *this == half_turned(); }

double Footprint::measure() const {
    double m = 0;
    for (const auto& iv : ivs_) m += iv.length();
    return m;
}

std::vector<RationalAngle> Footprint::endpoints() const {
    std::vector<RationalAngle> out;
    for (const auto& iv : ivs_) {
        out.push_back(iv.a);
        out.push_back(iv.b);
    }
    return out;
}

size_t Footprint::hash() const {
    size_t h = 14695981039346656037ull;
    for (const auto& iv : ivs_) {
        h ^= iv.a.hash();
        h *= 1099511628211ull;
        h ^= iv.b.hash();
        h *= 1099511628211ull;
    }
    return h;
}

std::string Footprint::str() const {
    std::string s;
    for (const auto& iv : ivs_) {
        if (!s.empty()) s += " ";
        s += "(" + iv.a.str() + "," + iv.b.str() + ")";
    }
    return s;
}

std::vector<RationalAngle> rotation_cycle(std::uint64_t p, std::uint64_t q) {
    if (q < 2 || p == 0 || p >= q || gcd_u64(p, q) != 1)
        throw std::invalid_argument("rotation number must be p/q in lowest terms, 0<p/q<1");
    if (q > 60) throw std::invalid_argument("rotation cycle denominator too large");
    // Sturmian word b_i = floor((i+1)p/q) - floor(ip/q); theta = 0.b1b2.. repeating
    std::uint64_t num = 0;
    for (std::uint64_t i = 0; i < q; ++i) {
        std::uint64_t b = (i + 1) * p / q - i * p / q;
        num = (num << 1) | b;
    }
    std::uint64_t den = (q >= 64) ? 0 : ((1ull << q) - 1);
    RationalAngle t(num, den);
    std::vector<RationalAngle> cyc;
    for (std::uint64_t i = 0; i < q; ++i) {
        cyc.push_back(t);
        t = t.doubled();
    }
    std::sort(cyc.begin(), cyc.end());
    return cyc;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> cycle_rotation_number(
    std::vector<RationalAngle> cyc) {
    std::sort(cyc.begin(), cyc.end());
    size_t q = cyc.size();
    if (q == 0) return std::nullopt;
    // position of the double of cyc[0]
    auto pos_of = [&](const RationalAngle& t) -> std::optional<size_t> {
        for (size_t i = 0; i < q; ++i)
            if (cyc[i] == t) return i;
        return std::nullopt;
    };
    std::optional<size_t> p0 = pos_of(cyc[0].doubled());
    if (!p0) return std::nullopt;
    size_t shift = *p0;  // doubling must act as i -> i + shift (mod q)
    for (size_t i = 0; i < q; ++i) {
        auto pi = pos_of(cyc[i].doubled());
        if (!pi || *pi != (i + shift) % q) return std::nullopt;
    }
    if (shift == 0) return std::nullopt;
    if (gcd_u64(shift, q) != 1) return std::nullopt;
    return std::make_pair((std::uint64_t)shift, (std::uint64_t)q);
}

}  // namespace nestlab
