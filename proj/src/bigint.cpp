#include "nestlab/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace nestlab {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

BigUint::BigUint(u64 v) {
    if (v) limbs_.push_back(v);
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

int BigUint::cmp(const BigUint& a, const BigUint& b) {
    if (a.limbs_.size() != b.limbs_.size())
        return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (size_t i = a.limbs_.size(); i-- > 0;) {
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint BigUint::operator+(const BigUint& b) const {
    BigUint r;
    const auto& x = limbs_;
    const auto& y = b.limbs_;
    size_t n = std::max(x.size(), y.size());
    r.limbs_.resize(n, 0);
    u64 carry = 0;
    for (size_t i = 0; i < n; ++i) {
        u128 s = (u128)(i < x.size() ? x[i] : 0) + (i < y.size() ? y[i] : 0) + carry;
        r.limbs_[i] = (u64)s;
        carry = (u64)(s >> 64);
    }
    if (carry) r.limbs_.push_back(carry);
    return r;
}

BigUint BigUint::operator-(const BigUint& b) const {
    assert(cmp(*this, b) >= 0);
    BigUint r;
    r.limbs_.assign(limbs_.size(), 0);
    u128 borrow = 0;
    for (size_t i = 0; i < limbs_.size(); ++i) {
        u128 yi = (i < b.limbs_.size() ? b.limbs_[i] : 0);
        u128 xi = limbs_[i];
        r.limbs_[i] = (u64)(xi - yi - borrow);
        borrow = (xi < yi + borrow) ? 1 : 0;
    }
    assert(borrow == 0);
    r.trim();
    return r;
}

BigUint BigUint::operator<<(unsigned s) const {
    if (is_zero() || s == 0) {
        BigUint r = *this;
        return r;
    }
    unsigned limb_shift = s / 64, bit_shift = s % 64;
    BigUint r;
    r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
    for (size_t i = 0; i < limbs_.size(); ++i) {
        r.limbs_[i + limb_shift] |= limbs_[i] << bit_shift;
        if (bit_shift)
            r.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
    }
    r.trim();
    return r;
}

BigUint BigUint::operator>>(unsigned s) const {
    unsigned limb_shift = s / 64, bit_shift = s % 64;
    BigUint r;
    if (limb_shift >= limbs_.size()) return r;
    r.limbs_.assign(limbs_.size() - limb_shift, 0);
    for (size_t i = 0; i < r.limbs_.size(); ++i) {
        r.limbs_[i] = limbs_[i + limb_shift] >> bit_shift;
        if (bit_shift && i + limb_shift + 1 < limbs_.size())
            r.limbs_[i] |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
    }
    r.trim();
    return r;
}

BigUint BigUint::mul_small(u64 m) const {
    BigUint r;
    if (m == 0 || is_zero()) return r;
    r.limbs_.assign(limbs_.size() + 1, 0);
    u64 carry = 0;
    for (size_t i = 0; i < limbs_.size(); ++i) {
        u128 p = (u128)limbs_[i] * m + carry;
        r.limbs_[i] = (u64)p;
        carry = (u64)(p >> 64);
    }
    r.limbs_[limbs_.size()] = carry;
    r.trim();
    return r;
}

BigUint BigUint::div_small(u64 d, u64& rem) const {
    assert(d != 0);
    BigUint q;
    q.limbs_.assign(limbs_.size(), 0);
    u128 r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
        u128 cur = (r << 64) | limbs_[i];
        q.limbs_[i] = (u64)(cur / d);
        r = cur % d;
    }
    rem = (u64)r;
    q.trim();
    return q;
}

u64 BigUint::mod_small(u64 d) const {
    assert(d != 0);
    u128 r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) r = ((r << 64) | limbs_[i]) % d;
    return (u64)r;
}

unsigned BigUint::trailing_zeros() const {
    assert(!is_zero());
    unsigned tz = 0;
    size_t i = 0;
    while (limbs_[i] == 0) {
        tz += 64;
        ++i;
    }
    return tz + static_cast<unsigned>(__builtin_ctzll(limbs_[i]));
}

unsigned BigUint::bit_length() const {
    if (is_zero()) return 0;
    return static_cast<unsigned>(limbs_.size() - 1) * 64 +
           (64 - static_cast<unsigned>(__builtin_clzll(limbs_.back())));
}

double BigUint::to_double() const { return to_double_shifted(0); }

double BigUint::to_double_shifted(long shift_down) const {
    if (is_zero()) return 0.0;
    // Use the top ~96 bits.
    unsigned bl = bit_length();
    long exp = (long)bl - 96;
    BigUint top = exp > 0 ? (*this >> (unsigned)exp) : *this;
    double v = 0.0;
    for (size_t i = top.limbs_.size(); i-- > 0;)
        v = v * 18446744073709551616.0 + (double)top.limbs_[i];
    return std::ldexp(v, (int)(exp > 0 ? exp - shift_down : -shift_down));
}

std::string BigUint::to_decimal() const {
    if (is_zero()) return "0";
    BigUint t = *this;
    std::string s;
    while (!t.is_zero()) {
        u64 rem;
        t = t.div_small(1000000000000000000ull, rem);
        if (t.is_zero()) {
            s = std::to_string(rem) + s;
        } else {
            std::string part = std::to_string(rem);
            s = std::string(18 - part.size(), '0') + part + s;
        }
    }
    return s;
}

size_t BigUint::hash() const {
    size_t h = 1469598103934665603ull;
    for (u64 l : limbs_) {
        h ^= (size_t)l;
        h *= 1099511628211ull;
    }
    return h;
}

u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace nestlab
