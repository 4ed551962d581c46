#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nestlab {

// Arbitrary-precision unsigned integer, little-endian 64-bit limbs.
// Only the operations needed for exact angle arithmetic are provided;
// in particular there is no general long division (denominators are
// always of the form 2^e * d with d a machine word).
class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v);

    bool is_zero() const { return limbs_.empty(); }
    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1u); }

    static int cmp(const BigUint& a, const BigUint& b);
    bool operator==(const BigUint& b) const { return cmp(*this, b) == 0; }
    bool operator!=(const BigUint& b) const { return cmp(*this, b) != 0; }
    bool operator<(const BigUint& b) const { return cmp(*this, b) < 0; }
    bool operator<=(const BigUint& b) const { return cmp(*this, b) <= 0; }

    BigUint operator+(const BigUint& b) const;
    BigUint operator-(const BigUint& b) const;  // requires *this >= b
    BigUint operator<<(unsigned s) const;
    BigUint operator>>(unsigned s) const;

    BigUint mul_small(std::uint64_t m) const;
    // Divides by a machine word; returns quotient, sets rem.
    BigUint div_small(std::uint64_t d, std::uint64_t& rem) const;
    std::uint64_t mod_small(std::uint64_t d) const;

    unsigned trailing_zeros() const;  // undefined for zero
    unsigned bit_length() const;

    // Value as double (may overflow to inf for huge values).
    double to_double() const;
    // Value / 2^shift as double, computed without materializing the shift.
    double to_double_shifted(long shift_down) const;

    std::uint64_t low64() const { return limbs_.empty() ? 0 : limbs_[0]; }
    bool fits_u64() const { return limbs_.size() <= 1; }

    std::string to_decimal() const;

    size_t hash() const;

private:
    void trim();
    std::vector<std::uint64_t> limbs_;
};

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

}  // namespace nestlab
