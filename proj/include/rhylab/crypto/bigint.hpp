#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rhylab/util.hpp"

namespace rhylab::crypto {

// Arbitrary-precision unsigned integer, little-endian 64-bit limbs,
// normalized so the top limb is nonzero (zero = no limbs). Covers exactly
// what RSA key generation and raw RSA need.
class BigUint {
  public:
    BigUint() = default;
    BigUint(std::uint64_t v) {  // NOLINT(google-explicit-constructor)
        if (v) limbs_.push_back(v);
    }

    static BigUint from_bytes_be(ByteView bytes);
    Bytes to_bytes_be(std::size_t width) const;
    static BigUint from_hex(std::string_view hex);
    std::string to_hex() const;

    bool is_zero() const { return limbs_.empty(); }
    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }
    std::size_t bit_length() const;
    bool bit(std::size_t i) const;
    std::size_t limb_count() const { return limbs_.size(); }
    std::uint64_t limb(std::size_t i) const { return i < limbs_.size() ? limbs_[i] : 0; }

    int cmp(const BigUint& o) const;
    bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const BigUint& o) const { return limbs_ != o.limbs_; }
    bool operator<(const BigUint& o) const { return cmp(o) < 0; }
    bool operator<=(const BigUint& o) const { return cmp(o) <= 0; }
    bool operator>(const BigUint& o) const { return cmp(o) > 0; }
    bool operator>=(const BigUint& o) const { return cmp(o) >= 0; }

    BigUint& operator+=(const BigUint& o);
    BigUint& operator-=(const BigUint& o);  // requires *this >= o
    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
    friend BigUint operator-(BigUint a, const BigUint& b) { return a -= b; }
    friend BigUint operator*(const BigUint& a, const BigUint& b);

    BigUint& shl(std::size_t bits);
    BigUint& shr(std::size_t bits);

    // (quotient, remainder)
    static std::pair<BigUint, BigUint> divmod(const BigUint& num, const BigUint& den);
    friend BigUint operator%(const BigUint& a, const BigUint& b) {
        return divmod(a, b).second;
    }
    friend BigUint operator/(const BigUint& a, const BigUint& b) {
        return divmod(a, b).first;
    }

    std::uint64_t mod_u64(std::uint64_t m) const;

  private:
    void trim();
    std::vector<std::uint64_t> limbs_;
};

// Montgomery arithmetic for a fixed odd modulus.
class MontCtx {
  public:
    explicit MontCtx(const BigUint& modulus);

    const BigUint& modulus() const { return n_; }
    std::size_t limbs() const { return limbs_; }

    // to/from Montgomery domain
    BigUint to_mont(const BigUint& a) const;
    BigUint from_mont(const BigUint& a) const;
    BigUint mont_mul(const BigUint& a, const BigUint& b) const;

    // a^e mod n (plain-domain operands and result)
    BigUint modexp(const BigUint& base, const BigUint& exp) const;

  private:
    void mul_into(const std::uint64_t* a, const std::uint64_t* b, std::uint64_t* out) const;

    BigUint n_;
    BigUint rr_;  // R^2 mod n
    std::uint64_t n0inv_;
    std::size_t limbs_;
};

// Modular inverse via extended Euclid; a and m must be coprime.
BigUint mod_inverse(const BigUint& a, const BigUint& m);

}  // namespace rhylab::crypto
