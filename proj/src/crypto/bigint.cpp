#include "rhylab/crypto/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace rhylab::crypto {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_bytes_be(ByteView bytes) {
    BigUint out;
    out.limbs_.assign((bytes.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        std::size_t byte_from_end = bytes.size() - 1 - i;
        out.limbs_[byte_from_end / 8] |= static_cast<u64>(bytes[i]) << (8 * (byte_from_end % 8));
    }
    out.trim();
    return out;
}

Bytes BigUint::to_bytes_be(std::size_t width) const {
    Bytes out(width, 0);
    for (std::size_t i = 0; i < width; ++i) {
        std::size_t byte_from_end = width - 1 - i;
        std::size_t limb_idx = byte_from_end / 8;
        if (limb_idx < limbs_.size())
            out[i] = static_cast<std::uint8_t>(limbs_[limb_idx] >> (8 * (byte_from_end % 8)));
    }
    if (bit_length() > width * 8) throw std::invalid_argument("BigUint: value wider than field");
    return out;
}

BigUint BigUint::from_hex(std::string_view hex) {
    if (hex.size() % 2) {
        std::string padded = "0";
        padded += hex;
        return from_bytes_be(rhylab::from_hex(padded));
    }
    return from_bytes_be(rhylab::from_hex(hex));
}

std::string BigUint::to_hex() const {
    if (is_zero()) return "0";
    std::size_t bytes = (bit_length() + 7) / 8;
    std::string s = rhylab::to_hex(to_bytes_be(bytes));
    if (s.size() > 1 && s[0] == '0') s.erase(0, 1);
    return s;
}

std::size_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    u64 top = limbs_.back();
    std::size_t bits = (limbs_.size() - 1) * 64;
    while (top) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

bool BigUint::bit(std::size_t i) const {
    std::size_t limb_idx = i / 64;
    if (limb_idx >= limbs_.size()) return false;
    return (limbs_[limb_idx] >> (i % 64)) & 1;
}

int BigUint::cmp(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint& BigUint::operator+=(const BigUint& o) {
    limbs_.resize(std::max(limbs_.size(), o.limbs_.size()), 0);
    u64 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u128 s = static_cast<u128>(limbs_[i]) + (i < o.limbs_.size() ? o.limbs_[i] : 0) + carry;
        limbs_[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    if (carry) limbs_.push_back(carry);
    return *this;
}

BigUint& BigUint::operator-=(const BigUint& o) {
    if (*this < o) throw std::invalid_argument("BigUint: negative subtraction");
    u64 borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        u64 sub = (i < o.limbs_.size() ? o.limbs_[i] : 0);
        u64 cur = limbs_[i];
        u64 res = cur - sub - borrow;
        borrow = (cur < sub + borrow) || (sub == UINT64_MAX && borrow) ? 1 : 0;
        limbs_[i] = res;
    }
    trim();
    return *this;
}

BigUint operator*(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return BigUint();
    BigUint out;
    out.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        u64 carry = 0;
        for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
            u128 s = static_cast<u128>(a.limbs_[i]) * b.limbs_[j] + out.limbs_[i + j] + carry;
            out.limbs_[i + j] = static_cast<u64>(s);
            carry = static_cast<u64>(s >> 64);
        }
        out.limbs_[i + b.limbs_.size()] += carry;
    }
    out.trim();
    return out;
}

BigUint& BigUint::shl(std::size_t bits) {
    if (is_zero() || bits == 0) return *this;
    std::size_t limb_shift = bits / 64;
    std::size_t bit_shift = bits % 64;
    limbs_.insert(limbs_.begin(), limb_shift, 0);
    if (bit_shift) {
        u64 carry = 0;
        for (std::size_t i = limb_shift; i < limbs_.size(); ++i) {
            u64 next_carry = limbs_[i] >> (64 - bit_shift);
            limbs_[i] = (limbs_[i] << bit_shift) | carry;
            carry = next_carry;
        }
        if (carry) limbs_.push_back(carry);
    }
    return *this;
}

BigUint& BigUint::shr(std::size_t bits) {
    std::size_t limb_shift = bits / 64;
    std::size_t bit_shift = bits % 64;
    if (limb_shift >= limbs_.size()) {
        limbs_.clear();
        return *this;
    }
    limbs_.erase(limbs_.begin(), limbs_.begin() + static_cast<std::ptrdiff_t>(limb_shift));
    if (bit_shift) {
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            u64 hi = (i + 1 < limbs_.size()) ? limbs_[i + 1] << (64 - bit_shift) : 0;
            limbs_[i] = (limbs_[i] >> bit_shift) | hi;
        }
    }
    trim();
    return *this;
}

std::pair<BigUint, BigUint> BigUint::divmod(const BigUint& num, const BigUint& den) {
    if (den.is_zero()) throw std::invalid_argument("BigUint: division by zero");
    if (num < den) return {BigUint(), num};

    // Shift-subtract long division; only key-generation bookkeeping calls it.
    std::size_t shift = num.bit_length() - den.bit_length();
    BigUint rem = num;
    BigUint d = den;
    d.shl(shift);
    BigUint quot;
    quot.limbs_.assign(shift / 64 + 1, 0);
    for (std::size_t i = shift + 1; i-- > 0;) {
        if (rem >= d) {
            rem -= d;
            quot.limbs_[i / 64] |= (static_cast<u64>(1) << (i % 64));
        }
        d.shr(1);
    }
    quot.trim();
    return {quot, rem};
}

std::uint64_t BigUint::mod_u64(std::uint64_t m) const {
    if (m == 0) throw std::invalid_argument("BigUint: mod by zero");
    u128 acc = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        acc = ((acc << 64) | limbs_[i]) % m;
    }
    return static_cast<u64>(acc);
}

// ---- Montgomery ----

MontCtx::MontCtx(const BigUint& modulus) : n_(modulus) {
    if (!modulus.is_odd()) throw std::invalid_argument("MontCtx: modulus must be odd");
    limbs_ = modulus.limb_count();

    // -n^{-1} mod 2^64 via Newton iteration.
    u64 n0 = modulus.limb(0);
    u64 inv = 1;
    for (int i = 0; i < 6; ++i) inv *= 2 - n0 * inv;
    n0inv_ = ~inv + 1;

    // R^2 mod n by 2*64*limbs modular doublings.
    BigUint r(1);
    for (std::size_t i = 0; i < 2 * 64 * limbs_; ++i) {
        r.shl(1);
        if (r >= n_) r -= n_;
    }
    rr_ = r;
}

void MontCtx::mul_into(const u64* a, const u64* b, u64* out) const {
    const std::size_t n = limbs_;
    std::vector<u64> t(n + 2, 0);
    for (std::size_t i = 0; i < n; ++i) {
        // t += a[i] * b
        u64 carry = 0;
        for (std::size_t j = 0; j < n; ++j) {
            u128 s = static_cast<u128>(a[i]) * b[j] + t[j] + carry;
            t[j] = static_cast<u64>(s);
            carry = static_cast<u64>(s >> 64);
        }
        u128 s = static_cast<u128>(t[n]) + carry;
        t[n] = static_cast<u64>(s);
        t[n + 1] = static_cast<u64>(s >> 64);

        // t += m * n, t >>= 64
        u64 m = t[0] * n0inv_;
        u128 s2 = static_cast<u128>(m) * n_.limb(0) + t[0];
        carry = static_cast<u64>(s2 >> 64);
        for (std::size_t j = 1; j < n; ++j) {
            s2 = static_cast<u128>(m) * n_.limb(j) + t[j] + carry;
            t[j - 1] = static_cast<u64>(s2);
            carry = static_cast<u64>(s2 >> 64);
        }
        s2 = static_cast<u128>(t[n]) + carry;
        t[n - 1] = static_cast<u64>(s2);
        t[n] = t[n + 1] + static_cast<u64>(s2 >> 64);
        t[n + 1] = 0;
    }

    // Conditional final subtraction.
    bool ge = t[n] != 0;
    if (!ge) {
        ge = true;
        for (std::size_t i = n; i-- > 0;) {
            if (t[i] != n_.limb(i)) {
                ge = t[i] > n_.limb(i);
                break;
            }
        }
    }
    if (ge) {
        u64 borrow = 0;
        for (std::size_t i = 0; i < n; ++i) {
            u64 sub = n_.limb(i);
            u64 cur = t[i];
            u64 res = cur - sub - borrow;
            borrow = (cur < sub + borrow) || (sub == UINT64_MAX && borrow) ? 1 : 0;
            out[i] = res;
        }
    } else {
        std::copy(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n), out);
    }
}

BigUint MontCtx::mont_mul(const BigUint& a, const BigUint& b) const {
    std::vector<u64> av(limbs_, 0), bv(limbs_, 0), ov(limbs_, 0);
    for (std::size_t i = 0; i < limbs_; ++i) {
        av[i] = a.limb(i);
        bv[i] = b.limb(i);
    }
    mul_into(av.data(), bv.data(), ov.data());
    BigUint out = BigUint();
    Bytes be(limbs_ * 8);
    for (std::size_t i = 0; i < limbs_; ++i)
        for (int j = 0; j < 8; ++j)
            be[(limbs_ - 1 - i) * 8 + (7 - j)] = static_cast<std::uint8_t>(ov[i] >> (8 * j));
    out = BigUint::from_bytes_be(be);
    return out;
}

BigUint MontCtx::to_mont(const BigUint& a) const { return mont_mul(a, rr_); }

BigUint MontCtx::from_mont(const BigUint& a) const { return mont_mul(a, BigUint(1)); }

BigUint MontCtx::modexp(const BigUint& base, const BigUint& exp) const {
    if (exp.is_zero()) return BigUint(1) % n_;
    BigUint b = base % n_;

    const std::size_t n = limbs_;
    auto load = [&](const BigUint& v, std::vector<u64>& dst) {
        dst.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) dst[i] = v.limb(i);
    };

    // 4-bit fixed window.
    std::vector<std::vector<u64>> table(16, std::vector<u64>(n, 0));
    std::vector<u64> mont_b(n, 0), acc(n, 0), tmp(n, 0);
    load(to_mont(b), mont_b);
    load(to_mont(BigUint(1)), table[0]);
    table[1] = mont_b;
    for (int i = 2; i < 16; ++i) mul_into(table[i - 1].data(), mont_b.data(), table[i].data());

    std::size_t bits = exp.bit_length();
    std::size_t windows = (bits + 3) / 4;
    acc = table[0];
    for (std::size_t w = windows; w-- > 0;) {
        for (int s = 0; s < 4; ++s) {
            mul_into(acc.data(), acc.data(), tmp.data());
            std::swap(acc, tmp);
        }
        unsigned idx = 0;
        for (int s = 3; s >= 0; --s) {
            std::size_t bit_idx = w * 4 + static_cast<std::size_t>(s);
            idx = (idx << 1) | (bit_idx < bits && exp.bit(bit_idx) ? 1u : 0u);
        }
        if (idx) {
            mul_into(acc.data(), table[idx].data(), tmp.data());
            std::swap(acc, tmp);
        }
    }

    // back out of Montgomery domain
    std::vector<u64> one(n, 0);
    one[0] = 1;
    mul_into(acc.data(), one.data(), tmp.data());

    Bytes be(n * 8);
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < 8; ++j)
            be[(n - 1 - i) * 8 + (7 - j)] = static_cast<std::uint8_t>(tmp[i] >> (8 * j));
    return BigUint::from_bytes_be(be);
}

BigUint mod_inverse(const BigUint& a, const BigUint& m) {
    // Extended Euclid with explicit signs on the Bezout coefficient.
    BigUint old_r = a % m, r = m;
    BigUint old_t(1), t;
    bool old_t_neg = false, t_neg = false;

    while (!r.is_zero()) {
        auto [q, rem] = BigUint::divmod(old_r, r);

        // new_t = old_t - q * t
        BigUint qt = q * t;
        BigUint new_t;
        bool new_t_neg;
        if (old_t_neg == t_neg) {
            if (old_t >= qt) {
                new_t = old_t - qt;
                new_t_neg = old_t_neg;
            } else {
                new_t = qt - old_t;
                new_t_neg = !old_t_neg;
            }
        } else {
            new_t = old_t + qt;
            new_t_neg = old_t_neg;
        }

        old_r = r;
        r = rem;
        old_t = t;
        old_t_neg = t_neg;
        t = new_t;
        t_neg = new_t_neg;
    }

    if (old_r != BigUint(1)) throw std::invalid_argument("mod_inverse: inputs not coprime");
    if (old_t_neg) return m - (old_t % m);
    return old_t % m;
}

}  // namespace rhylab::crypto
