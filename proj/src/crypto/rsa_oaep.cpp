#include "rhylab/crypto/rsa_oaep.hpp"

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rhylab::crypto {

namespace {

constexpr std::uint64_t kPublicExponent = 65537;

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        constexpr std::uint32_t kLimit = 65536;
        std::vector<bool> composite(kLimit, false);
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 2; i < kLimit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j < kLimit; j += i)
                composite[static_cast<std::size_t>(j)] = true;
        }
        return out;
    }();
    return primes;
}

BigUint random_below(ChaChaPrng& rng, const BigUint& bound) {
    std::size_t bytes = (bound.bit_length() + 7) / 8;
    for (;;) {
        Bytes raw = rng.read(bytes);
        // Mask the top byte down to the bound's width to keep retries rare.
        std::size_t top_bits = bound.bit_length() % 8;
        if (top_bits) raw[0] &= static_cast<std::uint8_t>((1u << top_bits) - 1);
        BigUint v = BigUint::from_bytes_be(raw);
        if (v < bound) return v;
    }
}

bool miller_rabin(const BigUint& n, int rounds, ChaChaPrng& rng) {
    BigUint n_minus_1 = n - BigUint(1);
    BigUint d = n_minus_1;
    std::size_t s = 0;
    while (!d.is_odd()) {
        d.shr(1);
        ++s;
    }

    MontCtx ctx(n);
    BigUint n_minus_3 = n - BigUint(3);
    BigUint nm1_mont = ctx.to_mont(n_minus_1);
    for (int round = 0; round < rounds; ++round) {
        BigUint a = (round == 0) ? BigUint(2) : random_below(rng, n_minus_3) + BigUint(2);
        BigUint x = ctx.modexp(a, d);
        if (x == BigUint(1) || x == n_minus_1) continue;
        BigUint xm = ctx.to_mont(x);
        bool witness = true;
        for (std::size_t i = 1; i < s; ++i) {
            xm = ctx.mont_mul(xm, xm);
            if (xm == nm1_mont) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

BigUint generate_prime(ChaChaPrng& rng, std::size_t bits) {
    const auto& primes = small_primes();
    for (;;) {
        Bytes raw = rng.read(bits / 8);
        raw[0] |= 0xC0;  // top two bits: the product reaches full width
        raw[bits / 8 - 1] |= 0x01;
        BigUint candidate = BigUint::from_bytes_be(raw);

        bool divisible = false;
        for (std::uint32_t p : primes) {
            if (candidate.mod_u64(p) == 0) {
                divisible = true;
                break;
            }
        }
        if (divisible) continue;
        if (candidate.mod_u64(kPublicExponent) == 1) continue;  // keep gcd(e, p-1) = 1
        if (!miller_rabin(candidate, 24, rng)) continue;
        return candidate;
    }
}

}  // namespace

ChaChaPrng keygen_rng_from_seed(std::uint64_t seed) {
    std::uint8_t tag[24] = {'r', 's', 'a', '-', 'k', 'e', 'y', 'g', 'e', 'n', ':', 0};
    store_le64(tag + 12, seed);
    Sha256Digest key = Sha256::hash(ByteView(tag, 20));
    std::uint8_t nonce_src[21];
    std::memcpy(nonce_src, tag, 20);
    nonce_src[20] = 'n';
    Sha256Digest nonce = Sha256::hash(ByteView(nonce_src, 21));
    return ChaChaPrng(ByteView(key.data(), 32), ByteView(nonce.data(), 8));
}

const RsaPrivateKey& rsa_keypair_for_seed(std::uint64_t seed) {
    static std::mutex mutex;
    static std::map<std::uint64_t, RsaPrivateKey> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(seed);
    if (it == cache.end()) {
        ChaChaPrng rng = keygen_rng_from_seed(seed);
        it = cache.emplace(seed, rsa_generate(rng)).first;
    }
    return it->second;
}

RsaPrivateKey rsa_generate(ChaChaPrng& rng, std::size_t modulus_bits) {
    if (modulus_bits % 16 != 0) throw std::invalid_argument("rsa_generate: bits must be even bytes");
    BigUint p = generate_prime(rng, modulus_bits / 2);
    BigUint q = generate_prime(rng, modulus_bits / 2);
    while (p == q) q = generate_prime(rng, modulus_bits / 2);

    BigUint n = p * q;
    BigUint phi = (p - BigUint(1)) * (q - BigUint(1));
    BigUint e(kPublicExponent);
    BigUint d = mod_inverse(e, phi);
    return {n, e, d, p, q};
}

Bytes mgf1_sha256(ByteView seed, std::size_t out_len) {
    Bytes out;
    out.reserve(out_len + kOaepHashBytes);
    std::uint8_t ctr_be[4];
    for (std::uint32_t counter = 0; out.size() < out_len; ++counter) {
        store_be32(ctr_be, counter);
        Sha256 h;
        h.update(seed);
        h.update(ByteView(ctr_be, 4));
        Sha256Digest block = h.finish();
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(out_len);
    return out;
}

Bytes oaep_encrypt(const RsaPublicKey& pub, ByteView message, ByteView seed16) {
    constexpr std::size_t k = kRsaModulusBytes;
    if (seed16.size() != kOaepSeedBytes) throw std::invalid_argument("oaep: seed must be 16 bytes");
    const std::size_t db_len = k - 1 - kOaepSeedBytes;
    if (message.size() > db_len - kOaepHashBytes - 1)
        throw std::invalid_argument("oaep: message too long");

    // DB = lHash || PS || 0x01 || M
    Bytes db(db_len, 0);
    Sha256Digest lhash = Sha256::hash(ByteView());
    std::memcpy(db.data(), lhash.data(), kOaepHashBytes);
    db[db_len - message.size() - 1] = 0x01;
    std::memcpy(db.data() + db_len - message.size(), message.data(), message.size());

    Bytes db_mask = mgf1_sha256(seed16, db_len);
    for (std::size_t i = 0; i < db_len; ++i) db[i] ^= db_mask[i];

    Bytes seed_mask = mgf1_sha256(ByteView(db), kOaepSeedBytes);
    Bytes em(k, 0);
    for (std::size_t i = 0; i < kOaepSeedBytes; ++i) em[1 + i] = seed16[i] ^ seed_mask[i];
    std::memcpy(em.data() + 1 + kOaepSeedBytes, db.data(), db_len);

    BigUint m = BigUint::from_bytes_be(em);
    MontCtx ctx(pub.n);
    return ctx.modexp(m, pub.e).to_bytes_be(k);
}

std::optional<Bytes> oaep_decrypt(const RsaPrivateKey& priv, ByteView ciphertext) {
    constexpr std::size_t k = kRsaModulusBytes;
    if (ciphertext.size() != k) return std::nullopt;
    BigUint c = BigUint::from_bytes_be(ciphertext);
    if (c >= priv.n) return std::nullopt;
    MontCtx ctx(priv.n);
    Bytes em = ctx.modexp(c, priv.d).to_bytes_be(k);

    if (em[0] != 0x00) return std::nullopt;
    const std::size_t db_len = k - 1 - kOaepSeedBytes;
    Bytes masked_seed(em.begin() + 1, em.begin() + 1 + kOaepSeedBytes);
    Bytes db(em.begin() + 1 + kOaepSeedBytes, em.end());

    Bytes seed_mask = mgf1_sha256(ByteView(db), kOaepSeedBytes);
    Bytes seed(kOaepSeedBytes);
    for (std::size_t i = 0; i < kOaepSeedBytes; ++i) seed[i] = masked_seed[i] ^ seed_mask[i];
    Bytes db_mask = mgf1_sha256(ByteView(seed), db_len);
    for (std::size_t i = 0; i < db_len; ++i) db[i] ^= db_mask[i];

    Sha256Digest lhash = Sha256::hash(ByteView());
    if (std::memcmp(db.data(), lhash.data(), kOaepHashBytes) != 0) return std::nullopt;
    std::size_t i = kOaepHashBytes;
    while (i < db_len && db[i] == 0x00) ++i;
    if (i == db_len || db[i] != 0x01) return std::nullopt;
    return Bytes(db.begin() + static_cast<std::ptrdiff_t>(i) + 1, db.end());
}

}  // namespace rhylab::crypto
