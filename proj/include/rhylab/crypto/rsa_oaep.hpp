#pragma once

#include <cstdint>
#include <optional>

#include "rhylab/chacha20.hpp"
#include "rhylab/crypto/bigint.hpp"
#include "rhylab/crypto/sha256.hpp"
#include "rhylab/util.hpp"

namespace rhylab::crypto {

constexpr std::size_t kRsaModulusBytes = 512;  // RSA-4096
constexpr std::size_t kOaepSeedBytes = 16;
constexpr std::size_t kOaepHashBytes = 32;  // SHA-256 lHash / MGF1

struct RsaPublicKey {
    BigUint n;
    BigUint e;
};

struct RsaPrivateKey {
    BigUint n;
    BigUint e;
    BigUint d;
    BigUint p;
    BigUint q;

    RsaPublicKey public_key() const { return {n, e}; }
};

// Deterministic 4096-bit keypair from the supplied byte stream. The
// simulator derives the stream from its config so reruns produce
// byte-identical footers.
RsaPrivateKey rsa_generate(ChaChaPrng& rng, std::size_t modulus_bits = 4096);

ChaChaPrng keygen_rng_from_seed(std::uint64_t seed);

// Seed-keyed cache over rsa_generate(keygen_rng_from_seed(seed)); key
// generation costs seconds and the result is a pure function of the seed.
const RsaPrivateKey& rsa_keypair_for_seed(std::uint64_t seed);

// OAEP with SHA-256 for lHash/MGF1 and a fixed 16-byte seed, sized so one
// encryption consumes exactly the 16 random bytes the keystream budget
// provides per RSA operation.
Bytes oaep_encrypt(const RsaPublicKey& pub, ByteView message, ByteView seed16);
std::optional<Bytes> oaep_decrypt(const RsaPrivateKey& priv, ByteView ciphertext);

Bytes mgf1_sha256(ByteView seed, std::size_t out_len);

}  // namespace rhylab::crypto
