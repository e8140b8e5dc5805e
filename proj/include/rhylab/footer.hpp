#pragma once

#include <array>
#include <cstdint>

#include "rhylab/util.hpp"

namespace rhylab {

// Trailer appended to every encrypted file:
//   RSA-OAEP(key) || RSA-OAEP(iv) || reserved(8) || version(4) = 0x40C bytes.
// The key and iv fields are 512-byte RSA-4096 ciphertexts. Only the
// attacker's private key can open them; the recovery path treats the
// whole trailer as opaque and strips it.
constexpr std::size_t kRsaFieldBytes = 512;
constexpr std::size_t kReservedBytes = 8;
constexpr std::size_t kVersionBytes = 4;
constexpr std::size_t kFooterBytes = 2 * kRsaFieldBytes + kReservedBytes + kVersionBytes;
static_assert(kFooterBytes == 0x40C);

constexpr std::array<std::uint8_t, kVersionBytes> kDefaultVersion = {0x01, 0x00, 0x00, 0x00};

struct EncryptedFooter {
    std::array<std::uint8_t, kRsaFieldBytes> rsa_key_ct;
    std::array<std::uint8_t, kRsaFieldBytes> rsa_iv_ct;
    std::array<std::uint8_t, kReservedBytes> reserved;
    std::array<std::uint8_t, kVersionBytes> version;

    Bytes serialize() const;
    static EncryptedFooter parse(ByteView raw);  // raw must be exactly 0x40C bytes
};

}  // namespace rhylab
