#pragma once

#include <cstdint>

#include "rhylab/util.hpp"

namespace rhylab::crypto {

// AES-256 block encryption (the only direction CTR mode needs). Uses
// AES-NI when the CPU has it, otherwise a portable byte-oriented path.
class Aes256 {
  public:
    static constexpr std::size_t kKeyBytes = 32;
    static constexpr std::size_t kBlockBytes = 16;
    static constexpr int kRounds = 14;

    Aes256() = default;
    explicit Aes256(ByteView key) { set_key(key); }

    void set_key(ByteView key);

    void encrypt_block(const std::uint8_t in[16], std::uint8_t out[16]) const;

    // count independent blocks back to back; in/out may alias.
    void encrypt_blocks(const std::uint8_t* in, std::uint8_t* out, std::size_t count) const;

    static bool has_aesni();

    // Force the portable path (or re-enable hardware); both paths must
    // agree and both are exercised by the tests.
    void use_hardware(bool enabled) { use_aesni_ = enabled && has_aesni(); }

  private:
    alignas(16) std::uint32_t round_keys_[4 * (kRounds + 1)] = {};
    bool use_aesni_ = false;

    void encrypt_block_portable(const std::uint8_t in[16], std::uint8_t out[16]) const;
#if defined(__x86_64__) || defined(_M_X64)
    void encrypt_blocks_aesni(const std::uint8_t* in, std::uint8_t* out, std::size_t count) const;
#endif
};

}  // namespace rhylab::crypto
