#pragma once

#include <array>
#include <cstdint>

#include "rhylab/crypto/aes256.hpp"
#include "rhylab/util.hpp"

namespace rhylab::crypto {

// AES-256 in CTR mode with a little-endian counter: the IV is the initial
// 128-bit counter value and increments as a little-endian integer per
// block. Encryption and decryption are the same operation.
class Aes256CtrLe {
  public:
    Aes256CtrLe() = default;
    Aes256CtrLe(ByteView key, ByteView iv) { reset(key, iv); }

    void reset(ByteView key, ByteView iv);

    // XORs keystream into data, where stream_offset is the byte position
    // within the keystream (block = iv + offset/16, little-endian add).
    // Random access by offset makes continuous multi-window streams cheap.
    void xor_range(ByteSpan data, std::uint64_t stream_offset) const;

    void keystream(ByteSpan out, std::uint64_t stream_offset) const;

  private:
    void counter_block(std::uint64_t block_index, std::uint8_t out[16]) const;

    Aes256 cipher_;
    std::uint64_t iv_lo_ = 0;
    std::uint64_t iv_hi_ = 0;
};

}  // namespace rhylab::crypto
