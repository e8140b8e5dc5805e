#pragma once

#include <array>
#include <cstdint>

#include "rhylab/util.hpp"

namespace rhylab {

// ChaCha20 keystream generator, original construction: 256-bit key,
// 64-bit nonce, 64-bit block counter starting at zero. Value type; copies
// are independent streams.
class ChaChaPrng {
  public:
    static constexpr std::size_t kKeyBytes = 32;
    static constexpr std::size_t kNonceBytes = 8;
    static constexpr std::size_t kBlockBytes = 64;

    ChaChaPrng() = default;
    ChaChaPrng(ByteView key, ByteView nonce) { reset(key, nonce); }

    void reset(ByteView key, ByteView nonce);

    // Next n keystream bytes. Stream-consistent: read(n) then read(m)
    // yields the same bytes as a single read(n + m).
    void read(ByteSpan out);
    Bytes read(std::size_t n);
    void skip(std::size_t n);

    std::uint64_t total_bytes_emitted() const { return total_emitted_; }

    // One raw block at an absolute block index, independent of the
    // streaming position.
    static void block(const std::uint32_t key_words[8], const std::uint32_t nonce_words[2],
                      std::uint64_t counter, std::uint8_t out[kBlockBytes]);

  private:
    void refill();

    std::uint32_t key_[8] = {};
    std::uint32_t nonce_[2] = {};
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, kBlockBytes> buf_ = {};
    std::size_t buf_pos_ = kBlockBytes;
    std::uint64_t total_emitted_ = 0;
};

}  // namespace rhylab
