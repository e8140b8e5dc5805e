#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rhylab/util.hpp"

namespace rhylab::crypto {

using Sha256Digest = std::array<std::uint8_t, 32>;

class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(ByteView data);
    Sha256Digest finish();

    static Sha256Digest hash(ByteView data) {
        Sha256 h;
        h.update(data);
        return h.finish();
    }

  private:
    void compress(const std::uint8_t block[64]);

    std::uint32_t state_[8];
    std::uint8_t buf_[64];
    std::size_t buf_len_;
    std::uint64_t total_len_;
};

std::string digest_hex(const Sha256Digest& d);

}  // namespace rhylab::crypto
