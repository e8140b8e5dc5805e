#include "rhylab/crypto/aes_ctr.hpp"

#include <cstring>

namespace rhylab::crypto {

void Aes256CtrLe::reset(ByteView key, ByteView iv) {
    if (iv.size() != 16) throw std::invalid_argument("Aes256CtrLe: iv must be 16 bytes");
    cipher_.set_key(key);
    iv_lo_ = load_le64(iv.data());
    iv_hi_ = load_le64(iv.data() + 8);
}

void Aes256CtrLe::counter_block(std::uint64_t block_index, std::uint8_t out[16]) const {
    std::uint64_t lo = iv_lo_ + block_index;
    std::uint64_t hi = iv_hi_ + (lo < iv_lo_ ? 1 : 0);
    store_le64(out, lo);
    store_le64(out + 8, hi);
}

void Aes256CtrLe::keystream(ByteSpan out, std::uint64_t stream_offset) const {
    constexpr std::size_t kBatch = 32;  // blocks per pass
    std::uint8_t counters[kBatch * 16];
    std::uint8_t pad[kBatch * 16];

    std::size_t produced = 0;
    std::uint64_t block = stream_offset / 16;
    std::size_t skip = static_cast<std::size_t>(stream_offset % 16);

    while (produced < out.size()) {
        std::size_t want_bytes = out.size() - produced + skip;
        std::size_t nblocks = std::min(kBatch, (want_bytes + 15) / 16);
        for (std::size_t i = 0; i < nblocks; ++i) counter_block(block + i, counters + 16 * i);
        cipher_.encrypt_blocks(counters, pad, nblocks);

        std::size_t avail = nblocks * 16 - skip;
        std::size_t take = std::min(avail, out.size() - produced);
        std::memcpy(out.data() + produced, pad + skip, take);
        produced += take;
        block += nblocks;
        skip = 0;
    }
}

void Aes256CtrLe::xor_range(ByteSpan data, std::uint64_t stream_offset) const {
    constexpr std::size_t kChunk = 32 * 16;
    std::uint8_t pad[kChunk];
    std::size_t done = 0;
    while (done < data.size()) {
        std::size_t take = std::min(kChunk, data.size() - done);
        keystream(ByteSpan(pad, take), stream_offset + done);
        for (std::size_t i = 0; i < take; ++i) data[done + i] ^= pad[i];
        done += take;
    }
}

}  // namespace rhylab::crypto
