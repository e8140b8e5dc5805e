#include "rhylab/chacha20.hpp"

#include <cstring>

namespace rhylab {

namespace {

inline std::uint32_t rotl(std::uint32_t v, int r) { return (v << r) | (v >> (32 - r)); }

inline void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = rotl(d, 16);
    c += d; b ^= c; b = rotl(b, 12);
    a += b; d ^= a; d = rotl(d, 8);
    c += d; b ^= c; b = rotl(b, 7);
}

}  // namespace

void ChaChaPrng::block(const std::uint32_t key_words[8], const std::uint32_t nonce_words[2],
                       std::uint64_t counter, std::uint8_t out[kBlockBytes]) {
    std::uint32_t st[16];
    st[0] = 0x61707865u;
    st[1] = 0x3320646Eu;
    st[2] = 0x79622D32u;
    st[3] = 0x6B206574u;
    for (int i = 0; i < 8; ++i) st[4 + i] = key_words[i];
    st[12] = static_cast<std::uint32_t>(counter);
    st[13] = static_cast<std::uint32_t>(counter >> 32);
    st[14] = nonce_words[0];
    st[15] = nonce_words[1];

    std::uint32_t x[16];
    std::memcpy(x, st, sizeof(x));
    for (int r = 0; r < 10; ++r) {
        quarter_round(x[0], x[4], x[8], x[12]);
        quarter_round(x[1], x[5], x[9], x[13]);
        quarter_round(x[2], x[6], x[10], x[14]);
        quarter_round(x[3], x[7], x[11], x[15]);
        quarter_round(x[0], x[5], x[10], x[15]);
        quarter_round(x[1], x[6], x[11], x[12]);
        quarter_round(x[2], x[7], x[8], x[13]);
        quarter_round(x[3], x[4], x[9], x[14]);
    }
    for (int i = 0; i < 16; ++i) store_le32(out + 4 * i, x[i] + st[i]);
}

void ChaChaPrng::reset(ByteView key, ByteView nonce) {
    if (key.size() != kKeyBytes) throw std::invalid_argument("ChaChaPrng: key must be 32 bytes");
    if (nonce.size() != kNonceBytes) throw std::invalid_argument("ChaChaPrng: nonce must be 8 bytes");
    for (int i = 0; i < 8; ++i) key_[i] = load_le32(key.data() + 4 * i);
    nonce_[0] = load_le32(nonce.data());
    nonce_[1] = load_le32(nonce.data() + 4);
    counter_ = 0;
    buf_pos_ = kBlockBytes;
    total_emitted_ = 0;
}

void ChaChaPrng::refill() {
    block(key_, nonce_, counter_, buf_.data());
    ++counter_;
    buf_pos_ = 0;
}

void ChaChaPrng::read(ByteSpan out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (buf_pos_ == kBlockBytes) refill();
        std::size_t take = std::min(out.size() - done, kBlockBytes - buf_pos_);
        std::memcpy(out.data() + done, buf_.data() + buf_pos_, take);
        buf_pos_ += take;
        done += take;
    }
    total_emitted_ += out.size();
}

Bytes ChaChaPrng::read(std::size_t n) {
    Bytes out(n);
    read(ByteSpan(out));
    return out;
}

void ChaChaPrng::skip(std::size_t n) {
    while (n > 0) {
        if (buf_pos_ == kBlockBytes) refill();
        std::size_t take = std::min(n, kBlockBytes - buf_pos_);
        buf_pos_ += take;
        total_emitted_ += take;
        n -= take;
    }
}

}  // namespace rhylab
