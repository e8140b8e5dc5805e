#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>
#include <wmmintrin.h>

#include "rhylab/crypto/aes256.hpp"

namespace rhylab::crypto {

// Expanded schedule bytes are laid out exactly as FIPS-197 words, so the
// round keys load directly.
void Aes256::encrypt_blocks_aesni(const std::uint8_t* in, std::uint8_t* out,
                                  std::size_t count) const {
    const auto* rk_bytes = reinterpret_cast<const std::uint8_t*>(round_keys_);
    __m128i rk[kRounds + 1];
    for (int i = 0; i <= kRounds; ++i)
        rk[i] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rk_bytes + 16 * i));

    std::size_t i = 0;
    // Four-way interleave keeps the AES units busy; blocks are independent.
    for (; i + 4 <= count; i += 4) {
        __m128i b0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * i));
        __m128i b1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * (i + 1)));
        __m128i b2 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * (i + 2)));
        __m128i b3 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * (i + 3)));
        b0 = _mm_xor_si128(b0, rk[0]);
        b1 = _mm_xor_si128(b1, rk[0]);
        b2 = _mm_xor_si128(b2, rk[0]);
        b3 = _mm_xor_si128(b3, rk[0]);
        for (int r = 1; r < kRounds; ++r) {
            b0 = _mm_aesenc_si128(b0, rk[r]);
            b1 = _mm_aesenc_si128(b1, rk[r]);
            b2 = _mm_aesenc_si128(b2, rk[r]);
            b3 = _mm_aesenc_si128(b3, rk[r]);
        }
        b0 = _mm_aesenclast_si128(b0, rk[kRounds]);
        b1 = _mm_aesenclast_si128(b1, rk[kRounds]);
        b2 = _mm_aesenclast_si128(b2, rk[kRounds]);
        b3 = _mm_aesenclast_si128(b3, rk[kRounds]);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * i), b0);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * (i + 1)), b1);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * (i + 2)), b2);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * (i + 3)), b3);
    }
    for (; i < count; ++i) {
        __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * i));
        b = _mm_xor_si128(b, rk[0]);
        for (int r = 1; r < kRounds; ++r) b = _mm_aesenc_si128(b, rk[r]);
        b = _mm_aesenclast_si128(b, rk[kRounds]);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * i), b);
    }
}

}  // namespace rhylab::crypto

#endif
