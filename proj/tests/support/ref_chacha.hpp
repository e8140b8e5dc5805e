#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Reference ChaCha20 keystream (original 64-bit-nonce construction),
// written independently of the library implementation: state handling,
// rotation helpers and serialization share no code with it.
namespace refchacha {

std::vector<std::uint8_t> keystream(const std::uint8_t key[32], const std::uint8_t nonce[8],
                                    std::uint64_t start_block, std::size_t nbytes);

}  // namespace refchacha
