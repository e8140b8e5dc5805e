#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rhylab/chacha20.hpp"
#include "rhylab/lcg.hpp"

namespace rhylab {

enum class Arch { X86, X64 };

// Bytes discarded right after keying a generator: the ready-check reads
// sizeof(long) bytes, 4 on x86 and 8 on x64.
constexpr std::size_t discard_bytes(Arch arch) { return arch == Arch::X86 ? 4 : 8; }

Arch parse_arch(const std::string& s);
const char* arch_name(Arch arch);

constexpr std::size_t kEntropyBytes = 40;
using EntropyBlock = std::array<std::uint8_t, kEntropyBytes>;

// Consumes exactly 40 LCG steps from the shared rand() stream.
EntropyBlock derive_entropy(MsvcLcg& lcg, EntropyByteMode mode = EntropyByteMode::LowByte);

// Keys a generator from a 40-byte entropy block (first 32 bytes -> key,
// last 8 -> nonce) and burns the arch-dependent ready-check bytes.
ChaChaPrng prng_init(const EntropyBlock& entropy, Arch arch);

// The processors+1 generators the encryptor sets up from one time seed.
// Index 0 is created but never consulted; generator i serves thread i.
class PrngFleet {
  public:
    PrngFleet() = default;
    PrngFleet(std::uint32_t time_seed, int processors, Arch arch,
              EntropyByteMode mode = EntropyByteMode::LowByte) {
        reinit(time_seed, processors, arch, mode);
    }

    // Rebuilds in place; keeps allocations for tight seed-scan loops.
    void reinit(std::uint32_t time_seed, int processors, Arch arch,
                EntropyByteMode mode = EntropyByteMode::LowByte);

    int processors() const { return processors_; }
    Arch arch() const { return arch_; }

    // 1-based thread id; index 0 is not reachable through this accessor.
    ChaChaPrng& thread_rng(int thread_id);
    const ChaChaPrng& thread_rng(int thread_id) const;

    // The never-used generator 0, exposed for accounting checks only.
    const ChaChaPrng& unused_rng() const { return generators_.at(0); }

    std::size_t size() const { return generators_.size(); }

  private:
    std::vector<ChaChaPrng> generators_;
    int processors_ = 0;
    Arch arch_ = Arch::X64;
};

}  // namespace rhylab
