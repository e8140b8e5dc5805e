#include "rhylab/fleet.hpp"

#include <stdexcept>
#include <string>

namespace rhylab {

Arch parse_arch(const std::string& s) {
    if (s == "x86" || s == "X86") return Arch::X86;
    if (s == "x64" || s == "X64") return Arch::X64;
    throw std::invalid_argument("unknown arch: " + s);
}

const char* arch_name(Arch arch) { return arch == Arch::X86 ? "x86" : "x64"; }

EntropyBlock derive_entropy(MsvcLcg& lcg, EntropyByteMode mode) {
    EntropyBlock block;
    for (auto& b : block) b = lcg.next_byte(mode);
    return block;
}

ChaChaPrng prng_init(const EntropyBlock& entropy, Arch arch) {
    ChaChaPrng prng(ByteView(entropy.data(), 32), ByteView(entropy.data() + 32, 8));
    std::array<std::uint8_t, 8> ready_check;
    prng.read(ByteSpan(ready_check.data(), discard_bytes(arch)));
    return prng;
}

void PrngFleet::reinit(std::uint32_t time_seed, int processors, Arch arch, EntropyByteMode mode) {
    if (processors < 1) throw std::invalid_argument("PrngFleet: processors must be >= 1");
    processors_ = processors;
    arch_ = arch;
    generators_.resize(static_cast<std::size_t>(processors) + 1);

    // One continuing rand() stream feeds every generator, in creation order.
    MsvcLcg lcg(time_seed);
    for (auto& gen : generators_) {
        EntropyBlock entropy = derive_entropy(lcg, mode);
        gen.reset(ByteView(entropy.data(), 32), ByteView(entropy.data() + 32, 8));
        std::array<std::uint8_t, 8> ready_check;
        gen.read(ByteSpan(ready_check.data(), discard_bytes(arch)));
    }
}

ChaChaPrng& PrngFleet::thread_rng(int thread_id) {
    if (thread_id < 1 || thread_id > processors_)
        throw std::out_of_range("PrngFleet: thread id out of range");
    return generators_[static_cast<std::size_t>(thread_id)];
}

const ChaChaPrng& PrngFleet::thread_rng(int thread_id) const {
    if (thread_id < 1 || thread_id > processors_)
        throw std::out_of_range("PrngFleet: thread id out of range");
    return generators_[static_cast<std::size_t>(thread_id)];
}

}  // namespace rhylab
