#pragma once

#include <cstdint>

namespace rhylab {

// How a 15-bit rand() output is narrowed to one entropy byte.
enum class EntropyByteMode { LowByte, Low7Bit };

// The multiply-with-carry-free LCG behind msvcrt's rand()/srand(). MinGW
// binaries link against msvcrt, so this is the generator whose outputs
// seed the whole CSPRNG fleet.
class MsvcLcg {
  public:
    static constexpr std::uint32_t kMul = 214013u;
    static constexpr std::uint32_t kAdd = 2531011u;

    explicit MsvcLcg(std::uint32_t seed) : state_(seed) {}

    // One rand() call: value in [0, 32767].
    int next() {
        state_ = state_ * kMul + kAdd;
        return static_cast<int>((state_ >> 16) & 0x7FFF);
    }

    std::uint8_t next_byte(EntropyByteMode mode = EntropyByteMode::LowByte) {
        int v = next();
        return static_cast<std::uint8_t>(mode == EntropyByteMode::LowByte ? (v & 0xFF)
                                                                          : (v & 0x7F));
    }

    std::uint32_t state() const { return state_; }

  private:
    std::uint32_t state_;
};

}  // namespace rhylab
