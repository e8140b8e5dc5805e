#pragma once

#include <cstdint>
#include <vector>

namespace rhylab {

constexpr std::uint64_t kMiB = 1024ull * 1024ull;
constexpr std::uint64_t kEncryptWindow = kMiB;

struct Window {
    std::uint64_t offset;
    std::uint64_t length;

    bool operator==(const Window&) const = default;
};

// The intermittent-encryption window set for one file:
//   div = 4                    if size >= 4 MiB
//       = floor(size / 1 MiB)  if 1 MiB <= size < 4 MiB
//       = 1                    otherwise
//   offsets = { floor(size/div) * i : i in 0..div-1 }
// with 1 MiB encrypted per offset, clipped at end of file.
struct OffsetPlan {
    std::uint32_t div = 1;
    std::vector<Window> windows;

    std::uint64_t encrypted_bytes() const {
        std::uint64_t total = 0;
        for (const auto& w : windows) total += w.length;
        return total;
    }
};

OffsetPlan offset_plan(std::uint64_t file_size);

}  // namespace rhylab
