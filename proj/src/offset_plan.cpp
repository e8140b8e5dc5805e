#include "rhylab/offset_plan.hpp"

namespace rhylab {

OffsetPlan offset_plan(std::uint64_t file_size) {
    OffsetPlan plan;
    if (file_size == 0) return plan;  // footer-only degenerate case

    if (file_size >= 4 * kMiB) {
        plan.div = 4;
    } else if (file_size >= kMiB) {
        plan.div = static_cast<std::uint32_t>(file_size / kMiB);
    } else {
        plan.div = 1;
    }

    std::uint64_t stride = file_size / plan.div;
    plan.windows.reserve(plan.div);
    for (std::uint32_t i = 0; i < plan.div; ++i) {
        std::uint64_t offset = stride * i;
        std::uint64_t length = std::min(kEncryptWindow, file_size - offset);
        plan.windows.push_back({offset, length});
    }
    return plan;
}

}  // namespace rhylab
