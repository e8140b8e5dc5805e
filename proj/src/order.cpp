#include "rhylab/order.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace rhylab {

std::vector<std::vector<FileMeta>> replay_assignment(std::span<const FileMeta> traversal_order,
                                                     int processors) {
    if (processors < 1) throw std::invalid_argument("replay_assignment: processors must be >= 1");
    std::vector<std::vector<FileMeta>> threads(static_cast<std::size_t>(processors));
    for (std::size_t j = 0; j < traversal_order.size(); ++j)
        threads[j % static_cast<std::size_t>(processors)].push_back(traversal_order[j]);
    return threads;
}

std::vector<OrderEntry> infer_order(std::span<const FileMeta> thread_files) {
    std::vector<OrderEntry> out;
    out.reserve(thread_files.size());
    for (std::size_t i = 0; i < thread_files.size(); ++i)
        out.push_back({thread_files[i], i, 0, 0, 0});

    // Stable on push order: presentation only, the candidate ranges carry
    // the actual ambiguity.
    std::stable_sort(out.begin(), out.end(), [](const OrderEntry& a, const OrderEntry& b) {
        return a.meta.mtime_ticks < b.meta.mtime_ticks;
    });

    std::size_t i = 0;
    int group = 0;
    while (i < out.size()) {
        std::size_t j = i;
        while (j < out.size() && out[j].meta.mtime_ticks == out[i].meta.mtime_ticks) ++j;
        for (std::size_t k = i; k < j; ++k) {
            out[k].lo = static_cast<int>(i) + 1;
            out[k].hi = static_cast<int>(j);
            out[k].group = group;
        }
        ++group;
        i = j;
    }
    return out;
}

OrderHypothesis build_hypothesis(std::span<const FileMeta> traversal_order, int processors,
                                 bool encrypted_only) {
    OrderHypothesis hyp;
    hyp.processors = processors;
    for (auto& thread_files : replay_assignment(traversal_order, processors)) {
        if (encrypted_only) {
            std::erase_if(thread_files, [](const FileMeta& m) { return !m.encrypted; });
        }
        hyp.threads.push_back(infer_order(thread_files));
    }
    return hyp;
}

CollisionCapacity collision_capacity(std::uint64_t clock_hz, std::uint32_t key_schedule_cycles,
                                     std::uint32_t cycles_per_byte, std::uint32_t tick_us) {
    if (clock_hz == 0 || key_schedule_cycles == 0 || cycles_per_byte == 0 || tick_us == 0)
        throw std::invalid_argument("collision_capacity: parameters must be positive");

    // Cycle budget within one tick.
    std::uint64_t budget = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(clock_hz) * tick_us) / 1'000'000);

    CollisionCapacity cap;
    cap.max_files = static_cast<int>(budget / key_schedule_cycles);
    for (int k = cap.max_files; k >= 1; --k) {
        std::uint64_t remaining = budget - static_cast<std::uint64_t>(k) * key_schedule_cycles;
        cap.size_bound_per_k.emplace_back(k, remaining / cycles_per_byte);
    }
    std::reverse(cap.size_bound_per_k.begin(), cap.size_bound_per_k.end());
    return cap;
}

void write_order_report(std::ostream& out, const OrderHypothesis& hyp) {
    out << "order-hypothesis processors=" << hyp.processors << "\n";
    for (std::size_t t = 0; t < hyp.threads.size(); ++t) {
        out << "thread " << (t + 1) << " files=" << hyp.threads[t].size() << "\n";
        for (const auto& e : hyp.threads[t]) {
            out << "  mtime=" << e.meta.mtime_ticks << " keys=" << e.lo;
            if (e.hi != e.lo) out << ".." << e.hi;
            out << " " << e.meta.logical_path << "\n";
        }
    }
}

}  // namespace rhylab
