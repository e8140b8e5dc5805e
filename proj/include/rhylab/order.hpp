#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rhylab/file_meta.hpp"

namespace rhylab {

// Per-thread push lists recovered by replaying the round-robin rule over
// the traversal order: the j-th file (0-based) went to thread (j mod P)+1.
// Index t-1 of the result holds thread t's files in push order.
std::vector<std::vector<FileMeta>> replay_assignment(std::span<const FileMeta> traversal_order,
                                                     int processors);

// One file inside a thread's inferred encryption order. Candidate key
// indices form the inclusive 1-based range [lo, hi]; files with a unique
// mtime get lo == hi. group numbers files sharing an mtime.
struct OrderEntry {
    FileMeta meta;
    std::size_t push_pos = 0;  // position within the thread's push list
    int lo = 0;
    int hi = 0;
    int group = 0;
};

// Sorts one thread's files by mtime (stable on push order) and assigns
// candidate ranges: a maximal run of equal mtimes occupying sorted ranks
// [a..b] gives every member the candidate set {a..b}.
std::vector<OrderEntry> infer_order(std::span<const FileMeta> thread_files);

struct OrderHypothesis {
    int processors = 0;
    std::vector<std::vector<OrderEntry>> threads;  // index t-1 for thread t
};

// encrypted_only drops unencrypted entries from each thread's list after
// the positional replay: they occupy push slots but consumed no key.
OrderHypothesis build_hypothesis(std::span<const FileMeta> traversal_order, int processors,
                                 bool encrypted_only = false);

// How many files can plausibly complete within one mtime tick, and the
// combined-size ceiling for each count. Advisory only; never prunes
// candidate sets.
struct CollisionCapacity {
    int max_files = 0;
    std::vector<std::pair<int, std::uint64_t>> size_bound_per_k;  // (k, max combined bytes)
};

CollisionCapacity collision_capacity(std::uint64_t clock_hz, std::uint32_t key_schedule_cycles,
                                     std::uint32_t cycles_per_byte, std::uint32_t tick_us);

void write_order_report(std::ostream& out, const OrderHypothesis& hyp);

}  // namespace rhylab
