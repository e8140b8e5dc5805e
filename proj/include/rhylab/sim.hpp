#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rhylab/crypto/rsa_oaep.hpp"
#include "rhylab/fleet.hpp"
#include "rhylab/offset_plan.hpp"
#include "rhylab/footer.hpp"
#include "rhylab/traverse.hpp"
#include "rhylab/util.hpp"

namespace rhylab {

struct SimConfig {
    std::uint32_t time_seed = 0;
    int processors = 1;
    Arch arch = Arch::X64;
    int stack_capacity = 16;
    std::uint32_t tick_us = 1;  // mtime tick; must divide 1'000'000
    std::uint64_t clock_hz = 6'000'000'000ull;
    std::uint32_t key_schedule_cycles = 1400;
    std::uint32_t cycles_per_byte = 18;
    std::uint64_t interleave_seed = 1;
    // Ticks between the seed instant and the first possible completion;
    // models process startup plus traversal latency.
    std::uint64_t start_offset_ticks = 1'000'000;
    EntropyByteMode entropy_mode = EntropyByteMode::LowByte;
    std::uint64_t rsa_seed = 0;  // 0 -> derived from time_seed and interleave_seed
    std::array<std::uint8_t, kVersionBytes> version = kDefaultVersion;
    std::string marker_suffix = ".rhysida_sim";
    // Lab plumbing excluded from encryption (safety marker, reports).
    std::vector<std::string> exclude_names;

    std::uint64_t effective_rsa_seed() const {
        if (rsa_seed) return rsa_seed;
        return (static_cast<std::uint64_t>(time_seed) << 32) ^ interleave_seed ^ 0x5261686C79ULL;
    }
    std::uint64_t ticks_per_second() const { return 1'000'000ull / tick_us; }
    void validate() const;
};

// One stack pop, in global completion order.
struct PopEvent {
    std::size_t file_index;
    int thread_id;
};

// Full scheduler trace entry; pushes come from the main actor, pops from
// encryption threads.
struct SimEvent {
    enum class Kind { Push, Pop };
    Kind kind;
    std::size_t file_index;
    int thread_id;
};

// Round-robin push target for the j-th traversed file (0-based).
inline int push_target(std::size_t j, int processors) {
    return static_cast<int>(j % static_cast<std::size_t>(processors)) + 1;
}

// Replays the producer/consumer dance: the main actor pushes files in
// traversal order onto bounded per-thread stacks (blocking when the
// round-robin target is full), worker actors pop LIFO. Actor selection is
// driven by interleave_seed, so every disordered schedule is reproducible.
std::vector<SimEvent> schedule_events(std::size_t file_count, int processors, int capacity,
                                      std::uint64_t interleave_seed);

std::vector<PopEvent> schedule_pops(std::size_t file_count, int processors, int capacity,
                                    std::uint64_t interleave_seed);

// Ground truth emitted per file (without key material when keys=false).
struct OrderTruth {
    int thread_id = 0;
    int key_index = 0;
    std::int64_t mtime_ticks = 0;
};

// Metadata-only simulation: thread assignment, key indices and stamped
// mtimes for the given file sizes in traversal order. No I/O, no crypto.
std::vector<OrderTruth> simulate_order(const std::vector<std::uint64_t>& sizes,
                                       const SimConfig& config);

// AES-256-CTR over the offset plan (continuous keystream across windows)
// plus the 0x40C footer. oaep_seeds must be the 32 keystream bytes that
// follow key||iv in the file's 80-byte block.
Bytes encrypt_file_bytes(ByteView data, ByteView key32, ByteView iv16,
                         const crypto::RsaPublicKey& pub, ByteView oaep_seeds32,
                         const std::array<std::uint8_t, kVersionBytes>& version);

struct FileRecord {
    std::string path;          // original corpus-relative path
    std::uint64_t size = 0;    // original size
    int thread_id = 0;
    int key_index = 0;         // 1-based within the thread; 0 when not encrypted
    std::array<std::uint8_t, 32> key = {};
    std::array<std::uint8_t, 16> iv = {};
    std::int64_t mtime_ticks = 0;
    std::string status = "ok";  // "ok" or an error description
};

struct InfectionRecord {
    SimConfig config;
    crypto::RsaPrivateKey rsa;  // escrowed with the ground truth
    std::vector<FileRecord> files;  // traversal order
    std::vector<SkippedEntry> skipped;
    std::vector<std::uint64_t> generator_bytes_emitted;  // index 0..processors
};

// Encrypts every regular file under root in place: original bytes with
// plan windows replaced by ciphertext, footer appended, file renamed with
// the marker suffix and stamped with the modeled mtime.
InfectionRecord simulate_corpus(const std::filesystem::path& root, const SimConfig& config);

}  // namespace rhylab
