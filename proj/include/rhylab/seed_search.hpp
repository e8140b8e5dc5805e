#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rhylab/fleet.hpp"
#include "rhylab/file_meta.hpp"
#include "rhylab/oracle.hpp"

namespace rhylab {

// Candidate seeds are scanned downward: high, high-1, ..., high-span+1
// (clamped at zero). high normally sits at the earliest mtime in whole
// seconds, since the seed is the encryption start time.
struct SeedWindow {
    std::uint32_t high = 0;
    std::uint64_t span = 0;

    static constexpr std::uint64_t kFullSpan = 1ull << 32;
};

// First files by mtime, enough that at least one file encrypted with some
// thread's first key is present: the first P when fewer than P files share
// the earliest mtime, else the first P*N where N is minimal with P*N
// covering the overlap.
struct CandidateSelection {
    std::vector<FileMeta> files;
    std::size_t earliest_overlap = 0;
    int n = 1;
};

CandidateSelection select_candidates(std::span<const FileMeta> encrypted_files, int processors);

// A first window shorter than this cannot tell a right key from a lucky
// wrong one across a multi-thousand-seed scan; such candidates are carried
// but never used as evidence.
constexpr std::uint64_t kMinTrialWindow = 8;

// Candidate with its ciphertext prefix preloaded so a seed trial never
// touches the disk. Unreadable or malformed candidates carry a diagnostic
// and are skipped by trials rather than aborting the scan.
struct PreparedCandidate {
    FileMeta meta;
    std::uint64_t original_size = 0;
    std::uint64_t window_len = 0;
    Bytes cipher_prefix;
    std::string error;

    bool usable() const { return error.empty() && window_len >= kMinTrialWindow; }
};

std::vector<PreparedCandidate> prepare_candidates(const std::filesystem::path& corpus_root,
                                                  std::span<const FileMeta> files,
                                                  std::size_t prefix_need);

struct TrialHit {
    std::size_t candidate_index;
    int thread_id;
};

// Decrypts every candidate's first window with every thread's first key
// for one seed; returns all (file, thread) pairs the oracle accepts.
// Candidates below kMinTrialWindow are skipped, never validated.
std::vector<TrialHit> trial_decrypt_firsts(std::uint32_t seed,
                                           const std::filesystem::path& corpus_root,
                                           std::span<const PreparedCandidate> candidates,
                                           int processors, Arch arch, EntropyByteMode entropy_mode,
                                           const ValidityOracle& oracle);

struct SearchResult {
    std::optional<std::uint32_t> seed;
    std::vector<TrialHit> hits;  // confirmed hits at the found seed
    std::uint64_t seeds_tried = 0;
    double elapsed_seconds = 0.0;
    double seeds_per_second = 0.0;
};

struct SearchOptions {
    int jobs = 1;
    bool progress = false;                  // status lines on stderr
    double progress_interval_seconds = 2.0;
};

// Deterministic parallel scan: seeds are sharded into fixed blocks claimed
// in descending-seed order, and the result is the confirmed hit closest to
// window.high regardless of worker count.
SearchResult search(const SeedWindow& window, const std::filesystem::path& corpus_root,
                    std::span<const FileMeta> encrypted_files, int processors, Arch arch,
                    EntropyByteMode entropy_mode, const ValidityOracle& oracle,
                    const SearchOptions& opts = {});

}  // namespace rhylab
