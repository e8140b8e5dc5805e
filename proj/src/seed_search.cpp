#include "rhylab/seed_search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rhylab/crypto/aes_ctr.hpp"
#include "rhylab/footer.hpp"
#include "rhylab/offset_plan.hpp"

namespace rhylab {

namespace fs = std::filesystem;

CandidateSelection select_candidates(std::span<const FileMeta> encrypted_files, int processors) {
    if (encrypted_files.empty()) throw std::invalid_argument("select_candidates: no encrypted files");
    if (processors < 1) throw std::invalid_argument("select_candidates: processors must be >= 1");

    std::vector<FileMeta> sorted(encrypted_files.begin(), encrypted_files.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const FileMeta& a, const FileMeta& b) {
        return a.mtime_ticks < b.mtime_ticks;
    });

    CandidateSelection sel;
    std::size_t overlap = 1;
    while (overlap < sorted.size() && sorted[overlap].mtime_ticks == sorted[0].mtime_ticks)
        ++overlap;
    sel.earliest_overlap = overlap;

    const std::size_t p = static_cast<std::size_t>(processors);
    std::size_t take;
    if (overlap < p) {
        sel.n = 1;
        take = p;
    } else {
        // Smallest N with P*N covering every file that shares the earliest
        // mtime; that group always contains some thread's first file.
        sel.n = static_cast<int>((overlap + p - 1) / p);
        take = p * static_cast<std::size_t>(sel.n);
    }
    take = std::min(take, sorted.size());
    sel.files.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take));
    return sel;
}

std::vector<PreparedCandidate> prepare_candidates(const fs::path& corpus_root,
                                                  std::span<const FileMeta> files,
                                                  std::size_t prefix_need) {
    std::vector<PreparedCandidate> out;
    out.reserve(files.size());
    for (const auto& meta : files) {
        PreparedCandidate c;
        c.meta = meta;
        if (meta.size < kFooterBytes) {
            c.error = "shorter than the 0x40C footer, not Rhysida-shaped";
            out.push_back(std::move(c));
            continue;
        }
        c.original_size = meta.size - kFooterBytes;
        auto plan = offset_plan(c.original_size);
        c.window_len = plan.windows.empty() ? 0 : plan.windows.front().length;

        std::size_t want = static_cast<std::size_t>(
            std::min<std::uint64_t>(prefix_need, c.window_len));
        if (want > 0) {
            std::ifstream in(corpus_root / meta.path, std::ios::binary);
            if (!in) {
                c.error = "cannot open";
            } else {
                c.cipher_prefix.resize(want);
                if (!in.read(reinterpret_cast<char*>(c.cipher_prefix.data()),
                             static_cast<std::streamsize>(want))) {
                    c.error = "short read";
                    c.cipher_prefix.clear();
                }
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

struct TrialScratch {
    PrngFleet fleet;
    std::vector<std::array<std::uint8_t, 48>> firsts;  // per thread: key || iv
    std::vector<crypto::Aes256CtrLe> ctrs;             // per thread, keyed per seed
    Bytes plain;
};

// Prefix-level trial: no disk access, no confirmation.
void trial_prefix_hits(std::uint32_t seed, std::span<const PreparedCandidate> candidates,
                       int processors, Arch arch, EntropyByteMode entropy_mode,
                       const ValidityOracle& oracle, TrialScratch& scratch,
                       std::vector<TrialHit>& hits) {
    hits.clear();
    scratch.fleet.reinit(seed, processors, arch, entropy_mode);
    scratch.firsts.resize(static_cast<std::size_t>(processors) + 1);
    scratch.ctrs.resize(static_cast<std::size_t>(processors) + 1);
    for (int t = 1; t <= processors; ++t) {
        auto& first = scratch.firsts[static_cast<std::size_t>(t)];
        scratch.fleet.thread_rng(t).read(ByteSpan(first.data(), 48));
        scratch.ctrs[static_cast<std::size_t>(t)].reset(ByteView(first.data(), 32),
                                                        ByteView(first.data() + 32, 16));
    }

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& cand = candidates[ci];
        if (!cand.usable()) continue;
        scratch.plain.resize(cand.cipher_prefix.size());
        for (int t = 1; t <= processors; ++t) {
            std::memcpy(scratch.plain.data(), cand.cipher_prefix.data(),
                        cand.cipher_prefix.size());
            scratch.ctrs[static_cast<std::size_t>(t)].xor_range(ByteSpan(scratch.plain), 0);
            if (oracle.match_prefix(cand.meta, ByteView(scratch.plain)))
                hits.push_back({ci, t});
        }
    }
}

// Full first-window confirmation for one prefix-level hit.
bool confirm_hit(const fs::path& corpus_root, const PreparedCandidate& cand,
                 const std::array<std::uint8_t, 48>& first, const ValidityOracle& oracle) {
    Bytes window(static_cast<std::size_t>(cand.window_len));
    if (!window.empty()) {
        std::ifstream in(corpus_root / cand.meta.path, std::ios::binary);
        if (!in) return false;
        if (!in.read(reinterpret_cast<char*>(window.data()),
                     static_cast<std::streamsize>(window.size())))
            return false;
        crypto::Aes256CtrLe ctr(ByteView(first.data(), 32), ByteView(first.data() + 32, 16));
        ctr.xor_range(ByteSpan(window), 0);
    }
    return oracle.match_prefix(cand.meta,
                               ByteView(window).subspan(
                                   0, std::min(oracle.prefix_bytes(), window.size()))) &&
           oracle.confirm(cand.meta, ByteView(window));
}

}  // namespace

std::vector<TrialHit> trial_decrypt_firsts(std::uint32_t seed, const fs::path& corpus_root,
                                           std::span<const PreparedCandidate> candidates,
                                           int processors, Arch arch, EntropyByteMode entropy_mode,
                                           const ValidityOracle& oracle) {
    if (candidates.empty()) throw std::invalid_argument("trial_decrypt_firsts: no candidates");
    TrialScratch scratch;
    std::vector<TrialHit> prefix_hits;
    trial_prefix_hits(seed, candidates, processors, arch, entropy_mode, oracle, scratch,
                      prefix_hits);
    std::vector<TrialHit> confirmed;
    for (const auto& hit : prefix_hits) {
        if (confirm_hit(corpus_root, candidates[hit.candidate_index],
                        scratch.firsts[static_cast<std::size_t>(hit.thread_id)], oracle))
            confirmed.push_back(hit);
    }
    return confirmed;
}

SearchResult search(const SeedWindow& window, const fs::path& corpus_root,
                    std::span<const FileMeta> encrypted_files, int processors, Arch arch,
                    EntropyByteMode entropy_mode, const ValidityOracle& oracle,
                    const SearchOptions& opts) {
    if (window.span == 0) throw std::invalid_argument("search: empty seed window");
    int jobs = std::max(1, opts.jobs);

    CandidateSelection sel = select_candidates(encrypted_files, processors);
    auto candidates = prepare_candidates(corpus_root, sel.files, oracle.prefix_bytes());
    bool any_usable = false;
    for (const auto& c : candidates) any_usable = any_usable || c.usable();
    if (!any_usable)
        throw std::runtime_error(
            "search: no candidate file has a first window large enough to validate");

    // Number of seeds actually available going down from high.
    const std::uint64_t span = std::min(window.span, static_cast<std::uint64_t>(window.high) + 1);
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t nblocks = (span + kBlock - 1) / kBlock;

    std::atomic<std::uint64_t> next_block{0};
    std::atomic<std::uint64_t> best_hit_block{nblocks};  // lowest block index with a hit so far
    std::atomic<std::uint64_t> seeds_tried{0};
    std::atomic<bool> resolved{false};

    struct BlockOutcome {
        bool done = false;
        bool hit = false;
        std::uint32_t seed = 0;
    };
    std::vector<BlockOutcome> outcomes(nblocks);
    std::mutex frontier_mutex;
    std::uint64_t frontier = 0;
    std::optional<std::uint32_t> found_seed;

    auto worker = [&]() {
        TrialScratch scratch;
        std::vector<TrialHit> prefix_hits;
        for (;;) {
            if (resolved.load(std::memory_order_relaxed)) return;
            std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= nblocks) return;
            if (b > best_hit_block.load(std::memory_order_relaxed)) {
                // A hit in an earlier (higher-seed) block already covers this one.
                std::lock_guard<std::mutex> lock(frontier_mutex);
                outcomes[b].done = true;
                continue;
            }

            BlockOutcome outcome;
            outcome.done = true;
            std::uint64_t lo = b * kBlock;
            std::uint64_t hi = std::min(lo + kBlock, span);
            for (std::uint64_t i = lo; i < hi; ++i) {
                std::uint32_t seed = static_cast<std::uint32_t>(window.high - i);
                trial_prefix_hits(seed, candidates, processors, arch, entropy_mode, oracle,
                                  scratch, prefix_hits);
                seeds_tried.fetch_add(1, std::memory_order_relaxed);
                bool confirmed = false;
                for (const auto& hit : prefix_hits) {
                    if (confirm_hit(corpus_root, candidates[hit.candidate_index],
                                    scratch.firsts[static_cast<std::size_t>(hit.thread_id)],
                                    oracle)) {
                        confirmed = true;
                        break;
                    }
                }
                if (confirmed) {
                    outcome.hit = true;
                    outcome.seed = seed;
                    std::uint64_t cur = best_hit_block.load(std::memory_order_relaxed);
                    while (b < cur &&
                           !best_hit_block.compare_exchange_weak(cur, b, std::memory_order_relaxed)) {
                    }
                    break;
                }
            }

            std::lock_guard<std::mutex> lock(frontier_mutex);
            outcomes[b] = outcome;
            while (frontier < nblocks && outcomes[frontier].done) {
                if (outcomes[frontier].hit) {
                    found_seed = outcomes[frontier].seed;
                    resolved.store(true, std::memory_order_relaxed);
                    break;
                }
                ++frontier;
            }
        }
    };

    auto start = std::chrono::steady_clock::now();
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);

    if (opts.progress) {
        auto last = start;
        while (true) {
            bool all_done = resolved.load() || next_block.load() > nblocks + static_cast<std::uint64_t>(jobs);
            auto now = std::chrono::steady_clock::now();
            std::uint64_t tried = seeds_tried.load();
            if (tried >= span || all_done) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            if (std::chrono::duration<double>(now - last).count() >= opts.progress_interval_seconds) {
                double elapsed = std::chrono::duration<double>(now - start).count();
                double rate = elapsed > 0 ? static_cast<double>(tried) / elapsed : 0.0;
                double pct = 100.0 * static_cast<double>(tried) / static_cast<double>(span);
                double eta = rate > 0 ? static_cast<double>(span - tried) / rate : 0.0;
                std::fprintf(stderr, "search: tried=%llu/%llu (%.1f%%) rate=%.0f/s eta=%.0fs\n",
                             static_cast<unsigned long long>(tried),
                             static_cast<unsigned long long>(span), pct, rate, eta);
                last = now;
            }
        }
    }
    for (auto& t : threads) t.join();

    // Workers stop as soon as the frontier resolves; make the in-order scan
    // final even if later blocks finished first.
    {
        std::lock_guard<std::mutex> lock(frontier_mutex);
        while (!found_seed && frontier < nblocks && outcomes[frontier].done) {
            if (outcomes[frontier].hit) found_seed = outcomes[frontier].seed;
            ++frontier;
        }
    }

    SearchResult result;
    result.seed = found_seed;
    result.seeds_tried = seeds_tried.load();
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.seeds_per_second =
        result.elapsed_seconds > 0 ? static_cast<double>(result.seeds_tried) / result.elapsed_seconds
                                   : 0.0;
    if (found_seed) {
        result.hits = trial_decrypt_firsts(*found_seed, corpus_root, candidates, processors, arch,
                                           entropy_mode, oracle);
    }
    return result;
}

}  // namespace rhylab
