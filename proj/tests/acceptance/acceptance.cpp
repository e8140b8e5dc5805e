// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run directly or through ctest; exits nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "rhylab/decryptor.hpp"
#include "rhylab/manifest.hpp"
#include "rhylab/oracle.hpp"
#include "rhylab/order.hpp"
#include "rhylab/seed_search.hpp"
#include "rhylab/sim.hpp"
#include "rhylab/traverse.hpp"
#include "support/corpus.hpp"
#include "support/ref_msvc.hpp"

using namespace rhylab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s  C%d  %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::uint64_t acceptance_seed() {
    if (const char* env = std::getenv("RHYLAB_ACCEPT_SEED")) return std::stoull(env);
    return 20240614;  // fixed placement by default; override to fuzz
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared state: criterion 1 builds the big corpus; 3 and 8 inspect it.
struct BigRun {
    std::unique_ptr<testcorpus::TempDir> tmp;
    fs::path corpus;
    fs::path snapshot;
    SimConfig config;
    InfectionRecord record;
    bool ok = false;
};
BigRun g_big;

std::vector<std::uint64_t> big_corpus_sizes(SplitMix64& rng) {
    std::vector<std::uint64_t> sizes;
    // >=20% tiny files inside the k=2 collision byte bound.
    for (int i = 0; i < 150; ++i) sizes.push_back(rng.next() % 178);
    for (int i = 0; i < 150; ++i) sizes.push_back(178 + rng.next() % (64 * 1024));
    for (int i = 0; i < 80; ++i) sizes.push_back(64 * 1024 + rng.next() % (kMiB - 64 * 1024));
    for (int i = 0; i < 40; ++i) sizes.push_back(kMiB + rng.next() % kMiB);
    for (int i = 0; i < 30; ++i) sizes.push_back(2 * kMiB + rng.next() % kMiB);
    for (int i = 0; i < 20; ++i) sizes.push_back(3 * kMiB + rng.next() % kMiB);
    for (int i = 0; i < 22; ++i) sizes.push_back(4 * kMiB + rng.next() % (4 * kMiB));
    // Pin every Eq.-branch boundary explicitly.
    for (std::uint64_t s : {std::uint64_t{0}, std::uint64_t{1}, kMiB - 1, kMiB, 2 * kMiB - 1,
                            2 * kMiB, 3 * kMiB, 4 * kMiB - 1, 4 * kMiB, 8 * kMiB})
        sizes.push_back(s);
    // 502 entries now; trim to exactly 500 keeping the pinned tail.
    sizes.erase(sizes.begin() + 100, sizes.begin() + 102);
    return sizes;
}

void criterion1_end_to_end() {
    auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(acceptance_seed());

    g_big.tmp = std::make_unique<testcorpus::TempDir>("accept1");
    g_big.corpus = g_big.tmp->path() / "corpus";
    g_big.snapshot = g_big.tmp->path() / "snapshot";

    auto sizes = big_corpus_sizes(rng);
    if (sizes.size() != 500) {
        report(1, false, "internal: corpus size count != 500");
        return;
    }
    testcorpus::build_corpus(g_big.corpus, sizes, {.content_seed = rng.next()});
    testcorpus::copy_tree(g_big.corpus, g_big.snapshot);
    auto want = testcorpus::tree_digests(g_big.snapshot);

    SimConfig& config = g_big.config;
    config.time_seed = 1'700'000'000 + static_cast<std::uint32_t>(rng.next() % 1'000'000);
    config.processors = 4;
    config.stack_capacity = 16;
    config.interleave_seed = rng.next();
    // Seed placed uniformly within 2^16 seconds below the earliest mtime.
    std::uint64_t gap_seconds = rng.next() % (1ull << 16);
    config.start_offset_ticks = gap_seconds * 1'000'000 + rng.next() % 1'000'000;

    g_big.record = simulate_corpus(g_big.corpus, config);
    double sim_elapsed = seconds_since(t0);

    // Recovery sees only the encrypted tree plus the snapshot-derived oracle.
    TraverseOptions topts;
    topts.marker_suffix = config.marker_suffix;
    auto walk = traverse(g_big.corpus, topts);
    std::vector<FileMeta> encrypted;
    for (const auto& f : walk.files)
        if (f.encrypted) encrypted.push_back(f);

    auto oracle = KnownPlaintextOracle::from_snapshot(g_big.snapshot);

    std::int64_t earliest = encrypted.front().mtime_ticks;
    for (const auto& m : encrypted) earliest = std::min(earliest, m.mtime_ticks);
    SeedWindow window{static_cast<std::uint32_t>(earliest / 1'000'000), (1ull << 16) + 2};

    SearchResult found = search(window, g_big.corpus, encrypted, config.processors, config.arch,
                                config.entropy_mode, oracle, {.jobs = 2});
    if (!found.seed || *found.seed != config.time_seed) {
        report(1, false, "seed search failed (planted " + std::to_string(config.time_seed) +
                             ", gap " + std::to_string(gap_seconds) + "s)");
        return;
    }

    OrderHypothesis hyp = build_hypothesis(walk.files, config.processors, true);
    RecoveryReport rec = decrypt_corpus(g_big.corpus, *found.seed, config.arch,
                                        config.entropy_mode, hyp, oracle, {.jobs = 2});

    std::size_t mismatched = 0;
    for (const auto& [path, digest] : want) {
        std::ifstream in(g_big.corpus / path, std::ios::binary);
        if (!in) {
            ++mismatched;
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string content = ss.str();
        if (crypto::digest_hex(crypto::Sha256::hash(ByteView(
                reinterpret_cast<const std::uint8_t*>(content.data()), content.size()))) !=
            digest)
            ++mismatched;
    }

    double elapsed = seconds_since(t0);
    bool pass = rec.recovered == 500 && rec.ambiguous == 0 && rec.failed == 0 &&
                mismatched == 0 && elapsed < 120.0;
    std::ostringstream detail;
    detail << "end-to-end: 500 files, P=4, seed gap " << gap_seconds << "s, recovered "
           << rec.recovered << "/500, byte-mismatches " << mismatched << ", sim "
           << static_cast<int>(sim_elapsed) << "s, total " << static_cast<int>(elapsed) << "s";
    g_big.ok = pass;
    report(1, pass, detail.str());
}

void criterion2_collision_bounds() {
    auto cap = collision_capacity(6'000'000'000ull, 1400, 18, 1);
    bool pass = cap.max_files == 4 && cap.size_bound_per_k.size() == 4 &&
                cap.size_bound_per_k[3] == std::pair<int, std::uint64_t>{4, 22} &&
                cap.size_bound_per_k[2] == std::pair<int, std::uint64_t>{3, 100} &&
                cap.size_bound_per_k[1] == std::pair<int, std::uint64_t>{2, 177};
    std::ostringstream detail;
    detail << "collision capacity at 6 GHz / 1 us tick:";
    for (auto& [k, b] : cap.size_bound_per_k) detail << " k=" << k << ":" << b << "B";
    report(2, pass, detail.str());
}

void criterion3_footer_arithmetic() {
    if (!g_big.tmp) {
        report(3, false, "skipped: criterion 1 corpus unavailable");
        return;
    }
    std::size_t checked = 0, bad = 0;
    for (const auto& f : g_big.record.files) {
        fs::path enc = g_big.corpus / (f.path + g_big.config.marker_suffix);
        if (!fs::exists(enc) || fs::file_size(enc) != f.size + 0x40C) ++bad;
        ++checked;
    }
    report(3, bad == 0 && checked == 500,
           "footer arithmetic: " + std::to_string(checked - bad) + "/" +
               std::to_string(checked) + " files exactly original+0x40C");
}

void criterion4_ctr_involution() {
    SplitMix64 rng(777);
    std::vector<std::uint64_t> sizes = {0, 1, kMiB - 1, kMiB, 2 * kMiB - 1, 4 * kMiB};
    while (sizes.size() < 1000) {
        if (sizes.size() % 10 == 6) {
            sizes.push_back(rng.next() % (4 * kMiB));  // exercise wide bodies
        } else {
            sizes.push_back(rng.next() % 8192);
        }
    }

    std::size_t bad = 0;
    Bytes key(32), iv(16);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        for (auto& b : key) b = static_cast<std::uint8_t>(rng.next());
        for (auto& b : iv) b = static_cast<std::uint8_t>(rng.next());
        Bytes data = testcorpus::make_content(sizes[i], rng.next(), false);
        Bytes work = data;
        decrypt_body(ByteSpan(work), ByteView(key), ByteView(iv));
        if (sizes[i] > 0 && work == data) ++bad;
        decrypt_body(ByteSpan(work), ByteView(key), ByteView(iv));
        if (work != data) ++bad;
    }
    report(4, bad == 0,
           "ctr involution: 1000 (size,key,iv) triples incl. div-branch boundaries, " +
               std::to_string(bad) + " failures");
}

void criterion5_lcg_oracle() {
    SplitMix64 rng(0x1C6);
    std::size_t bad = 0;
    for (int s = 0; s < 100; ++s) {
        std::uint32_t seed = static_cast<std::uint32_t>(rng.next());
        MsvcLcg lcg(seed);
        for (std::uint64_t k = 1; k <= 10'000; ++k) {
            if (lcg.next() != refmsvc::output_at(seed, k)) {
                ++bad;
                break;
            }
        }
    }
    // Pin to the real runtime with its published first outputs.
    MsvcLcg one(1);
    static const int kSeed1[5] = {41, 18467, 6334, 26500, 19169};
    for (int v : kSeed1)
        if (one.next() != v) ++bad;
    report(5, bad == 0,
           "lcg oracle: 100 seeds x 10^4 outputs vs closed-form + published vectors, " +
               std::to_string(bad) + " mismatches");
}

void criterion6_order_soundness() {
    SplitMix64 rng(0x02D32);
    static const int kP[] = {1, 2, 4, 8};
    static const int kCap[] = {1, 4, 16};
    std::size_t violations = 0, sims = 0, singleton_errors = 0, distinct_sims = 0;

    for (int trial = 0; trial < 1000; ++trial) {
        SimConfig c;
        c.time_seed = static_cast<std::uint32_t>(rng.next());
        c.processors = kP[rng.next() % 4];
        c.stack_capacity = kCap[rng.next() % 3];
        c.interleave_seed = rng.next();

        bool force_distinct = trial % 5 == 0;
        std::vector<std::uint64_t> sizes(1 + rng.next() % 50);
        for (auto& s : sizes)
            s = force_distinct ? 1000 + rng.next() % 50'000
                               : ((rng.next() % 2) ? rng.next() % 178 : rng.next() % 20'000);

        auto truth = simulate_order(sizes, c);
        std::vector<FileMeta> metas(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            metas[i].path = std::to_string(i);
            metas[i].logical_path = metas[i].path;
            metas[i].size = sizes[i];
            metas[i].mtime_ticks = truth[i].mtime_ticks;
            metas[i].encrypted = true;
        }

        auto hyp = build_hypothesis(metas, c.processors);
        bool all_singleton = true;
        for (std::size_t t = 0; t < hyp.threads.size(); ++t) {
            for (const auto& e : hyp.threads[t]) {
                std::size_t idx = std::stoul(e.meta.path);
                if (truth[idx].thread_id != static_cast<int>(t) + 1 ||
                    truth[idx].key_index < e.lo || truth[idx].key_index > e.hi)
                    ++violations;
                if (e.lo == e.hi && truth[idx].key_index != e.lo) ++singleton_errors;
                all_singleton = all_singleton && e.lo == e.hi;
            }
        }
        if (force_distinct) {
            ++distinct_sims;
            if (!all_singleton) ++violations;  // big files must never collide
        }
        ++sims;
    }
    report(6, violations == 0 && singleton_errors == 0,
           "order soundness: " + std::to_string(sims) + " randomized sims (" +
               std::to_string(distinct_sims) + " all-distinct), " + std::to_string(violations) +
               " candidate-set violations, " + std::to_string(singleton_errors) +
               " singleton errors");
}

void criterion7_search_determinism_and_throughput() {
    testcorpus::TempDir tmp("accept7");
    fs::path corpus = tmp.path() / "corpus";
    fs::path snapshot = tmp.path() / "snap";
    std::vector<std::uint64_t> sizes(4, kMiB + 512);  // 1 MiB-window candidates
    testcorpus::build_corpus(corpus, sizes, {.text_fraction = 0.0});
    testcorpus::copy_tree(corpus, snapshot);

    SimConfig config;
    config.time_seed = 1'700'500'000;
    config.processors = 4;
    config.interleave_seed = 5;
    config.start_offset_ticks = 9'000'000;
    simulate_corpus(corpus, config);

    auto oracle = KnownPlaintextOracle::from_snapshot(snapshot);
    TraverseOptions topts;
    topts.marker_suffix = config.marker_suffix;
    std::vector<FileMeta> encrypted;
    for (auto& f : traverse(corpus, topts).files)
        if (f.encrypted) encrypted.push_back(f);

    std::int64_t earliest = encrypted.front().mtime_ticks;
    for (const auto& m : encrypted) earliest = std::min(earliest, m.mtime_ticks);
    SeedWindow window{static_cast<std::uint32_t>(earliest / 1'000'000), 4096};

    std::set<std::uint32_t> found;
    for (int jobs : {1, 4, 16}) {
        auto result = search(window, corpus, encrypted, config.processors, config.arch,
                             config.entropy_mode, oracle, {.jobs = jobs});
        if (result.seed) found.insert(*result.seed);
    }
    bool deterministic = found.size() == 1 && *found.begin() == config.time_seed;

    // Throughput on a guaranteed-miss window: every trial runs the full
    // rejection path.
    SeedWindow miss{config.time_seed - 1, 300'000};
    auto bench = search(miss, corpus, encrypted, config.processors, config.arch,
                        config.entropy_mode, oracle, {.jobs = 1});
    double per_core = bench.seeds_per_second;
    bool fast_enough = per_core >= 100'000.0;

    std::ostringstream detail;
    detail << "search: deterministic across jobs {1,4,16} = " << (deterministic ? "yes" : "NO")
           << ", throughput " << static_cast<std::uint64_t>(per_core)
           << " seeds/s/core (need >= 100000)";
    report(7, deterministic && fast_enough && !bench.seed.has_value(), detail.str());
}

void criterion8_keystream_accounting() {
    if (!g_big.tmp || !g_big.ok) {
        report(8, false, "skipped: criterion 1 corpus unavailable");
        return;
    }
    const SimConfig& config = g_big.config;
    std::vector<std::size_t> per_thread(static_cast<std::size_t>(config.processors), 0);
    for (const auto& f : g_big.record.files)
        if (f.key_index > 0) ++per_thread[static_cast<std::size_t>(f.thread_id) - 1];

    std::size_t bad = 0;
    std::uint64_t discard = discard_bytes(config.arch);
    if (g_big.record.generator_bytes_emitted[0] != discard) ++bad;
    for (int t = 1; t <= config.processors; ++t) {
        std::uint64_t want = discard + 80ull * per_thread[static_cast<std::size_t>(t) - 1];
        if (g_big.record.generator_bytes_emitted[static_cast<std::size_t>(t)] != want) ++bad;
    }

    // The decryptor's ledger must re-derive identical key material and
    // byte counts from the seed alone.
    KeystreamLedger ledger(config.time_seed, config.processors, config.arch, config.entropy_mode,
                           per_thread);
    for (int t = 1; t <= config.processors; ++t)
        if (ledger.bytes_emitted(t) !=
            g_big.record.generator_bytes_emitted[static_cast<std::size_t>(t)])
            ++bad;
    for (const auto& f : g_big.record.files) {
        if (f.key_index == 0) continue;
        const KeyIv& kiv = ledger.at(f.thread_id, f.key_index);
        if (kiv.key != f.key || kiv.iv != f.iv) ++bad;
    }
    report(8, bad == 0,
           "keystream accounting: discard+80*files per generator, ledger agreement, " +
               std::to_string(bad) + " discrepancies");
}

}  // namespace

int main() {
    std::printf("rhylab acceptance suite (placement seed %llu)\n",
                static_cast<unsigned long long>(acceptance_seed()));
    criterion1_end_to_end();
    criterion2_collision_bounds();
    criterion3_footer_arithmetic();
    criterion4_ctr_involution();
    criterion5_lcg_oracle();
    criterion6_order_soundness();
    criterion7_search_determinism_and_throughput();
    criterion8_keystream_accounting();

    g_big.tmp.reset();
    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
