#include "rhylab/decryptor.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rhylab/crypto/aes_ctr.hpp"
#include "rhylab/offset_plan.hpp"

namespace rhylab {

namespace fs = std::filesystem;

KeystreamLedger::KeystreamLedger(std::uint32_t seed, int processors, Arch arch,
                                 EntropyByteMode entropy_mode,
                                 std::span<const std::size_t> blocks_per_thread) {
    if (blocks_per_thread.size() != static_cast<std::size_t>(processors))
        throw std::invalid_argument("KeystreamLedger: need one block count per thread");

    PrngFleet fleet(seed, processors, arch, entropy_mode);
    per_thread_.resize(static_cast<std::size_t>(processors) + 1);
    emitted_.assign(static_cast<std::size_t>(processors) + 1, 0);
    std::uint8_t block[80];
    for (int t = 1; t <= processors; ++t) {
        auto& rng = fleet.thread_rng(t);
        auto& list = per_thread_[static_cast<std::size_t>(t)];
        list.resize(blocks_per_thread[static_cast<std::size_t>(t) - 1]);
        for (auto& kiv : list) {
            rng.read(ByteSpan(block, 80));
            std::memcpy(kiv.key.data(), block, 32);
            std::memcpy(kiv.iv.data(), block + 32, 16);
        }
        emitted_[static_cast<std::size_t>(t)] = rng.total_bytes_emitted();
    }
}

const KeyIv& KeystreamLedger::at(int thread_id, int key_index) const {
    const auto& list = per_thread_.at(static_cast<std::size_t>(thread_id));
    if (key_index < 1 || static_cast<std::size_t>(key_index) > list.size())
        throw std::out_of_range("KeystreamLedger: key index out of range");
    return list[static_cast<std::size_t>(key_index) - 1];
}

std::size_t KeystreamLedger::count(int thread_id) const {
    return per_thread_.at(static_cast<std::size_t>(thread_id)).size();
}

std::uint64_t KeystreamLedger::bytes_emitted(int thread_id) const {
    return emitted_.at(static_cast<std::size_t>(thread_id));
}

StrippedFile strip_footer(ByteView encrypted) {
    if (encrypted.size() < kFooterBytes)
        throw std::invalid_argument("strip_footer: shorter than 0x40C, not a Rhysida-shaped file");
    StrippedFile out;
    std::size_t body_len = encrypted.size() - kFooterBytes;
    out.body.assign(encrypted.begin(), encrypted.begin() + static_cast<std::ptrdiff_t>(body_len));
    out.footer = EncryptedFooter::parse(encrypted.subspan(body_len));
    return out;
}

void decrypt_body(ByteSpan body, ByteView key32, ByteView iv16) {
    crypto::Aes256CtrLe ctr(key32, iv16);
    std::uint64_t stream_offset = 0;
    for (const auto& w : offset_plan(body.size()).windows) {
        ctr.xor_range(body.subspan(w.offset, w.length), stream_offset);
        stream_offset += w.length;
    }
}

const char* status_name(RecoveryStatus s) {
    switch (s) {
        case RecoveryStatus::Recovered: return "recovered";
        case RecoveryStatus::Ambiguous: return "ambiguous";
        case RecoveryStatus::Failed: return "failed";
        case RecoveryStatus::Skipped: return "skipped";
    }
    return "?";
}

namespace {

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    in.seekg(0, std::ios::end);
    auto len = in.tellg();
    in.seekg(0);
    Bytes data(static_cast<std::size_t>(len));
    if (len > 0 && !in.read(reinterpret_cast<char*>(data.data()), len))
        throw std::runtime_error("short read " + p.string());
    return data;
}

void write_file_atomic(const fs::path& p, ByteView data) {
    fs::path tmp = p;
    tmp += ".rhylab-part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
        if (!out) throw std::runtime_error("short write " + tmp.string());
    }
    fs::rename(tmp, p);
}

// Reads just the first offset-plan window of an encrypted file.
Bytes read_first_window(const fs::path& p, std::uint64_t body_len) {
    auto plan = offset_plan(body_len);
    if (plan.windows.empty()) return {};
    Bytes window(static_cast<std::size_t>(plan.windows.front().length));
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    if (!in.read(reinterpret_cast<char*>(window.data()),
                 static_cast<std::streamsize>(window.size())))
        throw std::runtime_error("short read " + p.string());
    return window;
}

// Counts perfect matchings in pass[i][j] (up to 2) and reports one. The
// node budget caps degenerate oracles that pass everything; real groups
// stay within the 4-files-per-tick capacity bound.
struct MatchingScan {
    int count = 0;  // saturates at 2
    std::vector<int> assignment;
    std::size_t budget = 1'000'000;
    bool exhausted = false;
};

void scan_matchings(const std::vector<std::vector<bool>>& pass, std::size_t row,
                    std::vector<bool>& used, std::vector<int>& current, MatchingScan& out) {
    if (out.count >= 2 || out.exhausted) return;
    if (out.budget-- == 0) {
        out.exhausted = true;
        return;
    }
    if (row == pass.size()) {
        if (out.count == 0) out.assignment = current;
        ++out.count;
        return;
    }
    for (std::size_t j = 0; j < used.size(); ++j) {
        if (used[j] || !pass[row][j]) continue;
        used[j] = true;
        current[row] = static_cast<int>(j);
        scan_matchings(pass, row + 1, used, current, out);
        used[j] = false;
        if (out.count >= 2 || out.exhausted) return;
    }
}

struct DecryptTask {
    std::size_t report_index;
    fs::path enc_path;
    fs::path out_path;
    KeyIv key;
};

}  // namespace

RecoveryReport decrypt_corpus(const fs::path& corpus_root, std::uint32_t seed, Arch arch,
                              EntropyByteMode entropy_mode, const OrderHypothesis& hypothesis,
                              const ValidityOracle& oracle, const DecryptOptions& opts) {
    RecoveryReport report;
    report.seed = seed;
    report.dry_run = opts.dry_run;

    std::vector<std::size_t> counts;
    counts.reserve(hypothesis.threads.size());
    for (const auto& th : hypothesis.threads) counts.push_back(th.size());
    KeystreamLedger ledger(seed, hypothesis.processors, arch, entropy_mode, counts);

    std::vector<DecryptTask> tasks;

    for (std::size_t ti = 0; ti < hypothesis.threads.size(); ++ti) {
        const auto& entries = hypothesis.threads[ti];
        const int thread_id = static_cast<int>(ti) + 1;

        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            while (j < entries.size() && entries[j].group == entries[i].group) ++j;
            const std::size_t group_size = j - i;

            // (entry rank, assigned key index); filled per group below.
            std::vector<std::pair<std::size_t, int>> assignments;
            bool group_failed = false;
            bool group_ambiguous = false;
            std::string group_detail;
            // For ambiguous groups: every plausible key per entry.
            std::vector<std::vector<int>> plausible(group_size);

            if (group_size == 1) {
                assignments.emplace_back(i, entries[i].lo);
            } else if (group_size > opts.max_group) {
                group_failed = true;
                group_detail = "collision group larger than max-group (" +
                               std::to_string(group_size) + ")";
            } else {
                // Zero-length bodies decrypt to the empty file under any
                // key; they absorb leftover indices after content files
                // are matched. Truncated ciphertexts consumed a key too
                // but can never validate; they absorb leftovers and are
                // reported failed below.
                std::vector<std::size_t> content_rows;
                std::vector<std::size_t> empty_rows;
                for (std::size_t k = i; k < j; ++k) {
                    std::uint64_t body_len = entries[k].meta.size >= kFooterBytes
                                                 ? entries[k].meta.size - kFooterBytes
                                                 : 0;
                    (body_len > 0 ? content_rows : empty_rows).push_back(k);
                }

                std::vector<std::vector<bool>> pass(content_rows.size(),
                                                    std::vector<bool>(group_size, false));
                bool io_failed = false;
                for (std::size_t r = 0; r < content_rows.size() && !io_failed; ++r) {
                    const auto& entry = entries[content_rows[r]];
                    std::uint64_t body_len = entry.meta.size - kFooterBytes;
                    Bytes window;
                    try {
                        window = read_first_window(corpus_root / entry.meta.path, body_len);
                    } catch (const std::exception& e) {
                        group_failed = true;
                        group_detail = e.what();
                        io_failed = true;
                        break;
                    }
                    Bytes trial(window.size());
                    for (std::size_t c = 0; c < group_size; ++c) {
                        int key_index = entries[i].lo + static_cast<int>(c);
                        const KeyIv& kiv = ledger.at(thread_id, key_index);
                        std::memcpy(trial.data(), window.data(), window.size());
                        crypto::Aes256CtrLe ctr(ByteView(kiv.key), ByteView(kiv.iv));
                        ctr.xor_range(ByteSpan(trial), 0);
                        ByteView prefix(trial.data(),
                                        std::min(oracle.prefix_bytes(), trial.size()));
                        pass[r][c] = oracle.match_prefix(entry.meta, prefix) &&
                                     oracle.confirm(entry.meta, ByteView(trial));
                    }
                }

                if (!group_failed) {
                    MatchingScan scan;
                    std::vector<bool> used(group_size, false);
                    std::vector<int> current(content_rows.size(), -1);
                    scan_matchings(pass, 0, used, current, scan);

                    if (scan.exhausted) {
                        group_failed = true;
                        group_detail = "key-assignment search exceeded its budget";
                    } else if (scan.count == 0 && !content_rows.empty()) {
                        group_failed = true;
                        group_detail = "no key assignment satisfies the oracle";
                    } else if (scan.count >= 2) {
                        group_ambiguous = true;
                        group_detail = "multiple key assignments satisfy the oracle";
                        for (std::size_t r = 0; r < content_rows.size(); ++r)
                            for (std::size_t c = 0; c < group_size; ++c)
                                if (pass[r][c])
                                    plausible[content_rows[r] - i].push_back(
                                        entries[i].lo + static_cast<int>(c));
                        for (const auto& k : empty_rows)
                            plausible[k - i] = {};  // key-independent
                    } else {
                        std::vector<bool> taken(group_size, false);
                        for (std::size_t r = 0; r < content_rows.size(); ++r) {
                            taken[static_cast<std::size_t>(scan.assignment[r])] = true;
                            assignments.emplace_back(content_rows[r],
                                                     entries[i].lo + scan.assignment[r]);
                        }
                        std::size_t next_free = 0;
                        for (const auto& k : empty_rows) {
                            while (taken[next_free]) ++next_free;
                            taken[next_free] = true;
                            assignments.emplace_back(k, entries[i].lo +
                                                            static_cast<int>(next_free));
                        }
                    }
                }
            }

            for (std::size_t k = i; k < j; ++k) {
                const auto& entry = entries[k];
                FileReport fr;
                fr.enc_path = entry.meta.path;
                fr.logical_path = entry.meta.logical_path;
                fr.thread_id = thread_id;
                fr.lo = entry.lo;
                fr.hi = entry.hi;

                if (group_failed) {
                    fr.status = RecoveryStatus::Failed;
                    fr.detail = group_detail;
                    report.files.push_back(std::move(fr));
                    continue;
                }
                if (group_ambiguous) {
                    std::uint64_t body_len =
                        entry.meta.size >= kFooterBytes ? entry.meta.size - kFooterBytes : 0;
                    if (body_len == 0) {
                        // Empty under every candidate key; recover outright.
                        fs::path out_path = corpus_root / entry.meta.logical_path;
                        if (fs::exists(out_path)) {
                            fr.status = RecoveryStatus::Skipped;
                            fr.detail = "output already exists";
                        } else {
                            fr.status = RecoveryStatus::Recovered;
                            fr.detail = "zero-length original";
                            fr.output_path = entry.meta.logical_path;
                            if (!opts.dry_run) write_file_atomic(out_path, ByteView());
                        }
                    } else {
                        // Emit every plausible plaintext side by side instead
                        // of guessing one.
                        fr.status = RecoveryStatus::Ambiguous;
                        fr.detail = group_detail;
                        if (!opts.dry_run) {
                            for (int key_index : plausible[k - i]) {
                                Bytes enc = read_file(corpus_root / entry.meta.path);
                                StrippedFile stripped = strip_footer(ByteView(enc));
                                const KeyIv& kiv = ledger.at(thread_id, key_index);
                                decrypt_body(ByteSpan(stripped.body), ByteView(kiv.key),
                                             ByteView(kiv.iv));
                                fs::path out_path = corpus_root /
                                                    (entry.meta.logical_path + ".key" +
                                                     std::to_string(key_index));
                                write_file_atomic(out_path, ByteView(stripped.body));
                            }
                        }
                    }
                    report.files.push_back(std::move(fr));
                    continue;
                }

                int assigned = 0;
                for (const auto& [rank, key_index] : assignments)
                    if (rank == k) assigned = key_index;
                fr.assigned_key = assigned;

                fs::path out_path = corpus_root / entry.meta.logical_path;
                if (entry.meta.size < kFooterBytes) {
                    fr.status = RecoveryStatus::Failed;
                    fr.detail = "shorter than the 0x40C footer, not a Rhysida-shaped file";
                } else if (entry.meta.logical_path == entry.meta.path) {
                    fr.status = RecoveryStatus::Skipped;
                    fr.detail = "no marker suffix; refusing to overwrite";
                } else if (fs::exists(out_path)) {
                    fr.status = RecoveryStatus::Skipped;
                    fr.detail = "output already exists";
                } else {
                    fr.status = RecoveryStatus::Recovered;  // finalized after the write pass
                    fr.output_path = entry.meta.logical_path;
                    if (!opts.dry_run)
                        tasks.push_back({report.files.size(), corpus_root / entry.meta.path,
                                         out_path, ledger.at(thread_id, assigned)});
                }
                report.files.push_back(std::move(fr));
            }
            i = j;
        }
    }

    // Full-file decryption, parallel across files.
    std::atomic<std::size_t> next_task{0};
    std::mutex report_mutex;
    auto run_tasks = [&]() {
        for (;;) {
            std::size_t idx = next_task.fetch_add(1);
            if (idx >= tasks.size()) return;
            const DecryptTask& task = tasks[idx];
            try {
                Bytes enc = read_file(task.enc_path);
                StrippedFile stripped = strip_footer(ByteView(enc));
                decrypt_body(ByteSpan(stripped.body), ByteView(task.key.key),
                             ByteView(task.key.iv));
                write_file_atomic(task.out_path, ByteView(stripped.body));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(report_mutex);
                auto& fr = report.files[task.report_index];
                fr.status = RecoveryStatus::Failed;
                fr.detail = e.what();
                fr.output_path.clear();
            }
        }
    };
    if (!opts.dry_run && !tasks.empty()) {
        int jobs = std::max(1, opts.jobs);
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) workers.emplace_back(run_tasks);
        for (auto& w : workers) w.join();
    }

    for (const auto& fr : report.files) {
        switch (fr.status) {
            case RecoveryStatus::Recovered: ++report.recovered; break;
            case RecoveryStatus::Ambiguous: ++report.ambiguous; break;
            case RecoveryStatus::Failed: ++report.failed; break;
            case RecoveryStatus::Skipped: ++report.skipped; break;
        }
    }
    return report;
}

void write_recovery_report(std::ostream& out, const RecoveryReport& report) {
    out << "recovery seed=" << report.seed << (report.dry_run ? " (dry-run)" : "") << "\n";
    for (const auto& f : report.files) {
        out << escape_field(f.enc_path) << " thread=" << f.thread_id << " keys=" << f.lo;
        if (f.hi != f.lo) out << ".." << f.hi;
        if (f.assigned_key) out << " assigned=" << f.assigned_key;
        out << " status=" << status_name(f.status);
        if (!f.output_path.empty()) out << " output=" << escape_field(f.output_path);
        if (!f.detail.empty()) out << " detail=" << escape_field(f.detail);
        out << "\n";
    }
    out << "summary recovered=" << report.recovered << " ambiguous=" << report.ambiguous
        << " failed=" << report.failed << " skipped=" << report.skipped << "\n";
}

}  // namespace rhylab
