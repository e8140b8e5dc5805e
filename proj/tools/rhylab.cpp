// rhylab: a contained laboratory that replays a Rhysida-style encryption
// pipeline over an opt-in corpus and recovers it from file metadata alone.
#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "rhylab/config.hpp"
#include "rhylab/decryptor.hpp"
#include "rhylab/manifest.hpp"
#include "rhylab/oracle.hpp"
#include "rhylab/order.hpp"
#include "rhylab/seed_search.hpp"
#include "rhylab/sim.hpp"
#include "rhylab/traverse.hpp"

namespace fs = std::filesystem;
using namespace rhylab;

namespace {

constexpr const char* kMarkerName = ".rhylab-corpus-armed";

// Exit codes for recover (documented in the README).
constexpr int kExitAllRecovered = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;
constexpr int kExitSeedInvalid = 3;

TraverseOptions traverse_options(const LabConfig& config) {
    TraverseOptions opts;
    opts.marker_suffix = config.marker_suffix;
    opts.tick_us = config.tick_us;
    opts.exclude_names = {kMarkerName};
    return opts;
}

std::unique_ptr<ValidityOracle> build_oracle(const LabConfig& config, const std::string& snapshot,
                                             const std::string& digests) {
    switch (config.oracle) {
        case OracleKind::Known: {
            if (!snapshot.empty())
                return std::make_unique<KnownPlaintextOracle>(
                    KnownPlaintextOracle::from_snapshot(snapshot));
            if (!digests.empty())
                return std::make_unique<KnownPlaintextOracle>(
                    KnownPlaintextOracle::from_digest_file(digests));
            throw std::runtime_error("known oracle needs --snapshot or --digests");
        }
        case OracleKind::Magic: {
            if (!config.magic_table_path.empty())
                return std::make_unique<MagicOracle>(
                    MagicOracle::from_table_file(config.magic_table_path));
            return std::make_unique<MagicOracle>(MagicOracle::builtin());
        }
        case OracleKind::Entropy:
            return std::make_unique<EntropyOracle>(config.entropy_threshold);
    }
    throw std::logic_error("unreachable oracle kind");
}

std::uint64_t random_interleave() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

fs::path manifest_path_for(const fs::path& corpus) {
    fs::path p = corpus;
    p += ".manifest";
    return p;
}

int cmd_simulate(const LabConfig& config, const std::string& corpus_arg, std::uint32_t seed,
                 bool seed_given, std::uint64_t interleave, bool interleave_given,
                 const std::string& copy_to, bool dry_run) {
    fs::path corpus = corpus_arg;
    if (!fs::is_directory(corpus)) {
        std::cerr << "simulate: not a directory: " << corpus << "\n";
        return kExitFatal;
    }
    if (!fs::exists(corpus / kMarkerName)) {
        std::cerr << "simulate: refusing to encrypt " << corpus << "\n"
                  << "  The target must opt in: create a file named " << kMarkerName
                  << " inside it.\n  This command overwrites every regular file in the tree.\n";
        return kExitFatal;
    }
    if (!copy_to.empty()) {
        if (fs::exists(copy_to)) {
            std::cerr << "simulate: --copy target already exists: " << copy_to << "\n";
            return kExitFatal;
        }
        fs::copy(corpus, copy_to, fs::copy_options::recursive);
        corpus = copy_to;
    }

    SimConfig sim = config.to_sim_config(seed_given ? seed
                                                    : static_cast<std::uint32_t>(
                                                          std::time(nullptr)),
                                         interleave_given ? interleave : random_interleave());
    sim.processors = config.processors > 0 ? config.processors : 1;
    sim.exclude_names = {kMarkerName};
    sim.validate();

    if (dry_run) {
        auto walk = traverse(corpus, traverse_options(config));
        std::uint64_t total = 0;
        for (const auto& f : walk.files) total += f.size;
        std::cout << "simulate (dry-run): " << walk.files.size() << " files, " << total
                  << " bytes, processors=" << sim.processors << ", seed=" << sim.time_seed
                  << "\n";
        for (const auto& s : walk.skipped)
            std::cout << "  would skip " << s.path << " (" << s.reason << ")\n";
        return kExitAllRecovered;
    }

    InfectionRecord record = simulate_corpus(corpus, sim);
    fs::path manifest = manifest_path_for(corpus);
    write_manifest(manifest, record);

    std::size_t errors = 0;
    for (const auto& f : record.files)
        if (f.status != "ok") ++errors;
    std::cout << "simulate: encrypted " << (record.files.size() - errors) << "/"
              << record.files.size() << " files with seed " << sim.time_seed << " (interleave "
              << sim.interleave_seed << ")\n"
              << "manifest: " << manifest.string() << "\n";
    if (errors) {
        for (const auto& f : record.files)
            if (f.status != "ok") std::cout << "  " << f.path << ": " << f.status << "\n";
        return kExitPartial;
    }
    return kExitAllRecovered;
}

int cmd_recover(LabConfig config, const std::string& corpus_arg, std::uint32_t seed,
                bool seed_given, std::uint64_t window_high, bool window_high_given,
                const std::string& snapshot, const std::string& digests,
                const std::string& report_path, const std::string& order_report_path,
                bool dry_run) {
    fs::path corpus = corpus_arg;
    if (!fs::is_directory(corpus)) {
        std::cerr << "recover: not a directory: " << corpus << "\n";
        return kExitFatal;
    }

    if (config.processors <= 0) {
        fs::path manifest = manifest_path_for(corpus);
        if (fs::exists(manifest)) {
            config.processors = read_manifest(manifest).config.processors;
            std::cerr << "recover: processors=" << config.processors << " taken from "
                      << manifest.filename().string() << "\n";
        } else {
            std::cerr << "recover: --processors is required (no manifest found to read it "
                         "from); guessing would corrupt order inference\n";
            return kExitFatal;
        }
    }

    auto walk = traverse(corpus, traverse_options(config));
    std::vector<FileMeta> encrypted;
    std::set<std::string> encrypted_logical;
    for (const auto& f : walk.files) {
        if (f.encrypted) {
            encrypted.push_back(f);
            encrypted_logical.insert(f.logical_path);
        }
    }
    if (encrypted.empty()) {
        std::cerr << "recover: no files with suffix " << config.marker_suffix << " under "
                  << corpus << "\n";
        return kExitFatal;
    }

    // A plain file whose encrypted sibling exists is a recovery output
    // (or a restored original), written after infection: it must not
    // occupy a push slot in the replay. Other plain files are assumed to
    // have been present at infection time.
    std::vector<FileMeta> replay_files;
    std::size_t outputs = 0, stray = 0;
    for (const auto& f : walk.files) {
        if (!f.encrypted && encrypted_logical.count(f.logical_path)) {
            ++outputs;
            continue;
        }
        if (!f.encrypted) ++stray;
        replay_files.push_back(f);
    }
    if (outputs)
        std::cerr << "recover: " << outputs
                  << " file(s) look like prior recovery outputs; not replaying them\n";
    if (stray)
        std::cerr << "recover: warning: " << stray
                  << " unencrypted file(s) in the tree; assuming they occupied push slots\n";

    auto oracle = build_oracle(config, snapshot, digests);

    std::uint32_t found_seed = 0;
    if (seed_given) {
        // Still validate before touching anything: a wrong seed decrypts
        // singleton files to garbage.
        auto sel = select_candidates(encrypted, config.processors);
        auto candidates = prepare_candidates(corpus, sel.files, oracle->prefix_bytes());
        auto hits = trial_decrypt_firsts(seed, corpus, candidates, config.processors, config.arch,
                                         config.entropy_mode, *oracle);
        if (hits.empty()) {
            std::cerr << "recover: seed " << seed
                      << " does not validate against any candidate file; refusing to decrypt\n";
            return kExitSeedInvalid;
        }
        found_seed = seed;
    } else {
        std::int64_t earliest = encrypted.front().mtime_ticks;
        for (const auto& m : encrypted) earliest = std::min(earliest, m.mtime_ticks);
        std::uint64_t earliest_seconds =
            static_cast<std::uint64_t>(earliest) * config.tick_us / 1'000'000;
        SeedWindow window;
        window.high = window_high_given ? static_cast<std::uint32_t>(window_high)
                                        : static_cast<std::uint32_t>(earliest_seconds);
        window.span = config.window_span;

        SearchOptions sopts;
        sopts.jobs = config.jobs;
        sopts.progress = true;
        std::cerr << "recover: scanning " << window.span << " seeds down from " << window.high
                  << " with the " << oracle->name() << " oracle\n";
        SearchResult result = search(window, corpus, encrypted, config.processors, config.arch,
                                     config.entropy_mode, *oracle, sopts);
        std::cerr << "recover: tried " << result.seeds_tried << " seeds in "
                  << result.elapsed_seconds << "s (" << static_cast<std::uint64_t>(
                         result.seeds_per_second)
                  << "/s)\n";
        if (!result.seed) {
            std::cerr << "recover: seed not found in window; wrong --window-span, wrong "
                         "--processors, or oracle cannot validate this corpus\n";
            return kExitSeedInvalid;
        }
        found_seed = *result.seed;
    }
    std::cout << "seed " << found_seed << "\n";

    OrderHypothesis hyp =
        build_hypothesis(replay_files, config.processors, /*encrypted_only=*/true);
    if (!order_report_path.empty()) {
        std::ofstream out(order_report_path, std::ios::trunc);
        write_order_report(out, hyp);
    }

    DecryptOptions dopts;
    dopts.dry_run = dry_run;
    dopts.jobs = config.jobs;
    RecoveryReport report =
        decrypt_corpus(corpus, found_seed, config.arch, config.entropy_mode, hyp, *oracle, dopts);
    write_recovery_report(std::cout, report);
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::trunc);
        write_recovery_report(out, report);
    }
    return report.all_recovered() ? kExitAllRecovered : kExitPartial;
}

int cmd_inspect(const LabConfig& config, const std::string& target) {
    fs::path path = target;
    auto inspect_one = [&](const FileMeta& meta) {
        std::cout << meta.path << ": size=" << meta.size << " mtime_ticks=" << meta.mtime_ticks;
        if (meta.size < kFooterBytes) {
            std::cout << " [not Rhysida-shaped: shorter than 0x40C]\n";
            return;
        }
        std::uint64_t original = meta.size - kFooterBytes;
        auto plan = offset_plan(original);
        std::cout << " original=" << original << " div=" << plan.div << " windows=";
        for (std::size_t i = 0; i < plan.windows.size(); ++i) {
            if (i) std::cout << ",";
            std::cout << plan.windows[i].offset << "+" << plan.windows[i].length;
        }
        if (!meta.encrypted) std::cout << " [no marker suffix]";
        std::cout << "\n";
    };

    if (fs::is_regular_file(path)) {
        FileMeta meta;
        meta.path = path.filename().string();
        meta.logical_path = meta.path;
        meta.size = fs::file_size(path);
        meta.mtime_ticks = read_mtime_us(path) / config.tick_us;
        meta.encrypted = meta.path.size() > config.marker_suffix.size() &&
                         meta.path.ends_with(config.marker_suffix);
        inspect_one(meta);
        return kExitAllRecovered;
    }
    if (!fs::is_directory(path)) {
        std::cerr << "inspect: no such file or directory: " << path << "\n";
        return kExitFatal;
    }

    auto walk = traverse(path, traverse_options(config));
    std::map<std::int64_t, std::size_t> mtime_groups;
    std::size_t encrypted_count = 0;
    for (const auto& meta : walk.files) {
        inspect_one(meta);
        if (meta.encrypted) {
            ++encrypted_count;
            ++mtime_groups[meta.mtime_ticks];
        }
    }

    std::map<std::size_t, std::size_t> histogram;  // group size -> occurrences
    for (const auto& [mtime, count] : mtime_groups)
        if (count > 1) ++histogram[count];
    std::cout << "files=" << walk.files.size() << " encrypted=" << encrypted_count << "\n";
    std::cout << "mtime collision groups:";
    if (histogram.empty()) std::cout << " none";
    for (const auto& [size, count] : histogram)
        std::cout << " " << size << "-file x" << count;
    std::cout << "\n";

    auto cap = collision_capacity(config.clock_hz, config.key_schedule_cycles,
                                  config.cycles_per_byte, config.tick_us);
    std::cout << "capacity advisory (clock=" << config.clock_hz << "Hz, tick=" << config.tick_us
              << "us): max " << cap.max_files << " files per tick;";
    for (const auto& [k, bound] : cap.size_bound_per_k)
        std::cout << " k=" << k << "<=" << bound << "B";
    std::cout << "\n";
    for (const auto& [size, count] : histogram) {
        if (static_cast<int>(size) > cap.max_files)
            std::cout << "warning: " << count << " group(s) of " << size
                      << " files exceed the per-tick capacity bound; check --tick-us and clock "
                         "settings\n";
    }
    return kExitAllRecovered;
}

void bench_build(const fs::path& corpus, const std::vector<std::uint64_t>& sizes) {
    fs::create_directories(corpus);
    SplitMix64 rng(0xBE7C4);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        Bytes content(sizes[i]);
        for (auto& b : content) b = static_cast<std::uint8_t>(rng.next());
        std::ofstream out(corpus / ("bench" + std::to_string(i) + ".bin"), std::ios::binary);
        out.write(reinterpret_cast<const char*>(content.data()),
                  static_cast<std::streamsize>(content.size()));
    }
}

int cmd_bench(const LabConfig& config, std::size_t files, std::uint64_t span) {
    // Self-contained benchmark: simulate a small corpus of >=1 MiB files,
    // then scan a window guaranteed to miss so every trial runs the full
    // rejection path.
    int processors = config.processors > 0 ? config.processors : 4;
    auto tmpdir = fs::temp_directory_path() / ("rhylab-bench-" + std::to_string(::getpid()));
    fs::create_directories(tmpdir);
    struct Cleanup {
        fs::path p;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } cleanup{tmpdir};

    fs::path corpus = tmpdir / "corpus";
    fs::path snapshot = tmpdir / "snap";
    std::vector<std::uint64_t> sizes(std::max<std::size_t>(files, 1), kMiB + 4096);
    bench_build(corpus, sizes);
    fs::copy(corpus, snapshot, fs::copy_options::recursive);

    SimConfig sim;
    sim.time_seed = 1'700'000'000;
    sim.processors = processors;
    sim.interleave_seed = 42;
    simulate_corpus(corpus, sim);

    auto oracle = KnownPlaintextOracle::from_snapshot(snapshot);
    TraverseOptions topts;
    topts.marker_suffix = sim.marker_suffix;
    std::vector<FileMeta> encrypted;
    for (auto& f : traverse(corpus, topts).files)
        if (f.encrypted) encrypted.push_back(f);

    SeedWindow window{sim.time_seed - 1, span};  // everything below the true seed
    SearchOptions sopts;
    sopts.jobs = config.jobs;
    SearchResult result = search(window, corpus, encrypted, processors, config.arch,
                                 config.entropy_mode, oracle, sopts);

    double per_core = result.seeds_per_second / std::max(1, config.jobs);
    std::cout << "bench-search: processors=" << processors << " candidates=" << encrypted.size()
              << " jobs=" << config.jobs << "\n";
    std::cout << "seeds=" << result.seeds_tried << " elapsed=" << result.elapsed_seconds
              << "s rate=" << static_cast<std::uint64_t>(result.seeds_per_second)
              << "/s per-core=" << static_cast<std::uint64_t>(per_core) << "/s\n";
    return kExitAllRecovered;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rhysida-style ransomware laboratory: simulate infections on opt-in corpora "
                 "and recover them from mtime forensics"};
    app.require_subcommand(1);

    // --config is applied before flag parsing so flags override the file.
    std::string config_path = default_config_path().string();
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    LabConfig config;
    if (fs::exists(config_path)) {
        try {
            config = load_config_file(config_path);
        } catch (const std::exception& e) {
            std::cerr << "config: " << e.what() << "\n";
            return kExitFatal;
        }
    }
    app.add_option("--config", config_path, "Config file (key=value lines)");

    std::string arch_name_opt = arch_name(config.arch);
    std::string oracle_name_opt = oracle_kind_name(config.oracle);
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--processors", config.processors, "Victim processor count");
        cmd->add_option("--arch", arch_name_opt, "Victim arch: x86 or x64");
        cmd->add_option("--stack-capacity", config.stack_capacity, "Per-thread stack bound");
        cmd->add_option("--tick-us", config.tick_us, "mtime tick granularity in microseconds");
        cmd->add_option("--jobs", config.jobs, "Worker threads");
        cmd->add_option("--marker-suffix", config.marker_suffix, "Encrypted-file suffix");
    };

    auto* sim_cmd = app.add_subcommand("simulate", "Encrypt an opt-in corpus in place");
    std::string sim_dir, copy_to;
    std::uint32_t seed = 0;
    std::uint64_t interleave = 0;
    bool dry_run = false;
    sim_cmd->add_option("corpus", sim_dir, "Corpus directory (must contain " +
                                               std::string(kMarkerName) + ")")
        ->required();
    auto* seed_opt = sim_cmd->add_option("--seed", seed, "32-bit time seed (default: now)");
    auto* il_opt =
        sim_cmd->add_option("--interleave-seed", interleave, "Scheduler seed (default: random)");
    sim_cmd->add_option("--copy", copy_to, "Copy the corpus here and encrypt the copy");
    sim_cmd->add_flag("--dry-run", dry_run, "List what would be encrypted");
    sim_cmd->add_option("--start-offset-ticks", config.start_offset_ticks,
                        "Ticks between seed instant and first completion");
    add_common(sim_cmd);

    auto* rec_cmd = app.add_subcommand("recover", "Find the seed and restore a corpus");
    std::string rec_dir, snapshot, digests, report_path, order_report_path;
    std::uint32_t rec_seed = 0;
    std::uint64_t window_high = 0;
    bool rec_dry = false;
    rec_cmd->add_option("corpus", rec_dir, "Encrypted corpus directory")->required();
    auto* rec_seed_opt = rec_cmd->add_option("--seed", rec_seed, "Skip the search, use this seed");
    rec_cmd->add_option("--window-span", config.window_span, "Seconds scanned below the window top");
    auto* wh_opt = rec_cmd->add_option("--window-high", window_high,
                                       "Top of the seed window (default: earliest mtime)");
    rec_cmd->add_option("--oracle", oracle_name_opt, "known|magic|entropy");
    rec_cmd->add_option("--snapshot", snapshot, "Pre-infection copy for the known oracle");
    rec_cmd->add_option("--digests", digests, "Digest file for the known oracle");
    rec_cmd->add_option("--magic-table", config.magic_table_path,
                        "Signature table for the magic oracle");
    rec_cmd->add_option("--entropy-threshold", config.entropy_threshold,
                        "Bits/byte bound for the entropy oracle");
    rec_cmd->add_option("--report", report_path, "Write the recovery report here too");
    rec_cmd->add_option("--order-report", order_report_path, "Write the order hypothesis here");
    rec_cmd->add_flag("--dry-run", rec_dry, "Report without writing any file");
    add_common(rec_cmd);

    auto* ins_cmd = app.add_subcommand("inspect", "Forensic summary of a file or directory");
    std::string ins_target;
    ins_cmd->add_option("target", ins_target, "Encrypted file or corpus directory")->required();
    add_common(ins_cmd);

    auto* bench_cmd = app.add_subcommand("bench-search", "Measure seed-scan throughput");
    std::size_t bench_files = 4;
    std::uint64_t bench_span = 200'000;
    bench_cmd->add_option("--files", bench_files, "Candidate files in the synthetic corpus");
    bench_cmd->add_option("--span", bench_span, "Seeds to scan");
    add_common(bench_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        config.arch = parse_arch(arch_name_opt);
        config.oracle = parse_oracle_kind(oracle_name_opt);

        if (sim_cmd->parsed())
            return cmd_simulate(config, sim_dir, seed, seed_opt->count() > 0, interleave,
                                il_opt->count() > 0, copy_to, dry_run);
        if (rec_cmd->parsed())
            return cmd_recover(config, rec_dir, rec_seed, rec_seed_opt->count() > 0, window_high,
                               wh_opt->count() > 0, snapshot, digests, report_path,
                               order_report_path, rec_dry);
        if (ins_cmd->parsed()) return cmd_inspect(config, ins_target);
        if (bench_cmd->parsed()) return cmd_bench(config, bench_files, bench_span);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}
