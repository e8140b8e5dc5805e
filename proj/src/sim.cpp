#include "rhylab/sim.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rhylab/crypto/aes_ctr.hpp"

namespace rhylab {

namespace fs = std::filesystem;

void SimConfig::validate() const {
    if (processors < 1) throw std::invalid_argument("config: processors must be >= 1");
    if (stack_capacity < 1) throw std::invalid_argument("config: stack capacity must be >= 1");
    if (tick_us == 0 || 1'000'000 % tick_us != 0)
        throw std::invalid_argument("config: tick_us must divide 1000000");
    if (clock_hz == 0) throw std::invalid_argument("config: clock_hz must be positive");
    if (key_schedule_cycles == 0 || cycles_per_byte == 0)
        throw std::invalid_argument("config: cost model cycles must be positive");
    if (marker_suffix.empty()) throw std::invalid_argument("config: marker suffix required");
}

std::vector<SimEvent> schedule_events(std::size_t file_count, int processors, int capacity,
                                      std::uint64_t interleave_seed) {
    const std::size_t P = static_cast<std::size_t>(processors);
    std::vector<std::vector<std::size_t>> stacks(P + 1);
    std::vector<SimEvent> events;
    events.reserve(2 * file_count);

    SplitMix64 rng(interleave_seed);
    std::size_t pushed = 0;

    while (true) {
        // Runnable actors, in a fixed probe order: main, then threads 1..P.
        int main_ok = 0;
        if (pushed < file_count) {
            int target = push_target(pushed, processors);
            main_ok = stacks[static_cast<std::size_t>(target)].size() <
                              static_cast<std::size_t>(capacity)
                          ? 1
                          : 0;
        }
        std::size_t runnable = static_cast<std::size_t>(main_ok);
        for (std::size_t t = 1; t <= P; ++t)
            if (!stacks[t].empty()) ++runnable;
        if (runnable == 0) break;

        std::size_t pick = rng.next_below(runnable);
        if (main_ok && pick == 0) {
            int target = push_target(pushed, processors);
            stacks[static_cast<std::size_t>(target)].push_back(pushed);
            events.push_back({SimEvent::Kind::Push, pushed, target});
            ++pushed;
            continue;
        }
        if (main_ok) --pick;
        for (std::size_t t = 1; t <= P; ++t) {
            if (stacks[t].empty()) continue;
            if (pick == 0) {
                events.push_back({SimEvent::Kind::Pop, stacks[t].back(), static_cast<int>(t)});
                stacks[t].pop_back();
                break;
            }
            --pick;
        }
    }
    return events;
}

std::vector<PopEvent> schedule_pops(std::size_t file_count, int processors, int capacity,
                                    std::uint64_t interleave_seed) {
    std::vector<PopEvent> pops;
    pops.reserve(file_count);
    for (const auto& ev : schedule_events(file_count, processors, capacity, interleave_seed))
        if (ev.kind == SimEvent::Kind::Pop) pops.push_back({ev.file_index, ev.thread_id});
    return pops;
}

namespace {

std::int64_t cycles_to_ticks(std::uint64_t cycles, const SimConfig& cfg) {
    unsigned __int128 num = static_cast<unsigned __int128>(cycles) * cfg.ticks_per_second();
    return static_cast<std::int64_t>(num / cfg.clock_hz);
}

std::uint64_t encryption_cycles(std::uint64_t file_size, const SimConfig& cfg) {
    std::uint64_t enc_bytes = offset_plan(file_size).encrypted_bytes();
    return cfg.key_schedule_cycles + cfg.cycles_per_byte * enc_bytes;
}

}  // namespace

std::vector<OrderTruth> simulate_order(const std::vector<std::uint64_t>& sizes,
                                       const SimConfig& config) {
    config.validate();
    auto pops = schedule_pops(sizes.size(), config.processors, config.stack_capacity,
                              config.interleave_seed);

    std::vector<OrderTruth> out(sizes.size());
    std::vector<std::uint64_t> thread_cycles(static_cast<std::size_t>(config.processors) + 1, 0);
    std::vector<int> next_key(static_cast<std::size_t>(config.processors) + 1, 0);
    const std::int64_t base_ticks =
        static_cast<std::int64_t>(config.time_seed) *
            static_cast<std::int64_t>(config.ticks_per_second()) +
        static_cast<std::int64_t>(config.start_offset_ticks);

    for (const auto& pop : pops) {
        auto t = static_cast<std::size_t>(pop.thread_id);
        thread_cycles[t] += encryption_cycles(sizes[pop.file_index], config);
        out[pop.file_index] = {pop.thread_id, ++next_key[t],
                               base_ticks + cycles_to_ticks(thread_cycles[t], config)};
    }
    return out;
}

Bytes encrypt_file_bytes(ByteView data, ByteView key32, ByteView iv16,
                         const crypto::RsaPublicKey& pub, ByteView oaep_seeds32,
                         const std::array<std::uint8_t, kVersionBytes>& version) {
    if (key32.size() != 32) throw std::invalid_argument("encrypt_file_bytes: key must be 32 bytes");
    if (iv16.size() != 16) throw std::invalid_argument("encrypt_file_bytes: iv must be 16 bytes");
    if (oaep_seeds32.size() != 32)
        throw std::invalid_argument("encrypt_file_bytes: need 32 OAEP seed bytes");

    Bytes out(data.begin(), data.end());
    crypto::Aes256CtrLe ctr(key32, iv16);
    std::uint64_t stream_offset = 0;
    for (const auto& w : offset_plan(data.size()).windows) {
        ctr.xor_range(ByteSpan(out.data() + w.offset, w.length), stream_offset);
        stream_offset += w.length;
    }

    EncryptedFooter footer;
    Bytes key_ct = crypto::oaep_encrypt(pub, key32, oaep_seeds32.subspan(0, 16));
    Bytes iv_ct = crypto::oaep_encrypt(pub, iv16, oaep_seeds32.subspan(16, 16));
    std::memcpy(footer.rsa_key_ct.data(), key_ct.data(), kRsaFieldBytes);
    std::memcpy(footer.rsa_iv_ct.data(), iv_ct.data(), kRsaFieldBytes);
    footer.reserved.fill(0);
    footer.version = version;

    Bytes serialized = footer.serialize();
    out.insert(out.end(), serialized.begin(), serialized.end());
    return out;
}

InfectionRecord simulate_corpus(const fs::path& root, const SimConfig& config) {
    config.validate();

    TraverseOptions topts;
    topts.tick_us = config.tick_us;
    topts.exclude_names = config.exclude_names;
    TraverseResult walk = traverse(root, topts);
    for (const auto& f : walk.files) {
        if (f.path.size() > config.marker_suffix.size() &&
            f.path.compare(f.path.size() - config.marker_suffix.size(),
                           config.marker_suffix.size(), config.marker_suffix) == 0)
            throw std::runtime_error("simulate: corpus already contains encrypted files: " +
                                     f.path);
    }

    InfectionRecord record;
    record.config = config;
    record.skipped = walk.skipped;

    record.rsa = crypto::rsa_keypair_for_seed(config.effective_rsa_seed());
    crypto::RsaPublicKey pub = record.rsa.public_key();

    PrngFleet fleet(config.time_seed, config.processors, config.arch, config.entropy_mode);
    auto pops = schedule_pops(walk.files.size(), config.processors, config.stack_capacity,
                              config.interleave_seed);

    record.files.resize(walk.files.size());
    for (std::size_t i = 0; i < walk.files.size(); ++i) {
        record.files[i].path = walk.files[i].path;
        record.files[i].size = walk.files[i].size;
    }

    std::vector<std::uint64_t> thread_cycles(static_cast<std::size_t>(config.processors) + 1, 0);
    std::vector<int> next_key(static_cast<std::size_t>(config.processors) + 1, 0);
    const std::int64_t base_ticks =
        static_cast<std::int64_t>(config.time_seed) *
            static_cast<std::int64_t>(config.ticks_per_second()) +
        static_cast<std::int64_t>(config.start_offset_ticks);

    for (const auto& pop : pops) {
        FileRecord& fr = record.files[pop.file_index];
        const FileMeta& meta = walk.files[pop.file_index];
        fr.thread_id = pop.thread_id;

        fs::path src = root / meta.path;
        Bytes data;
        try {
            std::ifstream in(src, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open for reading");
            data.resize(meta.size);
            if (meta.size > 0 &&
                !in.read(reinterpret_cast<char*>(data.data()),
                         static_cast<std::streamsize>(meta.size)))
                throw std::runtime_error("short read");
        } catch (const std::exception& e) {
            fr.status = std::string("io error: ") + e.what();
            continue;  // no keystream consumed for files never encrypted
        }

        // One 80-byte draw per file: key, iv, then two 16-byte OAEP seeds.
        auto t = static_cast<std::size_t>(pop.thread_id);
        Bytes block = fleet.thread_rng(pop.thread_id).read(80);
        std::memcpy(fr.key.data(), block.data(), 32);
        std::memcpy(fr.iv.data(), block.data() + 32, 16);
        fr.key_index = ++next_key[t];

        thread_cycles[t] += encryption_cycles(meta.size, config);
        fr.mtime_ticks = base_ticks + cycles_to_ticks(thread_cycles[t], config);

        try {
            Bytes enc = encrypt_file_bytes(ByteView(data), ByteView(fr.key),
                                           ByteView(fr.iv), pub,
                                           ByteView(block).subspan(48, 32), config.version);
            fs::path dst = src;
            dst += config.marker_suffix;
            fs::path tmp = dst;
            tmp += ".part";
            {
                std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
                if (!outf) throw std::runtime_error("cannot open for writing");
                outf.write(reinterpret_cast<const char*>(enc.data()),
                           static_cast<std::streamsize>(enc.size()));
                if (!outf) throw std::runtime_error("short write");
            }
            fs::rename(tmp, dst);
            fs::remove(src);
            write_mtime_us(dst, fr.mtime_ticks * config.tick_us);
        } catch (const std::exception& e) {
            fr.status = std::string("io error: ") + e.what();
        }
    }

    record.generator_bytes_emitted.resize(fleet.size());
    record.generator_bytes_emitted[0] = fleet.unused_rng().total_bytes_emitted();
    for (int t = 1; t <= config.processors; ++t)
        record.generator_bytes_emitted[static_cast<std::size_t>(t)] =
            fleet.thread_rng(t).total_bytes_emitted();
    return record;
}

}  // namespace rhylab
