#include "rhylab/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace rhylab {

namespace {

constexpr const char* kMagic = "rhylab-manifest v1";

std::string require(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("manifest: missing header field " + key);
    return it->second;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const InfectionRecord& record) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot write " + path.string());
    const SimConfig& c = record.config;

    out << kMagic << "\n";
    out << "time_seed=" << c.time_seed << "\n";
    out << "processors=" << c.processors << "\n";
    out << "arch=" << arch_name(c.arch) << "\n";
    out << "stack_capacity=" << c.stack_capacity << "\n";
    out << "tick_granularity_us=" << c.tick_us << "\n";
    out << "interleave_seed=" << c.interleave_seed << "\n";
    out << "clock_hz=" << c.clock_hz << "\n";
    out << "key_schedule_cycles=" << c.key_schedule_cycles << "\n";
    out << "cycles_per_byte=" << c.cycles_per_byte << "\n";
    out << "start_offset_ticks=" << c.start_offset_ticks << "\n";
    out << "entropy_mode=" << (c.entropy_mode == EntropyByteMode::LowByte ? "low-byte" : "low-7-bit")
        << "\n";
    out << "rsa_seed=" << c.effective_rsa_seed() << "\n";
    out << "version_bytes=" << to_hex(ByteView(c.version.data(), c.version.size())) << "\n";
    out << "marker_suffix=" << c.marker_suffix << "\n";
    out << "oaep=rsa4096-oaep-sha256-seed16\n";
    out << "rsa_n=" << record.rsa.n.to_hex() << "\n";
    out << "rsa_e=" << record.rsa.e.to_hex() << "\n";
    out << "rsa_d=" << record.rsa.d.to_hex() << "\n";
    out << "rsa_p=" << record.rsa.p.to_hex() << "\n";
    out << "rsa_q=" << record.rsa.q.to_hex() << "\n";
    for (const auto& s : record.skipped)
        out << "skipped=" << escape_field(s.path) << " " << escape_field(s.reason) << "\n";
    for (std::size_t i = 0; i < record.generator_bytes_emitted.size(); ++i)
        out << "generator_bytes_" << i << "=" << record.generator_bytes_emitted[i] << "\n";

    out << "files=" << record.files.size() << "\n";
    for (const auto& f : record.files) {
        out << escape_field(f.path) << " " << f.size << " " << f.thread_id << " " << f.key_index
            << " " << (f.key_index ? to_hex(ByteView(f.key)) : "-") << " "
            << (f.key_index ? to_hex(ByteView(f.iv)) : "-") << " " << f.mtime_ticks << " "
            << escape_field(f.status) << "\n";
    }
    if (!out) throw std::runtime_error("manifest: write failed " + path.string());
}

InfectionRecord read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw std::runtime_error("manifest: bad magic in " + path.string());

    InfectionRecord record;
    std::map<std::string, std::string> kv;
    std::size_t file_count = 0;

    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("manifest: bad header line: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "skipped") {
            std::istringstream ss(value);
            std::string p, r;
            ss >> p >> r;
            record.skipped.push_back({unescape_field(p), unescape_field(r)});
            continue;
        }
        if (key == "files") {
            file_count = std::stoull(value);
            break;
        }
        kv[key] = value;
    }

    SimConfig& c = record.config;
    c.time_seed = static_cast<std::uint32_t>(std::stoul(require(kv, "time_seed")));
    c.processors = std::stoi(require(kv, "processors"));
    c.arch = parse_arch(require(kv, "arch"));
    c.stack_capacity = std::stoi(require(kv, "stack_capacity"));
    c.tick_us = static_cast<std::uint32_t>(std::stoul(require(kv, "tick_granularity_us")));
    c.interleave_seed = std::stoull(require(kv, "interleave_seed"));
    c.clock_hz = std::stoull(require(kv, "clock_hz"));
    c.key_schedule_cycles = static_cast<std::uint32_t>(std::stoul(require(kv, "key_schedule_cycles")));
    c.cycles_per_byte = static_cast<std::uint32_t>(std::stoul(require(kv, "cycles_per_byte")));
    c.start_offset_ticks = std::stoull(require(kv, "start_offset_ticks"));
    c.entropy_mode = require(kv, "entropy_mode") == "low-7-bit" ? EntropyByteMode::Low7Bit
                                                                : EntropyByteMode::LowByte;
    c.rsa_seed = std::stoull(require(kv, "rsa_seed"));
    Bytes version = from_hex(require(kv, "version_bytes"));
    if (version.size() != kVersionBytes) throw std::runtime_error("manifest: bad version_bytes");
    std::copy(version.begin(), version.end(), c.version.begin());
    c.marker_suffix = require(kv, "marker_suffix");

    record.rsa.n = crypto::BigUint::from_hex(require(kv, "rsa_n"));
    record.rsa.e = crypto::BigUint::from_hex(require(kv, "rsa_e"));
    record.rsa.d = crypto::BigUint::from_hex(require(kv, "rsa_d"));
    record.rsa.p = crypto::BigUint::from_hex(require(kv, "rsa_p"));
    record.rsa.q = crypto::BigUint::from_hex(require(kv, "rsa_q"));

    for (std::size_t i = 0;; ++i) {
        auto it = kv.find("generator_bytes_" + std::to_string(i));
        if (it == kv.end()) break;
        record.generator_bytes_emitted.push_back(std::stoull(it->second));
    }

    record.files.reserve(file_count);
    for (std::size_t i = 0; i < file_count; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("manifest: truncated records");
        std::istringstream ss(line);
        FileRecord f;
        std::string p, key_hex, iv_hex, status;
        if (!(ss >> p >> f.size >> f.thread_id >> f.key_index >> key_hex >> iv_hex >>
              f.mtime_ticks >> status))
            throw std::runtime_error("manifest: bad record: " + line);
        f.path = unescape_field(p);
        f.status = unescape_field(status);
        if (key_hex != "-") {
            Bytes k = from_hex(key_hex), v = from_hex(iv_hex);
            if (k.size() != 32 || v.size() != 16)
                throw std::runtime_error("manifest: bad key/iv in record: " + line);
            std::copy(k.begin(), k.end(), f.key.begin());
            std::copy(v.begin(), v.end(), f.iv.begin());
        }
        record.files.push_back(std::move(f));
    }
    return record;
}

}  // namespace rhylab
