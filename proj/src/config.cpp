#include "rhylab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rhylab {

OracleKind parse_oracle_kind(const std::string& s) {
    if (s == "known") return OracleKind::Known;
    if (s == "magic") return OracleKind::Magic;
    if (s == "entropy") return OracleKind::Entropy;
    throw std::invalid_argument("unknown oracle: " + s + " (expected known|magic|entropy)");
}

const char* oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::Known: return "known";
        case OracleKind::Magic: return "magic";
        case OracleKind::Entropy: return "entropy";
    }
    return "?";
}

SimConfig LabConfig::to_sim_config(std::uint32_t time_seed, std::uint64_t interleave_seed) const {
    SimConfig sim;
    sim.time_seed = time_seed;
    sim.processors = processors > 0 ? processors : 1;
    sim.arch = arch;
    sim.stack_capacity = stack_capacity;
    sim.tick_us = tick_us;
    sim.clock_hz = clock_hz;
    sim.key_schedule_cycles = key_schedule_cycles;
    sim.cycles_per_byte = cycles_per_byte;
    sim.interleave_seed = interleave_seed;
    sim.start_offset_ticks = start_offset_ticks;
    sim.entropy_mode = entropy_mode;
    sim.marker_suffix = marker_suffix;
    return sim;
}

std::string serialize_config(const LabConfig& c) {
    std::ostringstream out;
    out << "processors=" << c.processors << "\n";
    out << "arch=" << arch_name(c.arch) << "\n";
    out << "stack_capacity=" << c.stack_capacity << "\n";
    out << "tick_us=" << c.tick_us << "\n";
    out << "clock_hz=" << c.clock_hz << "\n";
    out << "key_schedule_cycles=" << c.key_schedule_cycles << "\n";
    out << "cycles_per_byte=" << c.cycles_per_byte << "\n";
    out << "window_span=" << c.window_span << "\n";
    out << "oracle=" << oracle_kind_name(c.oracle) << "\n";
    out << "entropy_threshold=" << c.entropy_threshold << "\n";
    out << "magic_table=" << c.magic_table_path << "\n";
    out << "marker_suffix=" << c.marker_suffix << "\n";
    out << "start_offset_ticks=" << c.start_offset_ticks << "\n";
    out << "entropy_mode=" << (c.entropy_mode == EntropyByteMode::LowByte ? "low-byte" : "low-7-bit")
        << "\n";
    out << "jobs=" << c.jobs << "\n";
    return out.str();
}

LabConfig parse_config(const std::string& text) {
    LabConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);

        if (key == "processors") c.processors = std::stoi(value);
        else if (key == "arch") c.arch = parse_arch(value);
        else if (key == "stack_capacity") c.stack_capacity = std::stoi(value);
        else if (key == "tick_us") c.tick_us = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "clock_hz") c.clock_hz = std::stoull(value);
        else if (key == "key_schedule_cycles")
            c.key_schedule_cycles = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "cycles_per_byte")
            c.cycles_per_byte = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "window_span") c.window_span = std::stoull(value);
        else if (key == "oracle") c.oracle = parse_oracle_kind(value);
        else if (key == "entropy_threshold") c.entropy_threshold = std::stod(value);
        else if (key == "magic_table") c.magic_table_path = value;
        else if (key == "marker_suffix") c.marker_suffix = value;
        else if (key == "start_offset_ticks") c.start_offset_ticks = std::stoull(value);
        else if (key == "entropy_mode")
            c.entropy_mode = value == "low-7-bit" ? EntropyByteMode::Low7Bit
                                                  : EntropyByteMode::LowByte;
        else if (key == "jobs") c.jobs = std::stoi(value);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key " + key);
    }
    return c;
}

LabConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void save_config_file(const std::filesystem::path& path, const LabConfig& config) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("config: cannot write " + path.string());
    out << serialize_config(config);
}

std::filesystem::path default_config_path() {
    if (const char* env = std::getenv("RHYLAB_CONFIG")) return env;
    return "rhylab.conf";
}

}  // namespace rhylab
