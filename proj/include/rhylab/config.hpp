#pragma once

#include <filesystem>
#include <string>

#include "rhylab/sim.hpp"

namespace rhylab {

enum class OracleKind { Known, Magic, Entropy };

OracleKind parse_oracle_kind(const std::string& s);
const char* oracle_kind_name(OracleKind k);

// Operator-facing knobs, stored as flat key=value text. Precedence is
// flags over file over defaults.
struct LabConfig {
    int processors = 0;  // 0 = take from manifest, else required
    Arch arch = Arch::X64;
    int stack_capacity = 16;
    std::uint32_t tick_us = 1;
    std::uint64_t clock_hz = 6'000'000'000ull;
    std::uint32_t key_schedule_cycles = 1400;
    std::uint32_t cycles_per_byte = 18;
    std::uint64_t window_span = 86'400;  // seconds scanned below the earliest mtime
    OracleKind oracle = OracleKind::Magic;
    double entropy_threshold = 7.2;
    std::string magic_table_path;    // empty = builtin table
    std::string marker_suffix = ".rhysida_sim";
    std::uint64_t start_offset_ticks = 1'000'000;
    EntropyByteMode entropy_mode = EntropyByteMode::LowByte;
    int jobs = 1;

    SimConfig to_sim_config(std::uint32_t time_seed, std::uint64_t interleave_seed) const;
};

std::string serialize_config(const LabConfig& config);
LabConfig parse_config(const std::string& text);

LabConfig load_config_file(const std::filesystem::path& path);
void save_config_file(const std::filesystem::path& path, const LabConfig& config);

// RHYLAB_CONFIG relocates the default path; missing file means defaults.
std::filesystem::path default_config_path();

}  // namespace rhylab
