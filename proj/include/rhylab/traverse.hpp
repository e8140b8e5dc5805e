#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rhylab/file_meta.hpp"

namespace rhylab {

struct TraverseOptions {
    // Names skipped wherever they appear (safety marker, reports, ...).
    std::vector<std::string> exclude_names;
    // Suffix stripped to obtain the logical name used for ordering.
    std::string marker_suffix;
    // Divisor from microseconds to mtime ticks.
    std::uint32_t tick_us = 1;
};

struct SkippedEntry {
    std::string path;
    std::string reason;
};

struct TraverseResult {
    std::vector<FileMeta> files;
    std::vector<SkippedEntry> skipped;
};

// Depth-first walk in ascending lexicographic order of logical names,
// entering subdirectories before continuing with later siblings. Symlinks
// and non-regular files are recorded as skipped, never followed.
TraverseResult traverse(const std::filesystem::path& root, const TraverseOptions& opts = {});

// Microsecond mtime via stat(); std::filesystem rounds differently
// across platforms and this must match what the simulator stamped.
std::int64_t read_mtime_us(const std::filesystem::path& p);
void write_mtime_us(const std::filesystem::path& p, std::int64_t usec);

}  // namespace rhylab
