#pragma once

#include <filesystem>

#include "rhylab/sim.hpp"

namespace rhylab {

// Line-oriented ground-truth file written next to a simulated corpus.
// Header is key=value, one per line; then `files=N` followed by exactly N
// records, whitespace-separated with escaped paths:
//   path size thread_id key_index key_hex iv_hex mtime_ticks status
// Full layout documented in docs/formats.md.
void write_manifest(const std::filesystem::path& path, const InfectionRecord& record);
InfectionRecord read_manifest(const std::filesystem::path& path);

}  // namespace rhylab
