#pragma once

#include <cstdint>
#include <string>

namespace rhylab {

// Metadata for one corpus entry: the only evidence the recovery path gets.
// `path` is the corpus-relative on-disk name; `logical_path` has the
// encryption marker suffix stripped and is what ordering and oracles key on.
struct FileMeta {
    std::string path;
    std::string logical_path;
    std::uint64_t size = 0;
    std::int64_t mtime_ticks = 0;
    bool encrypted = false;

    bool operator==(const FileMeta&) const = default;
};

}  // namespace rhylab
