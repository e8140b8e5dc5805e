#include "rhylab/traverse.hpp"

#include <sys/stat.h>
#include <sys/time.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <system_error>

namespace rhylab {

namespace fs = std::filesystem;

namespace {

std::string strip_suffix(const std::string& name, const std::string& suffix) {
    if (!suffix.empty() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return name.substr(0, name.size() - suffix.size());
    }
    return name;
}

struct Entry {
    std::string name;
    std::string logical_name;
    bool is_dir;
};

void walk(const fs::path& root, const fs::path& rel, const TraverseOptions& opts,
          TraverseResult& out) {
    fs::path dir = rel.empty() ? root : root / rel;
    std::vector<Entry> entries;

    std::error_code ec;
    fs::directory_iterator it(dir, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        out.skipped.push_back({(rel.empty() ? "." : rel.generic_string()), ec.message()});
        return;
    }

    for (const auto& de : it) {
        std::string name = de.path().filename().string();
        if (std::find(opts.exclude_names.begin(), opts.exclude_names.end(), name) !=
            opts.exclude_names.end())
            continue;

        std::error_code sec;
        auto st = de.symlink_status(sec);
        if (sec) {
            out.skipped.push_back({(rel / name).generic_string(), sec.message()});
            continue;
        }
        if (fs::is_symlink(st)) {
            out.skipped.push_back({(rel / name).generic_string(), "symlink (not followed)"});
            continue;
        }
        if (fs::is_directory(st)) {
            entries.push_back({name, strip_suffix(name, opts.marker_suffix), true});
        } else if (fs::is_regular_file(st)) {
            entries.push_back({name, strip_suffix(name, opts.marker_suffix), false});
        } else {
            out.skipped.push_back({(rel / name).generic_string(), "not a regular file"});
        }
    }

    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.logical_name < b.logical_name; });

    for (const auto& e : entries) {
        fs::path child_rel = rel / e.name;
        if (e.is_dir) {
            walk(root, child_rel, opts, out);
            continue;
        }
        fs::path full = root / child_rel;
        struct stat sb{};
        if (::stat(full.c_str(), &sb) != 0) {
            out.skipped.push_back({child_rel.generic_string(), std::strerror(errno)});
            continue;
        }
        FileMeta meta;
        meta.path = child_rel.generic_string();
        meta.logical_path = (rel / e.logical_name).generic_string();
        meta.size = static_cast<std::uint64_t>(sb.st_size);
        std::int64_t usec = static_cast<std::int64_t>(sb.st_mtim.tv_sec) * 1'000'000 +
                            sb.st_mtim.tv_nsec / 1000;
        meta.mtime_ticks = usec / opts.tick_us;
        meta.encrypted = e.logical_name != e.name;
        out.files.push_back(std::move(meta));
    }
}

}  // namespace

TraverseResult traverse(const fs::path& root, const TraverseOptions& opts) {
    if (!fs::exists(root)) throw std::invalid_argument("traverse: no such directory: " + root.string());
    if (!fs::is_directory(root))
        throw std::invalid_argument("traverse: not a directory: " + root.string());
    TraverseResult out;
    walk(root, fs::path(), opts, out);
    return out;
}

std::int64_t read_mtime_us(const fs::path& p) {
    struct stat sb{};
    if (::stat(p.c_str(), &sb) != 0)
        throw std::system_error(errno, std::generic_category(), "stat " + p.string());
    return static_cast<std::int64_t>(sb.st_mtim.tv_sec) * 1'000'000 + sb.st_mtim.tv_nsec / 1000;
}

void write_mtime_us(const fs::path& p, std::int64_t usec) {
    struct timeval times[2];
    times[0].tv_sec = usec / 1'000'000;
    times[0].tv_usec = usec % 1'000'000;
    times[1] = times[0];
    if (::utimes(p.c_str(), times) != 0)
        throw std::system_error(errno, std::generic_category(), "utimes " + p.string());
}

}  // namespace rhylab
