#include "rhylab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rhylab/offset_plan.hpp"
#include "rhylab/traverse.hpp"

namespace rhylab {

namespace fs = std::filesystem;

std::string extension_of(const std::string& logical_path) {
    auto slash = logical_path.find_last_of('/');
    auto base = slash == std::string::npos ? logical_path : logical_path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == base.size()) return "";
    std::string ext = base.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---- KnownPlaintextOracle ----

void KnownPlaintextOracle::add(const std::string& logical_path, ByteView file_content) {
    Known k;
    auto plan = offset_plan(file_content.size());
    k.window_len = plan.windows.empty() ? 0 : plan.windows.front().length;
    ByteView window = file_content.subspan(0, k.window_len);
    k.prefix.assign(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                        kPrefixBytes, window.size())));
    k.window_digest = crypto::Sha256::hash(window);
    known_[logical_path] = std::move(k);
}

KnownPlaintextOracle KnownPlaintextOracle::from_snapshot(const fs::path& snapshot_root) {
    KnownPlaintextOracle oracle;
    TraverseResult walk = traverse(snapshot_root);
    for (const auto& meta : walk.files) {
        std::ifstream in(snapshot_root / meta.path, std::ios::binary);
        if (!in) throw std::runtime_error("snapshot: cannot read " + meta.path);
        Bytes content(meta.size);
        if (meta.size &&
            !in.read(reinterpret_cast<char*>(content.data()),
                     static_cast<std::streamsize>(meta.size)))
            throw std::runtime_error("snapshot: short read " + meta.path);
        oracle.add(meta.logical_path, ByteView(content));
    }
    return oracle;
}

bool KnownPlaintextOracle::match_prefix(const FileMeta& meta, ByteView prefix) const {
    auto it = known_.find(meta.logical_path);
    if (it == known_.end()) return false;
    const Known& k = it->second;
    std::size_t n = std::min(prefix.size(), k.prefix.size());
    return std::memcmp(prefix.data(), k.prefix.data(), n) == 0;
}

bool KnownPlaintextOracle::confirm(const FileMeta& meta, ByteView window) const {
    auto it = known_.find(meta.logical_path);
    if (it == known_.end()) return false;
    const Known& k = it->second;
    if (window.size() != k.window_len) return false;
    return crypto::Sha256::hash(window) == k.window_digest;
}

void KnownPlaintextOracle::save_digest_file(const fs::path& file) const {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("digest file: cannot write " + file.string());
    out << "rhylab-digests v1\n";
    for (const auto& [path, k] : known_) {
        out << escape_field(path) << " " << k.window_len << " " << crypto::digest_hex(k.window_digest)
            << " " << (k.prefix.empty() ? "-" : to_hex(ByteView(k.prefix))) << "\n";
    }
}

KnownPlaintextOracle KnownPlaintextOracle::from_digest_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("digest file: cannot read " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "rhylab-digests v1")
        throw std::runtime_error("digest file: bad magic");
    KnownPlaintextOracle oracle;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string path, digest_hex_s, prefix_hex;
        Known k;
        if (!(ss >> path >> k.window_len >> digest_hex_s >> prefix_hex))
            throw std::runtime_error("digest file: bad line: " + line);
        Bytes digest = from_hex(digest_hex_s);
        if (digest.size() != 32) throw std::runtime_error("digest file: bad digest: " + line);
        std::copy(digest.begin(), digest.end(), k.window_digest.begin());
        if (prefix_hex != "-") k.prefix = from_hex(prefix_hex);
        oracle.known_[unescape_field(path)] = std::move(k);
    }
    return oracle;
}

// ---- MagicOracle ----

void MagicOracle::add(const std::string& extension, std::size_t offset, ByteView magic) {
    by_extension_[extension].push_back({offset, Bytes(magic.begin(), magic.end())});
    prefix_bytes_ = std::max(prefix_bytes_, offset + magic.size());
}

MagicOracle MagicOracle::builtin() {
    MagicOracle m;
    auto add_hex = [&m](const char* ext, std::size_t off, const char* hex) {
        Bytes b = from_hex(hex);
        m.add(ext, off, ByteView(b));
    };
    add_hex("png", 0, "89504e470d0a1a0a");
    add_hex("jpg", 0, "ffd8ff");
    add_hex("jpeg", 0, "ffd8ff");
    add_hex("gif", 0, "47494638");
    add_hex("pdf", 0, "25504446");
    add_hex("zip", 0, "504b0304");
    add_hex("docx", 0, "504b0304");
    add_hex("xlsx", 0, "504b0304");
    add_hex("pptx", 0, "504b0304");
    add_hex("gz", 0, "1f8b");
    add_hex("bz2", 0, "425a68");
    add_hex("xz", 0, "fd377a585a00");
    add_hex("7z", 0, "377abcaf271c");
    add_hex("sqlite", 0, "53514c69746520666f726d6174203300");
    add_hex("exe", 0, "4d5a");
    add_hex("dll", 0, "4d5a");
    add_hex("elf", 0, "7f454c46");
    add_hex("bmp", 0, "424d");
    add_hex("mp3", 0, "494433");
    add_hex("wav", 0, "52494646");
    return m;
}

MagicOracle MagicOracle::from_table_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("magic table: cannot read " + file.string());
    MagicOracle m;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string ext, hex;
        std::size_t offset;
        if (!(ss >> ext >> offset >> hex)) continue;  // blank or comment-only line
        Bytes b = from_hex(hex);
        m.add(ext, offset, ByteView(b));
    }
    if (m.by_extension_.empty()) throw std::runtime_error("magic table: no entries in " + file.string());
    return m;
}

bool MagicOracle::match_prefix(const FileMeta& meta, ByteView prefix) const {
    auto it = by_extension_.find(extension_of(meta.logical_path));
    if (it == by_extension_.end()) return false;
    for (const auto& sig : it->second) {
        if (sig.offset + sig.bytes.size() > prefix.size()) continue;
        if (std::memcmp(prefix.data() + sig.offset, sig.bytes.data(), sig.bytes.size()) == 0)
            return true;
    }
    return false;
}

// ---- EntropyOracle ----

double EntropyOracle::shannon_bits_per_byte(ByteView data) {
    if (data.empty()) return 0.0;
    std::array<std::size_t, 256> counts = {};
    for (std::uint8_t b : data) ++counts[b];
    double entropy = 0.0;
    const double n = static_cast<double>(data.size());
    for (std::size_t c : counts) {
        if (!c) continue;
        double p = static_cast<double>(c) / n;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

bool EntropyOracle::match_prefix(const FileMeta& meta, ByteView prefix) const {
    (void)meta;
    if (prefix.empty()) return true;  // zero-length originals are vacuously fine
    return shannon_bits_per_byte(prefix.subspan(0, std::min<std::size_t>(256, prefix.size()))) <
           threshold_;
}

}  // namespace rhylab
