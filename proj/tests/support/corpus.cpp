#include "corpus.hpp"

#include <fstream>
#include <stdexcept>

#include "rhylab/crypto/sha256.hpp"
#include "rhylab/traverse.hpp"

namespace testcorpus {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    auto base = fs::temp_directory_path() / ("rhylab-test-" + tag + "-XXXXXX");
    std::string templ = base.string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed for " + templ);
    path_ = templ;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

rhylab::Bytes make_content(std::uint64_t size, std::uint64_t seed, bool text_like) {
    rhylab::Bytes data(size);
    rhylab::SplitMix64 rng(seed);
    if (text_like) {
        static const char kWords[] =
            "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor ";
        const std::size_t wlen = sizeof(kWords) - 1;
        std::size_t phase = static_cast<std::size_t>(rng.next() % wlen);
        for (std::uint64_t i = 0; i < size; ++i)
            data[i] = static_cast<std::uint8_t>(kWords[(i + phase) % wlen]);
    } else {
        std::uint64_t word = 0;
        for (std::uint64_t i = 0; i < size; ++i) {
            if (i % 8 == 0) word = rng.next();
            data[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
        }
    }
    return data;
}

std::vector<std::string> build_corpus(const fs::path& root, const std::vector<std::uint64_t>& sizes,
                                      const CorpusSpec& spec) {
    fs::create_directories(root);
    rhylab::SplitMix64 rng(spec.content_seed);
    std::vector<std::string> paths;
    paths.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "f%04zu.dat", i);
        fs::path rel = (i % 8 == 7) ? fs::path("sub") / name : fs::path(name);
        fs::create_directories((root / rel).parent_path());

        bool text_like = (rng.next() % 1000) < static_cast<std::uint64_t>(spec.text_fraction * 1000);
        rhylab::Bytes content = make_content(sizes[i], spec.content_seed ^ (i * 0x9E37u), text_like);
        std::ofstream out(root / rel, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write corpus file");
        out.write(reinterpret_cast<const char*>(content.data()),
                  static_cast<std::streamsize>(content.size()));
        paths.push_back(rel.generic_string());
    }
    return paths;
}

std::map<std::string, std::string> tree_digests(const fs::path& root) {
    std::map<std::string, std::string> out;
    auto walk = rhylab::traverse(root);
    for (const auto& meta : walk.files) {
        std::ifstream in(root / meta.path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + meta.path);
        rhylab::Bytes data(meta.size);
        if (meta.size &&
            !in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(meta.size)))
            throw std::runtime_error("short read " + meta.path);
        out[meta.path] = rhylab::crypto::digest_hex(rhylab::crypto::Sha256::hash(rhylab::ByteView(data)));
    }
    return out;
}

void copy_tree(const fs::path& from, const fs::path& to) {
    fs::copy(from, to, fs::copy_options::recursive);
}

}  // namespace testcorpus
