#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rhylab/crypto/sha256.hpp"
#include "rhylab/file_meta.hpp"
#include "rhylab/util.hpp"

namespace rhylab {

// Decides whether a trial decryption produced plausible plaintext.
// match_prefix runs on the first prefix_bytes() of the decrypted first
// window and must be cheap: the seed scan calls it millions of times.
// confirm runs on the whole decrypted window, only after a prefix hit.
class ValidityOracle {
  public:
    virtual ~ValidityOracle() = default;

    virtual std::string name() const = 0;
    virtual std::size_t prefix_bytes() const = 0;
    virtual bool match_prefix(const FileMeta& meta, ByteView prefix) const = 0;
    virtual bool confirm(const FileMeta& meta, ByteView window) const {
        (void)meta;
        (void)window;
        return true;
    }
};

// Exact check against a snapshot of the original files: per logical path,
// the first bytes of the first encryption window plus its SHA-256.
class KnownPlaintextOracle final : public ValidityOracle {
  public:
    static constexpr std::size_t kPrefixBytes = 64;

    struct Known {
        Bytes prefix;                 // min(64, window length) bytes
        crypto::Sha256Digest window_digest;
        std::uint64_t window_len = 0;
    };

    static KnownPlaintextOracle from_snapshot(const std::filesystem::path& snapshot_root);
    static KnownPlaintextOracle from_digest_file(const std::filesystem::path& file);
    void save_digest_file(const std::filesystem::path& file) const;

    void add(const std::string& logical_path, ByteView file_content);

    std::string name() const override { return "known"; }
    std::size_t prefix_bytes() const override { return kPrefixBytes; }
    bool match_prefix(const FileMeta& meta, ByteView prefix) const override;
    bool confirm(const FileMeta& meta, ByteView window) const override;

    std::size_t size() const { return known_.size(); }

  private:
    std::map<std::string, Known> known_;
};

// Signature table keyed by file extension; a file passes when any of its
// extension's signatures matches the decrypted bytes at its offset.
class MagicOracle final : public ValidityOracle {
  public:
    struct Signature {
        std::size_t offset;
        Bytes bytes;
    };

    static MagicOracle builtin();
    static MagicOracle from_table_file(const std::filesystem::path& file);

    void add(const std::string& extension, std::size_t offset, ByteView magic);

    std::string name() const override { return "magic"; }
    std::size_t prefix_bytes() const override { return prefix_bytes_; }
    bool match_prefix(const FileMeta& meta, ByteView prefix) const override;

  private:
    std::map<std::string, std::vector<Signature>> by_extension_;
    std::size_t prefix_bytes_ = 16;
};

// Accepts plaintext whose byte entropy over the first 256 decrypted bytes
// falls below a threshold; correctly keyed CTR output of typical documents
// is structured, wrong keys look uniform.
class EntropyOracle final : public ValidityOracle {
  public:
    explicit EntropyOracle(double max_bits_per_byte = 7.2) : threshold_(max_bits_per_byte) {}

    std::string name() const override { return "entropy"; }
    std::size_t prefix_bytes() const override { return 256; }
    bool match_prefix(const FileMeta& meta, ByteView prefix) const override;

    static double shannon_bits_per_byte(ByteView data);

  private:
    double threshold_;
};

std::string extension_of(const std::string& logical_path);

}  // namespace rhylab
