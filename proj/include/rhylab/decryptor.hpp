#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhylab/fleet.hpp"
#include "rhylab/footer.hpp"
#include "rhylab/oracle.hpp"
#include "rhylab/order.hpp"
#include "rhylab/util.hpp"

namespace rhylab {

struct KeyIv {
    std::array<std::uint8_t, 32> key;
    std::array<std::uint8_t, 16> iv;
};

// Per-thread key material regenerated from the seed: block k of thread t
// is the k-th 80-byte draw after the ready-check discard; bytes 0..47 are
// key||iv, the remaining 32 are the OAEP seeds the encryptor burned.
class KeystreamLedger {
  public:
    KeystreamLedger(std::uint32_t seed, int processors, Arch arch, EntropyByteMode entropy_mode,
                    std::span<const std::size_t> blocks_per_thread);

    const KeyIv& at(int thread_id, int key_index) const;  // key_index is 1-based
    std::size_t count(int thread_id) const;
    std::uint64_t bytes_emitted(int thread_id) const;

  private:
    std::vector<std::vector<KeyIv>> per_thread_;
    std::vector<std::uint64_t> emitted_;
};

// Splits encrypted bytes into body and parsed footer. The offset plan for
// decryption comes from the body length: the footer must go first or every
// window lands in the wrong place.
struct StrippedFile {
    Bytes body;
    EncryptedFooter footer;
};
StrippedFile strip_footer(ByteView encrypted);

// CTR re-encryption over the body's offset plan; exact inverse of the
// encryptor for matching key/iv.
void decrypt_body(ByteSpan body, ByteView key32, ByteView iv16);

enum class RecoveryStatus { Recovered, Ambiguous, Failed, Skipped };
const char* status_name(RecoveryStatus s);

struct FileReport {
    std::string enc_path;
    std::string logical_path;
    int thread_id = 0;
    int lo = 0;
    int hi = 0;
    int assigned_key = 0;  // 0 when no unique assignment
    RecoveryStatus status = RecoveryStatus::Failed;
    std::string detail;
    std::string output_path;
};

struct RecoveryReport {
    std::uint32_t seed = 0;
    bool dry_run = false;
    std::vector<FileReport> files;
    std::size_t recovered = 0;
    std::size_t ambiguous = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;

    bool all_recovered() const { return ambiguous == 0 && failed == 0 && skipped == 0; }
};

struct DecryptOptions {
    bool dry_run = false;
    int jobs = 1;
    // Collision groups larger than this are reported failed instead of
    // trialed; the capacity argument says real groups stay tiny.
    std::size_t max_group = 16;
};

// Restores every file covered by the hypothesis: singleton candidates
// decrypt directly; collision groups are resolved by trial-decrypting
// every (file, candidate key) pairing and accepting the unique bijection
// the oracle validates. Outputs are written next to the encrypted files
// under the logical name via temp-file-plus-rename; encrypted inputs are
// never modified.
RecoveryReport decrypt_corpus(const std::filesystem::path& corpus_root, std::uint32_t seed,
                              Arch arch, EntropyByteMode entropy_mode,
                              const OrderHypothesis& hypothesis, const ValidityOracle& oracle,
                              const DecryptOptions& opts = {});

void write_recovery_report(std::ostream& out, const RecoveryReport& report);

}  // namespace rhylab
