#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "rhylab/config.hpp"
#include "rhylab/footer.hpp"
#include "rhylab/manifest.hpp"
#include "rhylab/offset_plan.hpp"
#include "rhylab/traverse.hpp"
#include "rhylab/util.hpp"
#include "support/corpus.hpp"

using namespace rhylab;
namespace fs = std::filesystem;

TEST_CASE("offset plan: under 1 MiB encrypts the whole file") {
    auto plan = offset_plan(512 * 1024);
    CHECK(plan.div == 1);
    REQUIRE(plan.windows.size() == 1);
    CHECK(plan.windows[0] == Window{0, 512 * 1024});
    CHECK(plan.encrypted_bytes() == 512 * 1024);
}

TEST_CASE("offset plan: 5 MiB splits into four 1 MiB windows") {
    auto plan = offset_plan(5 * kMiB);
    CHECK(plan.div == 4);
    REQUIRE(plan.windows.size() == 4);
    CHECK(plan.windows[0] == Window{0, kMiB});
    CHECK(plan.windows[1] == Window{1'310'720, kMiB});
    CHECK(plan.windows[2] == Window{2'621'440, kMiB});
    CHECK(plan.windows[3] == Window{3'932'160, kMiB});
}

TEST_CASE("offset plan: 2.5 MiB uses the middle branch") {
    auto plan = offset_plan(2'621'440);  // exactly 2.5 MiB
    CHECK(plan.div == 2);
    REQUIRE(plan.windows.size() == 2);
    CHECK(plan.windows[0] == Window{0, kMiB});
    CHECK(plan.windows[1] == Window{1'310'720, kMiB});
}

TEST_CASE("offset plan: zero-size file has no windows") {
    auto plan = offset_plan(0);
    CHECK(plan.windows.empty());
    CHECK(plan.encrypted_bytes() == 0);
}

TEST_CASE("offset plan: windows never overlap or cross the end") {
    SplitMix64 rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        std::uint64_t size = rng.next() % (9 * kMiB);
        auto plan = offset_plan(size);
        std::uint64_t prev_end = 0;
        for (const auto& w : plan.windows) {
            CHECK(w.offset >= prev_end);
            CHECK(w.offset + w.length <= size);
            CHECK(w.length >= 1);
            prev_end = w.offset + w.length;
        }
        if (size > 0 && size < kMiB) CHECK(plan.encrypted_bytes() == size);
        std::uint64_t expected_div = size >= 4 * kMiB ? 4 : size >= kMiB ? size / kMiB : 1;
        if (size > 0) CHECK(plan.div == expected_div);
    }
}

TEST_CASE("offset plan boundary sizes hit the right branches") {
    CHECK(offset_plan(kMiB - 1).div == 1);
    CHECK(offset_plan(kMiB).div == 1);
    CHECK(offset_plan(kMiB).windows.size() == 1);
    CHECK(offset_plan(2 * kMiB - 1).div == 1);
    CHECK(offset_plan(2 * kMiB).div == 2);
    CHECK(offset_plan(4 * kMiB - 1).div == 3);
    CHECK(offset_plan(4 * kMiB).div == 4);
    CHECK(offset_plan(100 * kMiB).div == 4);
}

TEST_CASE("footer serializes to exactly 0x40C bytes and round-trips") {
    EncryptedFooter f;
    SplitMix64 rng(2);
    for (auto& b : f.rsa_key_ct) b = static_cast<std::uint8_t>(rng.next());
    for (auto& b : f.rsa_iv_ct) b = static_cast<std::uint8_t>(rng.next());
    f.reserved.fill(0);
    f.version = kDefaultVersion;

    Bytes wire = f.serialize();
    REQUIRE(wire.size() == 0x40C);
    EncryptedFooter back = EncryptedFooter::parse(ByteView(wire));
    CHECK(back.rsa_key_ct == f.rsa_key_ct);
    CHECK(back.rsa_iv_ct == f.rsa_iv_ct);
    CHECK(back.reserved == f.reserved);
    CHECK(back.version == f.version);

    wire.pop_back();
    CHECK_THROWS_AS(EncryptedFooter::parse(ByteView(wire)), std::invalid_argument);
}

TEST_CASE("traverse: ascending DFS enters directories first") {
    testcorpus::TempDir tmp("traverse");
    auto root = tmp.path();
    fs::create_directories(root / "a" / "c");
    std::ofstream(root / "b") << "b";
    std::ofstream(root / "a" / "y") << "y";
    std::ofstream(root / "a" / "c" / "z") << "z";

    auto walk = traverse(root);
    REQUIRE(walk.files.size() == 3);
    CHECK(walk.files[0].path == "a/c/z");
    CHECK(walk.files[1].path == "a/y");
    CHECK(walk.files[2].path == "b");
    CHECK(walk.skipped.empty());
}

TEST_CASE("traverse: simple two-entry tree") {
    testcorpus::TempDir tmp("traverse2");
    auto root = tmp.path();
    fs::create_directories(root / "a");
    std::ofstream(root / "a" / "x") << "x";
    std::ofstream(root / "b") << "b";
    auto walk = traverse(root);
    REQUIRE(walk.files.size() == 2);
    CHECK(walk.files[0].path == "a/x");
    CHECK(walk.files[1].path == "b");
}

TEST_CASE("traverse: empty corpus gives an empty list") {
    testcorpus::TempDir tmp("traverse3");
    CHECK(traverse(tmp.path()).files.empty());
    CHECK_THROWS_AS(traverse(tmp.path() / "missing"), std::invalid_argument);
}

TEST_CASE("traverse: symlinks and specials are recorded, not followed") {
    testcorpus::TempDir tmp("traverse4");
    auto root = tmp.path();
    std::ofstream(root / "real") << "data";
    fs::create_symlink("/etc", root / "escape");

    auto walk = traverse(root);
    REQUIRE(walk.files.size() == 1);
    CHECK(walk.files[0].path == "real");
    REQUIRE(walk.skipped.size() == 1);
    CHECK(walk.skipped[0].path == "escape");
}

TEST_CASE("traverse: marker suffix is stripped for ordering") {
    testcorpus::TempDir tmp("traverse5");
    auto root = tmp.path();
    // "a.b" must sort before "a" + suffix would place it; with logical
    // names, a.enc orders as "a" and precedes "a.b".
    std::ofstream(root / "a.enc") << "1";
    std::ofstream(root / "a.b.enc") << "2";
    std::ofstream(root / "plain") << "3";

    TraverseOptions opts;
    opts.marker_suffix = ".enc";
    auto walk = traverse(root, opts);
    REQUIRE(walk.files.size() == 3);
    CHECK(walk.files[0].logical_path == "a");
    CHECK(walk.files[0].encrypted);
    CHECK(walk.files[1].logical_path == "a.b");
    CHECK(walk.files[2].logical_path == "plain");
    CHECK(!walk.files[2].encrypted);
}

TEST_CASE("traverse: excluded names never appear") {
    testcorpus::TempDir tmp("traverse6");
    auto root = tmp.path();
    std::ofstream(root / "keep") << "k";
    std::ofstream(root / "MARKER") << "m";
    TraverseOptions opts;
    opts.exclude_names = {"MARKER"};
    auto walk = traverse(root, opts);
    REQUIRE(walk.files.size() == 1);
    CHECK(walk.files[0].path == "keep");
}

TEST_CASE("mtime write/read round-trips at microsecond precision") {
    testcorpus::TempDir tmp("mtime");
    auto p = tmp.path() / "f";
    std::ofstream(p) << "x";
    write_mtime_us(p, 1'700'000'123'456'789);
    CHECK(read_mtime_us(p) == 1'700'000'123'456'789);
}

TEST_CASE("field escaping round-trips hostile names") {
    std::string name = "dir/has space\tand%percent\nnewline";
    std::string esc = escape_field(name);
    CHECK(esc.find(' ') == std::string::npos);
    CHECK(esc.find('\t') == std::string::npos);
    CHECK(esc.find('\n') == std::string::npos);
    CHECK(unescape_field(esc) == name);
}

TEST_CASE("hex round trip") {
    Bytes b = from_hex("00ff10ab");
    CHECK(to_hex(ByteView(b)) == "00ff10ab");
    CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

TEST_CASE("config serialize/parse round-trips") {
    LabConfig c;
    c.processors = 8;
    c.arch = Arch::X86;
    c.stack_capacity = 4;
    c.tick_us = 10;
    c.clock_hz = 3'000'000'000ull;
    c.window_span = 1234;
    c.oracle = OracleKind::Entropy;
    c.entropy_threshold = 6.5;
    c.magic_table_path = "sig.txt";
    c.marker_suffix = ".locked";
    c.start_offset_ticks = 42;
    c.entropy_mode = EntropyByteMode::Low7Bit;
    c.jobs = 3;

    LabConfig back = parse_config(serialize_config(c));
    CHECK(serialize_config(back) == serialize_config(c));
    CHECK(back.processors == 8);
    CHECK(back.arch == Arch::X86);
    CHECK(back.oracle == OracleKind::Entropy);
    CHECK(back.entropy_mode == EntropyByteMode::Low7Bit);

    CHECK_THROWS_AS(parse_config("nonsense\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("unknown_key=1\n"), std::invalid_argument);
    // comments and blanks are fine
    CHECK(parse_config("# comment\n\nprocessors=2\n").processors == 2);
}

TEST_CASE("manifest round-trips records and escrow") {
    testcorpus::TempDir tmp("manifest");
    InfectionRecord rec;
    rec.config.time_seed = 1'700'000'000;
    rec.config.processors = 2;
    rec.config.arch = Arch::X86;
    rec.config.interleave_seed = 99;
    rec.rsa.n = crypto::BigUint::from_hex("c0ffee");
    rec.rsa.e = crypto::BigUint(65537);
    rec.rsa.d = crypto::BigUint::from_hex("ab");
    rec.rsa.p = crypto::BigUint::from_hex("03");
    rec.rsa.q = crypto::BigUint::from_hex("05");
    rec.generator_bytes_emitted = {8, 168, 88};
    rec.skipped.push_back({"weird name", "symlink (not followed)"});

    FileRecord f;
    f.path = "dir/file with space.txt";
    f.size = 12345;
    f.thread_id = 2;
    f.key_index = 3;
    for (std::size_t i = 0; i < 32; ++i) f.key[i] = static_cast<std::uint8_t>(i);
    for (std::size_t i = 0; i < 16; ++i) f.iv[i] = static_cast<std::uint8_t>(0xF0 + i);
    f.mtime_ticks = 1'700'000'000'123'456;
    rec.files.push_back(f);
    FileRecord g;
    g.path = "unreadable.bin";
    g.size = 7;
    g.thread_id = 1;
    g.key_index = 0;  // never encrypted
    g.status = "io error: cannot open";
    rec.files.push_back(g);

    auto path = tmp.path() / "m.manifest";
    write_manifest(path, rec);
    InfectionRecord back = read_manifest(path);

    CHECK(back.config.time_seed == rec.config.time_seed);
    CHECK(back.config.processors == 2);
    CHECK(back.config.arch == Arch::X86);
    CHECK(back.config.interleave_seed == 99);
    CHECK(back.rsa.n == rec.rsa.n);
    CHECK(back.rsa.d == rec.rsa.d);
    CHECK(back.generator_bytes_emitted == rec.generator_bytes_emitted);
    REQUIRE(back.skipped.size() == 1);
    CHECK(back.skipped[0].path == "weird name");
    REQUIRE(back.files.size() == 2);
    CHECK(back.files[0].path == f.path);
    CHECK(back.files[0].key == f.key);
    CHECK(back.files[0].iv == f.iv);
    CHECK(back.files[0].mtime_ticks == f.mtime_ticks);
    CHECK(back.files[1].key_index == 0);
    CHECK(back.files[1].status == "io error: cannot open");
}
