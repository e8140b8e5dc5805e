#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "rhylab/order.hpp"
#include "rhylab/sim.hpp"

using namespace rhylab;

namespace {

FileMeta meta_with_mtime(std::string path, std::int64_t mtime, std::uint64_t size = 100) {
    FileMeta m;
    m.path = path;
    m.logical_path = path;
    m.size = size;
    m.mtime_ticks = mtime;
    m.encrypted = true;
    return m;
}

}  // namespace

TEST_CASE("replay_assignment: round robin over six files and two threads") {
    std::vector<FileMeta> metas;
    for (int i = 0; i < 6; ++i) metas.push_back(meta_with_mtime("f" + std::to_string(i), i));
    auto threads = replay_assignment(metas, 2);
    REQUIRE(threads.size() == 2);
    REQUIRE(threads[0].size() == 3);
    CHECK(threads[0][0].path == "f0");
    CHECK(threads[0][1].path == "f2");
    CHECK(threads[0][2].path == "f4");
    CHECK(threads[1][0].path == "f1");
    CHECK(threads[1][1].path == "f3");
    CHECK(threads[1][2].path == "f5");
}

TEST_CASE("replay_assignment: degenerate processor counts") {
    std::vector<FileMeta> metas = {meta_with_mtime("a", 1), meta_with_mtime("b", 2)};
    auto one = replay_assignment(metas, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 2);

    auto many = replay_assignment(metas, 5);
    REQUIRE(many.size() == 5);
    CHECK(many[0].size() == 1);
    CHECK(many[1].size() == 1);
    CHECK(many[2].empty());
    CHECK_THROWS_AS(replay_assignment(metas, 0), std::invalid_argument);
}

TEST_CASE("infer_order: five files with two tied pairs") {
    // mtimes [t1, t1, t2, t3, t3] -> candidates {1,2}, {1,2}, {3}, {4,5}, {4,5}
    std::vector<FileMeta> files = {
        meta_with_mtime("a", 100), meta_with_mtime("b", 100), meta_with_mtime("c", 200),
        meta_with_mtime("d", 300), meta_with_mtime("e", 300),
    };
    auto order = infer_order(files);
    REQUIRE(order.size() == 5);
    CHECK(order[0].lo == 1);
    CHECK(order[0].hi == 2);
    CHECK(order[1].lo == 1);
    CHECK(order[1].hi == 2);
    CHECK(order[2].lo == 3);
    CHECK(order[2].hi == 3);
    CHECK(order[3].lo == 4);
    CHECK(order[3].hi == 5);
    CHECK(order[4].lo == 4);
    CHECK(order[4].hi == 5);
    CHECK(order[0].group == order[1].group);
    CHECK(order[2].group != order[0].group);
}

TEST_CASE("infer_order: all-distinct mtimes give singleton candidates in sorted order") {
    std::vector<FileMeta> files = {meta_with_mtime("x", 30), meta_with_mtime("y", 10),
                                   meta_with_mtime("z", 20)};
    auto order = infer_order(files);
    REQUIRE(order.size() == 3);
    CHECK(order[0].meta.path == "y");
    CHECK(order[0].lo == 1);
    CHECK(order[0].hi == 1);
    CHECK(order[1].meta.path == "z");
    CHECK(order[1].lo == 2);
    CHECK(order[2].meta.path == "x");
    CHECK(order[2].lo == 3);
}

TEST_CASE("infer_order: all-equal mtimes are totally ambiguous") {
    std::vector<FileMeta> files;
    for (int i = 0; i < 7; ++i) files.push_back(meta_with_mtime("f" + std::to_string(i), 42));
    auto order = infer_order(files);
    for (const auto& e : order) {
        CHECK(e.lo == 1);
        CHECK(e.hi == 7);
        CHECK(e.group == 0);
    }
}

TEST_CASE("infer_order: candidate ranges tile 1..n") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FileMeta> files;
        std::size_t n = rng.next() % 30;
        std::int64_t t = 1000;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.next() % 3 == 0) t += 1 + static_cast<std::int64_t>(rng.next() % 5);
            files.push_back(meta_with_mtime("f" + std::to_string(i), t));
        }
        auto order = infer_order(files);
        int next = 1;
        std::size_t i = 0;
        while (i < order.size()) {
            CHECK(order[i].lo == next);
            std::size_t j = i;
            while (j < order.size() && order[j].group == order[i].group) {
                CHECK(order[j].lo == order[i].lo);
                CHECK(order[j].hi == order[i].hi);
                ++j;
            }
            CHECK(order[i].hi == static_cast<int>(j));
            next = order[i].hi + 1;
            i = j;
        }
        CHECK(next == static_cast<int>(n) + 1);
    }
}

TEST_CASE("collision_capacity reproduces the published byte bounds") {
    auto cap = collision_capacity(6'000'000'000ull, 1400, 18, 1);
    CHECK(cap.max_files == 4);
    REQUIRE(cap.size_bound_per_k.size() == 4);
    CHECK(cap.size_bound_per_k[3] == std::pair<int, std::uint64_t>{4, 22});
    CHECK(cap.size_bound_per_k[2] == std::pair<int, std::uint64_t>{3, 100});
    CHECK(cap.size_bound_per_k[1] == std::pair<int, std::uint64_t>{2, 177});
}

TEST_CASE("collision_capacity bounds strictly decrease in k") {
    auto cap = collision_capacity(3'200'000'000ull, 1400, 18, 10);
    for (std::size_t i = 1; i < cap.size_bound_per_k.size(); ++i)
        CHECK(cap.size_bound_per_k[i].second < cap.size_bound_per_k[i - 1].second);
    CHECK_THROWS_AS(collision_capacity(0, 1400, 18, 1), std::invalid_argument);
}

TEST_CASE("order inference is sound against simulated ground truth") {
    SplitMix64 rng(2024);
    int singleton_checks = 0;
    for (int trial = 0; trial < 300; ++trial) {
        SimConfig c;
        c.time_seed = static_cast<std::uint32_t>(rng.next());
        static const int kP[] = {1, 2, 4, 8};
        static const int kCap[] = {1, 4, 16};
        c.processors = kP[rng.next() % 4];
        c.stack_capacity = kCap[rng.next() % 3];
        c.interleave_seed = rng.next();

        std::vector<std::uint64_t> sizes(1 + rng.next() % 40);
        for (auto& s : sizes) {
            // Tiny-heavy mix so same-tick completions actually happen.
            s = (rng.next() % 2) ? rng.next() % 180 : rng.next() % 100'000;
        }
        auto truth = simulate_order(sizes, c);

        std::vector<FileMeta> metas(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            metas[i] = meta_with_mtime("f" + std::to_string(i), truth[i].mtime_ticks, sizes[i]);
        }

        auto hyp = build_hypothesis(metas, c.processors);
        REQUIRE(hyp.threads.size() == static_cast<std::size_t>(c.processors));
        for (std::size_t t = 0; t < hyp.threads.size(); ++t) {
            for (const auto& entry : hyp.threads[t]) {
                std::size_t idx = std::stoul(entry.meta.path.substr(1));
                CHECK(truth[idx].thread_id == static_cast<int>(t) + 1);
                CHECK(entry.lo <= truth[idx].key_index);
                CHECK(truth[idx].key_index <= entry.hi);
                if (entry.lo == entry.hi) {
                    CHECK(entry.lo == truth[idx].key_index);
                    ++singleton_checks;
                }
            }
        }
    }
    CHECK(singleton_checks > 1000);  // the mix must actually exercise singletons
}

TEST_CASE("order report lists threads and candidate ranges") {
    std::vector<FileMeta> metas = {meta_with_mtime("a", 5), meta_with_mtime("b", 5),
                                   meta_with_mtime("c", 9)};
    auto hyp = build_hypothesis(metas, 1);
    std::ostringstream out;
    write_order_report(out, hyp);
    std::string text = out.str();
    CHECK(text.find("thread 1 files=3") != std::string::npos);
    CHECK(text.find("keys=1..2") != std::string::npos);
    CHECK(text.find("keys=3 ") != std::string::npos);
}

TEST_CASE("build_hypothesis can drop unencrypted entries after replay") {
    std::vector<FileMeta> metas;
    for (int i = 0; i < 6; ++i) {
        auto m = meta_with_mtime("f" + std::to_string(i), 10 + i);
        m.encrypted = (i != 2);  // file 2 was never encrypted
        metas.push_back(m);
    }
    auto hyp = build_hypothesis(metas, 2, /*encrypted_only=*/true);
    // thread 1 got files 0,2,4 by position; file 2 drops out of the key count
    REQUIRE(hyp.threads[0].size() == 2);
    CHECK(hyp.threads[0][0].meta.path == "f0");
    CHECK(hyp.threads[0][0].lo == 1);
    CHECK(hyp.threads[0][1].meta.path == "f4");
    CHECK(hyp.threads[0][1].lo == 2);
    REQUIRE(hyp.threads[1].size() == 3);
}
