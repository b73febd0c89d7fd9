#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <doctest.h>
#include <fmt/format.h>

#include "tensorlab/census.hpp"
#include "tensorlab/census_io.hpp"
#include "tensorlab/oracle.hpp"
#include "tensorlab/text_io.hpp"

using namespace tensorlab;
namespace fs = std::filesystem;

namespace {

std::uint64_t group_order(Dims d) {
    const auto gl = [](int n) -> std::uint64_t { return n == 1 ? 1 : n == 2 ? 6 : 168; };
    return gl(d.p) * gl(d.q) * gl(d.r);
}

fs::path temp_path(const std::string& name) {
    return fs::temp_directory_path() / ("tensorlab_test_" + std::to_string(::getpid()) + "_" + name);
}

void check_against_oracle(Dims d) {
    const CensusTables tables = run_census(d);
    const std::vector<int> oracle = oracle_rank_table(d);
    for (F2Code x = 1; x <= f2_code_limit(d); ++x) {
        INFO("code " << x);
        CHECK(tables.rank[x] == oracle[x]);
    }
}

bool same_tables(const CensusTables& a, const CensusTables& b) {
    if (a.orbit_id != b.orbit_id || a.rank != b.rank || a.orbits.size() != b.orbits.size()) return false;
    for (std::size_t n = 0; n < a.orbits.size(); ++n) {
        const OrbitRecord &x = a.orbits[n], &y = b.orbits[n];
        if (x.index != y.index || x.canonical != y.canonical || x.size != y.size || x.rank != y.rank ||
            x.large_index != y.large_index)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("census ranks equal exhaustive-search ranks on small formats") {
    for (const Dims d : {Dims{2, 2, 2}, Dims{2, 2, 3}, Dims{1, 3, 3}, Dims{1, 2, 3}, Dims{2, 3, 2}, Dims{1, 1, 1}}) {
        INFO("format " << d.p << "x" << d.q << "x" << d.r);
        check_against_oracle(d);
    }
}

TEST_CASE("2x2x2 census shape") {
    const CensusTables t = run_census(Dims{2, 2, 2});
    const RankSummary s = summarize(t);
    CHECK(s.tensors.size() == 4); // ranks 0..3
    std::uint64_t total = 0;
    for (std::size_t r = 1; r < s.tensors.size(); ++r) total += s.tensors[r];
    CHECK(total == 255);
    CHECK(s.tensors[0] == 1);
}

TEST_CASE("orbits partition the codes and satisfy Lagrange") {
    for (const Dims d : {Dims{2, 2, 2}, Dims{2, 3, 3}, Dims{2, 2, 3}}) {
        const CensusTables t = run_census(d);
        std::uint64_t total = 0;
        for (const OrbitRecord& rec : t.orbits) {
            total += rec.size;
            CHECK(group_order(d) % rec.size == 0);
        }
        CHECK(total == f2_code_limit(d));
        std::vector<std::uint64_t> counted(t.orbits.size() + 1);
        for (F2Code x = 1; x <= f2_code_limit(d); ++x) ++counted.at(t.orbit_id[x]);
        for (const OrbitRecord& rec : t.orbits) CHECK(counted[rec.index] == rec.size);
        for (const LargeOrbit& big : large_orbits(t))
            CHECK((group_order(d) * format_preserving_perms(d).size()) % big.size == 0);
    }
}

TEST_CASE("canonical forms are orbit minima and ids follow their order") {
    const CensusTables t = run_census(Dims{2, 3, 3});
    const auto gens = census_generators(t.dims);
    F2Code previous = 0;
    for (const OrbitRecord& rec : t.orbits) {
        CHECK(rec.canonical > previous);
        previous = rec.canonical;
        const std::vector<F2Code> orbit = spin_orbit(rec.canonical, t.dims, gens);
        CHECK(orbit.front() == rec.canonical);
        CHECK(orbit.size() == rec.size);
        for (F2Code x : orbit) CHECK(t.orbit_id[x] == rec.index);
    }
}

TEST_CASE("link array cycles through each orbit") {
    CensusTables t = classify_all(Dims{2, 3, 3});
    build_link_array(t);
    for (F2Code x = 1; x <= t.code_count(); ++x) CHECK(t.orbit_id[t.link[x]] == t.orbit_id[x]);
    for (const OrbitRecord& rec : t.orbits) {
        F2Code x = rec.canonical;
        std::uint32_t steps = 0;
        do {
            const F2Code next = t.link[x];
            if (next != rec.canonical) CHECK(next > x);
            x = next;
            ++steps;
        } while (x != rec.canonical && steps <= rec.size);
        CHECK(steps == rec.size);
    }

    CensusTables single = classify_all(Dims{1, 1, 1});
    build_link_array(single);
    CHECK(single.link[1] == 1u);
}

TEST_CASE("spinning") {
    const Dims d{3, 3, 3};
    CHECK(spin_orbit(1, d, census_generators(d)).size() == 343);
    // Second row of the large-orbit table, pattern .......................1.1.:
    // its large orbit is the union of the small orbits of all direction permutations.
    std::set<F2Code> large;
    for (const DirectionPerm& perm : format_preserving_perms(d)) {
        const PermutationCodeMap map(d, perm);
        for (F2Code x : spin_orbit(map(0b1010), d, census_generators(d))) large.insert(x);
    }
    CHECK(large.size() == 6174);
    const std::vector<GroupElement> trivial{GroupElement::identity(d)};
    CHECK(spin_orbit(12345, d, trivial) == std::vector<F2Code>{12345});
}

TEST_CASE("low-memory and threaded runs produce identical tables") {
    const Dims d{2, 3, 3};
    const CensusTables base = run_census(d);
    CensusOptions low;
    low.low_memory = true;
    CHECK(same_tables(base, run_census(d, low)));
    CensusOptions threaded;
    threaded.threads = 3;
    CHECK(same_tables(base, run_census(d, threaded)));
}

TEST_CASE("rank is subadditive and invariant on 2x3x3") {
    const CensusTables t = run_census(Dims{2, 3, 3});
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<F2Code> pick(1, t.code_count());
    for (int n = 0; n < 200; ++n) {
        const F2Code x = pick(rng), y = pick(rng);
        if (x != y) CHECK(t.rank[x ^ y] <= t.rank[x] + t.rank[y]);
        const GroupElement g = random_group_element(t.dims, rng, true);
        CHECK(t.rank[act(x, t.dims, g)] == t.rank[x]);
    }
}

TEST_CASE("cache round trip") {
    const CensusTables t = run_census(Dims{2, 2, 3});
    const fs::path path = temp_path("roundtrip.bin");
    save_cache(t, path);
    CHECK_FALSE(fs::exists(path.string() + ".partial"));
    Dims d;
    CHECK(read_cache_dims(path, d));
    CHECK(d == Dims{2, 2, 3});
    const CensusTables back = load_cache(path);
    CHECK(same_tables(t, back));
    CHECK(back.link.empty());

    std::ostringstream a, b;
    emit_table(t, a, TableFormat::tsv);
    emit_table(back, b, TableFormat::tsv);
    CHECK(a.str() == b.str());
    fs::remove(path);
}

TEST_CASE("corrupt caches are rejected") {
    const CensusTables t = run_census(Dims{2, 2, 2});
    const fs::path path = temp_path("corrupt.bin");
    save_cache(t, path);
    const auto full = fs::file_size(path);

    fs::resize_file(path, full - 5);
    CHECK_THROWS_AS(load_cache(path), std::runtime_error);

    save_cache(t, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("X", 1);
    }
    Dims d;
    CHECK_FALSE(read_cache_dims(path, d));
    CHECK_THROWS_AS(load_cache(path), std::runtime_error);

    save_cache(t, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        f.write("\x07\x00", 2);
    }
    CHECK_THROWS_AS(load_cache(path), std::runtime_error);
    fs::remove(path);
    CHECK_THROWS_AS(load_cache(path), std::runtime_error);
}

TEST_CASE("cache lock is released on destruction") {
    const fs::path path = temp_path("locked.bin");
    {
        CacheLock lock(path);
        CHECK(fs::exists(path.string() + ".lock"));
        // A second open file description cannot take the lock meanwhile.
        const int fd = ::open((path.string() + ".lock").c_str(), O_RDWR);
        REQUIRE(fd >= 0);
        CHECK(::flock(fd, LOCK_EX | LOCK_NB) != 0);
        ::close(fd);
    }
    CacheLock again(path);
    fs::remove(path.string() + ".lock");
}

TEST_CASE("table emission") {
    const CensusTables t = run_census(Dims{2, 2, 2});
    std::ostringstream dots, dots2, tsv;
    emit_table(t, dots, TableFormat::dots);
    emit_table(t, dots2, TableFormat::dots);
    emit_table(t, tsv, TableFormat::tsv);
    CHECK(dots.str() == dots2.str());
    CHECK(tsv.str().find("index\trank\tsize\tcanonical\n") == 0);
    CHECK(tsv.str().find("# tensors\t1\t") != std::string::npos);
    const auto big = large_orbits(t);
    REQUIRE_FALSE(big.empty());
    CHECK(big.front().rank == 1);
    CHECK(table_row(big.front(), t.dims, TableFormat::tsv) ==
          fmt::format("1\t1\t{}\t{}", big.front().size, dots_pattern(big.front().canonical, t.dims)));
}
