// Properties of the full 3x3x3 census. The tables come from the cache named by
// TENSORLAB_CACHE (written by the census fixture), or are computed when unset.

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include <doctest.h>

#include "tensorlab/census.hpp"
#include "tensorlab/census_io.hpp"
#include "tensorlab/text_io.hpp"

using namespace tensorlab;

namespace {

const CensusTables& tables() {
    static const CensusTables t = [] {
        const char* path = std::getenv("TENSORLAB_CACHE");
        if (path && *path && std::filesystem::exists(path)) return load_cache(path);
        return run_census(Dims{3, 3, 3});
    }();
    return t;
}

constexpr std::uint64_t gl3_cubed = 4741632;

} // namespace

TEST_CASE("orbit counts") {
    const CensusTables& t = tables();
    CHECK(t.orbits.size() == 115);
    CHECK(large_orbits(t).size() == 55);
    CHECK(t.orbits.front().canonical == 1u);
}

TEST_CASE("orbit sizes divide the group order and sum to all nonzero codes") {
    const CensusTables& t = tables();
    std::uint64_t total = 0;
    for (const OrbitRecord& rec : t.orbits) {
        CHECK(gl3_cubed % rec.size == 0);
        total += rec.size;
    }
    CHECK(total == 134217727);
    for (const LargeOrbit& big : large_orbits(t)) CHECK((6 * gl3_cubed) % big.size == 0);
}

TEST_CASE("orbit ids increase with canonical forms") {
    const CensusTables& t = tables();
    for (std::size_t n = 1; n < t.orbits.size(); ++n) CHECK(t.orbits[n - 1].canonical < t.orbits[n].canonical);
}

TEST_CASE("canonical forms are minimal in their orbits") {
    const CensusTables& t = tables();
    const auto gens = census_generators(t.dims);
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> pick(0, t.orbits.size() - 1);
    for (int n = 0; n < 20; ++n) {
        const OrbitRecord& rec = t.orbits[pick(rng)];
        const std::vector<F2Code> orbit = spin_orbit(rec.canonical, t.dims, gens);
        CHECK(orbit.front() == rec.canonical);
        CHECK(orbit.size() == rec.size);
    }
}

TEST_CASE("every code in an orbit shares its rank") {
    const CensusTables& t = tables();
    for (F2Code x = 1; x <= t.code_count(); x += 97) CHECK(t.rank[x] == t.orbit_of(x).rank);
}

TEST_CASE("rank invariance and subadditivity on random samples") {
    const CensusTables& t = tables();
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<F2Code> pick(1, t.code_count());
    for (int n = 0; n < 100; ++n) {
        const F2Code x = pick(rng), y = pick(rng);
        const GroupElement g = random_group_element(t.dims, rng, true);
        CHECK(t.rank[act(x, t.dims, g)] == t.rank[x]);
        if (x != y) CHECK(t.rank[x ^ y] <= t.rank[x] + t.rank[y]);
    }
}

TEST_CASE("rank histograms") {
    const RankSummary s = summarize(tables());
    REQUIRE(s.tensors.size() == 7);
    const std::uint64_t tensors[] = {1, 343, 43218, 2372286, 47506872, 83670048, 624960};
    const std::uint64_t large[] = {1, 1, 2, 8, 18, 23, 3};
    for (int r = 0; r < 7; ++r) {
        CHECK(s.tensors[r] == tensors[r]);
        CHECK(s.large[r] == large[r]);
    }
}

TEST_CASE("the three rank-6 large orbits") {
    std::vector<std::uint64_t> sizes;
    for (const LargeOrbit& big : large_orbits(tables()))
        if (big.rank == 6) sizes.push_back(big.size);
    CHECK(sizes == std::vector<std::uint64_t>{32256, 197568, 395136});
}

TEST_CASE("table rows and percent line") {
    const CensusTables& t = tables();
    const auto big = large_orbits(t);
    CHECK(table_row(big[0], t.dims, TableFormat::dots) == "   1 1      343 ..........................1");
    CHECK(table_row(big[52], t.dims, TableFormat::dots) == "  53 6    32256 ..1.1.1...1.1...111...1111.");
    std::ostringstream out;
    emit_table(t, out, TableFormat::tsv);
    CHECK(out.str().find("percent\t0.0000\t0.0003\t0.0322\t1.7675\t35.3954\t62.3390\t0.4656\n") != std::string::npos);
}
