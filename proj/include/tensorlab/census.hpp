#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tensorlab/f2.hpp"

namespace tensorlab {

/// One orbit of nonzero codes under GL_p x GL_q x GL_r over F2.
struct OrbitRecord {
    std::uint16_t index = 0;       // 1-based, in order of discovery
    F2Code canonical = 0;          // least member
    std::uint32_t size = 0;
    std::uint8_t rank = 0;
    std::uint16_t large_index = 0; // 1-based, in table order; 0 until merged
};

/// Union of the small orbits related by format-preserving direction permutations.
struct LargeOrbit {
    int index = 0;
    F2Code canonical = 0;
    std::uint64_t size = 0;
    int rank = 0;
    std::vector<int> members; // small-orbit indices, ascending
};

/// Per-code tables indexed directly by code; slot 0 (the zero array) is unused
/// and holds 0 everywhere.
struct CensusTables {
    Dims dims;
    std::vector<std::uint8_t> orbit_id;
    std::vector<F2Code> link; // empty in low-memory mode or after loading a cache
    std::vector<std::uint8_t> rank;
    std::vector<OrbitRecord> orbits;

    F2Code code_count() const { return f2_code_limit(dims); }
    const OrbitRecord& orbit_of(F2Code x) const { return orbits.at(orbit_id.at(x) - 1); }
};

struct CensusOptions {
    int threads = 1;
    bool low_memory = false;
    /// Called with a stage name and a fraction in [0, 1].
    std::function<void(const std::string&, double)> progress;
};

/// Full orbit of a nonzero code, sorted ascending.
std::vector<F2Code> spin_orbit(F2Code x, Dims d, const std::vector<GroupElement>& generators);

/// Ascending scan assigning orbit ids; fills orbit_id and orbits (without ranks).
CensusTables classify_all(Dims d, const CensusOptions& options = {});

/// link[x] is the next larger member of x's orbit, wrapping to the canonical code.
void build_link_array(CensusTables& tables);

/// Level-by-level rank search: seeds the simple arrays with rank 1, then
/// flips the last bit of every rank-n code and stamps n + 1 on the orbit of
/// each unranked result. Uses the link array when present and re-spins otherwise.
void compute_ranks(CensusTables& tables, const CensusOptions& options = {});

/// Assigns large_index on every record and returns the large orbits in table
/// order: by rank, then size, then canonical code.
std::vector<LargeOrbit> merge_large_orbits(CensusTables& tables);

/// Large orbits recovered from the large_index fields of the records.
std::vector<LargeOrbit> large_orbits(const CensusTables& tables);

/// classify_all, build_link_array (unless low-memory), compute_ranks and
/// merge_large_orbits in sequence.
CensusTables run_census(Dims d, const CensusOptions& options = {});

/// Per-rank totals, index = rank (0 counts the zero array).
struct RankSummary {
    std::vector<std::uint64_t> small;
    std::vector<std::uint64_t> large;
    std::vector<std::uint64_t> tensors;
};
RankSummary summarize(const CensusTables& tables);

} // namespace tensorlab
