#include "tensorlab/census.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace tensorlab {

namespace {

/// A group element lowered to mask arithmetic; identity factors are skipped.
class CompiledElement {
public:
    CompiledElement(Dims d, const GroupElement& g) {
        for (int dir = 0; dir < 3; ++dir) {
            if (g.matrix(dir).order() != d[dir]) throw std::invalid_argument("generator does not match the format");
            if (g.matrix(dir) != F2Matrix::identity(d[dir])) maps_.emplace_back(d, dir, g.matrix(dir));
        }
        if (g.perm() != identity_perm) {
            perm_.emplace(d, g.perm());
            if (perm_->target_dims() != d) throw std::invalid_argument("generator permutation changes the format");
        }
    }

    F2Code operator()(F2Code x) const {
        for (const LinearCodeMap& m : maps_) x = m(x);
        return perm_ ? (*perm_)(x) : x;
    }

private:
    std::vector<LinearCodeMap> maps_;
    std::optional<PermutationCodeMap> perm_;
};

std::vector<CompiledElement> compile(Dims d, const std::vector<GroupElement>& generators) {
    std::vector<CompiledElement> out;
    out.reserve(generators.size());
    for (const GroupElement& g : generators) out.emplace_back(d, g);
    return out;
}

constexpr std::size_t parallel_threshold = 1u << 14;

/// Worklist spin: O is the set of marked codes, L the current level and N the
/// next one. `is_new` and `mark` work on whichever table serves as O. With
/// several threads a level is expanded in chunks and merged in chunk order,
/// which reproduces the serial visiting order exactly.
template <class IsNew, class Mark>
std::uint64_t spin(F2Code x, const std::vector<CompiledElement>& gens, IsNew is_new, Mark mark, int threads,
                   std::vector<F2Code>* members = nullptr) {
    std::vector<F2Code> level{x}, next;
    mark(x);
    std::uint64_t count = 1;
    if (members) members->push_back(x);
    while (!level.empty()) {
        next.clear();
        if (threads > 1 && level.size() >= parallel_threshold) {
            const std::size_t chunk = (level.size() + threads - 1) / threads;
            std::vector<std::vector<F2Code>> candidates(threads);
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    const std::size_t lo = std::min(level.size(), t * chunk);
                    const std::size_t hi = std::min(level.size(), lo + chunk);
                    for (std::size_t n = lo; n < hi; ++n)
                        for (const CompiledElement& g : gens) {
                            const F2Code z = g(level[n]);
                            if (is_new(z)) candidates[t].push_back(z);
                        }
                });
            }
            for (std::thread& th : pool) th.join();
            for (const auto& part : candidates)
                for (F2Code z : part)
                    if (is_new(z)) {
                        mark(z);
                        next.push_back(z);
                    }
        } else {
            for (F2Code y : level)
                for (const CompiledElement& g : gens) {
                    const F2Code z = g(y);
                    if (is_new(z)) {
                        mark(z);
                        next.push_back(z);
                    }
                }
        }
        count += next.size();
        if (members) members->insert(members->end(), next.begin(), next.end());
        std::swap(level, next);
    }
    return count;
}

void report(const CensusOptions& options, const std::string& stage, double fraction) {
    if (options.progress) options.progress(stage, fraction);
}

/// Codes of all outer products of nonzero vectors.
std::vector<F2Code> simple_codes(Dims d) {
    std::vector<F2Code> out;
    for (unsigned a = 1; a < (1u << d.p); ++a)
        for (unsigned b = 1; b < (1u << d.q); ++b)
            for (unsigned c = 1; c < (1u << d.r); ++c) {
                F2Code code = 0;
                for (int i = 0; i < d.p; ++i)
                    for (int j = 0; j < d.q; ++j)
                        for (int k = 0; k < d.r; ++k)
                            if (((a >> i) & 1u) && ((b >> j) & 1u) && ((c >> k) & 1u))
                                code |= F2Code{1} << f2_bit(d, i, j, k);
                out.push_back(code);
            }
    return out;
}

} // namespace

std::vector<F2Code> spin_orbit(F2Code x, Dims d, const std::vector<GroupElement>& generators) {
    if (x == 0) throw std::invalid_argument("spin_orbit needs a nonzero code");
    if (x > f2_code_limit(d)) throw std::out_of_range("code exceeds the format");
    const std::vector<CompiledElement> gens = compile(d, generators);
    std::vector<std::uint64_t> seen((std::uint64_t{f2_code_limit(d)} >> 6) + 1, 0);
    std::vector<F2Code> members;
    spin(
        x, gens, [&](F2Code z) { return ((seen[z >> 6] >> (z & 63)) & 1u) == 0; },
        [&](F2Code z) { seen[z >> 6] |= std::uint64_t{1} << (z & 63); }, 1, &members);
    std::sort(members.begin(), members.end());
    return members;
}

CensusTables classify_all(Dims d, const CensusOptions& options) {
    if (!d.valid()) throw std::invalid_argument("dimensions outside 1..3");
    CensusTables tables;
    tables.dims = d;
    const F2Code limit = f2_code_limit(d);
    tables.orbit_id.assign(std::size_t{limit} + 1, 0);
    const std::vector<CompiledElement> gens = compile(d, census_generators(d));
    std::uint8_t* ids = tables.orbit_id.data();
    std::uint64_t done = 0;
    for (F2Code x = 1; x != 0 && x <= limit; ++x) {
        if (ids[x] != 0) continue;
        if (tables.orbits.size() == 255) throw std::runtime_error("more than 255 orbits; orbit ids no longer fit a byte");
        const auto w = static_cast<std::uint8_t>(tables.orbits.size() + 1);
        const std::uint64_t size = spin(
            x, gens, [ids](F2Code z) { return ids[z] == 0; }, [ids, w](F2Code z) { ids[z] = w; }, options.threads);
        tables.orbits.push_back(OrbitRecord{w, x, static_cast<std::uint32_t>(size), 0, 0});
        done += size;
        report(options, "classify", static_cast<double>(done) / limit);
    }
    return tables;
}

void build_link_array(CensusTables& tables) {
    const F2Code limit = tables.code_count();
    tables.link.assign(std::size_t{limit} + 1, 0);
    std::vector<F2Code> last(tables.orbits.size() + 1, 0);
    for (F2Code x = 1; x != 0 && x <= limit; ++x) {
        const std::uint8_t w = tables.orbit_id[x];
        if (last[w] != 0) tables.link[last[w]] = x;
        last[w] = x;
    }
    for (const OrbitRecord& rec : tables.orbits) tables.link[last[rec.index]] = rec.canonical;
}

void compute_ranks(CensusTables& tables, const CensusOptions& options) {
    const Dims d = tables.dims;
    const F2Code limit = tables.code_count();
    tables.rank.assign(std::size_t{limit} + 1, 0);
    std::uint8_t* rank = tables.rank.data();
    const bool use_link = !tables.link.empty();
    const std::vector<CompiledElement> gens = use_link ? std::vector<CompiledElement>{}
                                                       : compile(d, census_generators(d));

    const auto stamp = [&](F2Code j, std::uint8_t value) {
        if (use_link) {
            F2Code y = j;
            do {
                rank[y] = value;
                y = tables.link[y];
            } while (y != j);
        } else {
            spin(
                j, gens, [rank](F2Code z) { return rank[z] == 0; }, [rank, value](F2Code z) { rank[z] = value; },
                options.threads);
        }
    };

    for (F2Code s : simple_codes(d)) rank[s] = 1;

    const int threads = std::max(1, options.threads);
    for (std::uint8_t oldrank = 1;; ++oldrank) {
        const auto value = static_cast<std::uint8_t>(oldrank + 1);
        bool stamped = false;
        // Candidates are gathered read-only, one per orbit per chunk, then
        // stamped serially; ranks are constant on orbits so the result does
        // not depend on the chunking.
        const F2Code chunk = limit / threads + 1;
        std::vector<std::vector<F2Code>> candidates(threads);
        const auto scan = [&](int t) {
            std::array<bool, 256> seen{};
            const std::uint64_t lo = std::uint64_t{1} + std::uint64_t{chunk} * t;
            const std::uint64_t hi = std::min<std::uint64_t>(limit, lo + chunk - 1);
            for (std::uint64_t i = lo; i <= hi; ++i) {
                if (rank[i] != oldrank) continue;
                const F2Code j = static_cast<F2Code>(i ^ 1u);
                if (j == 0 || rank[j] != 0) continue;
                const std::uint8_t w = tables.orbit_id[j];
                if (!seen[w]) {
                    seen[w] = true;
                    candidates[t].push_back(j);
                }
            }
        };
        if (threads == 1) {
            scan(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(scan, t);
            for (std::thread& th : pool) th.join();
        }
        for (const auto& part : candidates)
            for (F2Code j : part)
                if (rank[j] == 0) {
                    stamp(j, value);
                    stamped = true;
                }
        report(options, "rank", static_cast<double>(oldrank) / 6.0);
        if (!stamped) break;
        if (oldrank == 254) throw std::logic_error("rank search did not terminate");
    }

    for (F2Code x = 1; x != 0 && x <= limit; ++x) {
        if (rank[x] == 0) throw std::logic_error(fmt::format("code {} left unranked", x));
    }
    for (OrbitRecord& rec : tables.orbits) rec.rank = rank[rec.canonical];
}

std::vector<LargeOrbit> large_orbits(const CensusTables& tables) {
    std::map<int, LargeOrbit> by_index;
    for (const OrbitRecord& rec : tables.orbits) {
        if (rec.large_index == 0) throw std::logic_error("small orbit not merged into a large orbit");
        LargeOrbit& big = by_index[rec.large_index];
        if (big.members.empty()) {
            big.index = rec.large_index;
            big.canonical = rec.canonical;
            big.rank = rec.rank;
        }
        big.canonical = std::min(big.canonical, rec.canonical);
        big.size += rec.size;
        big.members.push_back(rec.index);
    }
    std::vector<LargeOrbit> out;
    for (auto& [idx, big] : by_index) out.push_back(std::move(big));
    return out;
}

std::vector<LargeOrbit> merge_large_orbits(CensusTables& tables) {
    const std::size_t n = tables.orbits.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const DirectionPerm& perm : format_preserving_perms(tables.dims)) {
        const PermutationCodeMap map(tables.dims, perm);
        for (const OrbitRecord& rec : tables.orbits) {
            const int a = find(rec.index - 1);
            const int b = find(tables.orbit_id[map(rec.canonical)] - 1);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::map<int, LargeOrbit> groups;
    for (const OrbitRecord& rec : tables.orbits) {
        LargeOrbit& big = groups[find(rec.index - 1)];
        if (big.members.empty()) {
            big.canonical = rec.canonical;
            big.rank = rec.rank;
        } else if (big.rank != rec.rank) {
            throw std::logic_error("direction permutation changed a rank");
        }
        big.canonical = std::min(big.canonical, rec.canonical);
        big.size += rec.size;
        big.members.push_back(rec.index);
    }
    std::vector<LargeOrbit> out;
    for (auto& [root, big] : groups) out.push_back(std::move(big));
    std::sort(out.begin(), out.end(), [](const LargeOrbit& x, const LargeOrbit& y) {
        return std::tie(x.rank, x.size, x.canonical) < std::tie(y.rank, y.size, y.canonical);
    });
    for (std::size_t v = 0; v < out.size(); ++v) {
        out[v].index = static_cast<int>(v + 1);
        for (int m : out[v].members) tables.orbits[m - 1].large_index = static_cast<std::uint16_t>(v + 1);
    }
    return out;
}

CensusTables run_census(Dims d, const CensusOptions& options) {
    CensusTables tables = classify_all(d, options);
    if (!options.low_memory) build_link_array(tables);
    compute_ranks(tables, options);
    tables.link.clear();
    tables.link.shrink_to_fit();
    merge_large_orbits(tables);
    return tables;
}

RankSummary summarize(const CensusTables& tables) {
    int top = 0;
    for (const OrbitRecord& rec : tables.orbits) top = std::max<int>(top, rec.rank);
    RankSummary s;
    s.small.assign(top + 1, 0);
    s.large.assign(top + 1, 0);
    s.tensors.assign(top + 1, 0);
    s.small[0] = s.large[0] = s.tensors[0] = 1;
    for (const OrbitRecord& rec : tables.orbits) {
        ++s.small[rec.rank];
        s.tensors[rec.rank] += rec.size;
    }
    for (const LargeOrbit& big : large_orbits(tables)) ++s.large[big.rank];
    return s;
}

} // namespace tensorlab
