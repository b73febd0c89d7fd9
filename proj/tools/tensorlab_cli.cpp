// tensorlab: F2 census of small arrays and exact-rank decompositions over C.
//
// Exit status: 0 when the command's postcondition holds, 1 when it does not
// (residual above tolerance, decomposition failure, I/O failure), 2 on usage
// or input errors.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tensorlab/census.hpp"
#include "tensorlab/census_io.hpp"
#include "tensorlab/decompose.hpp"
#include "tensorlab/errors.hpp"
#include "tensorlab/f2.hpp"
#include "tensorlab/text_io.hpp"

using namespace tensorlab;
namespace fs = std::filesystem;

namespace {

/// Input or usage problem; maps to exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::vector<int> dims{3, 3, 3};
    std::string cache;
    std::string format = "dots";
    bool low_memory = false;
    int threads = 1;
    double tol_rank = Tolerance{}.rank_tol;
    double tol_residual = Tolerance{}.residual_tol;
    std::string input;  // code, or path ("-" for stdin)
    std::string second; // decomposition path for verify

    Dims shape() const { return Dims{dims[0], dims[1], dims[2]}; }
    Tolerance tolerance() const {
        Tolerance t;
        t.rank_tol = tol_rank;
        t.residual_tol = tol_residual;
        t.validate();
        return t;
    }
    fs::path cache_path() const {
        if (!cache.empty()) return cache;
        if (const char* env = std::getenv("TENSORLAB_CACHE"); env && *env) return env;
        return {};
    }
};

std::string read_input(const std::string& where) {
    if (where == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(where);
    if (!in) throw UsageError(fmt::format("cannot read {}", where));
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Decimal or 0x-hex code, or a file holding an F2 array.
F2Code read_code(const RunConfig& cfg, Dims& d) {
    const std::string& s = cfg.input;
    if (!s.empty() && s.find_first_not_of("0123456789abcdefABCDEFxX") == std::string::npos && !fs::exists(s)) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used, 0);
        } catch (const std::exception&) {
            throw UsageError(fmt::format("'{}' is not a code", s));
        }
        if (used != s.size()) throw UsageError(fmt::format("'{}' is not a code", s));
        if (v > f2_code_limit(d)) {
            throw UsageError(fmt::format("code {} is out of range for {}x{}x{} (max {})", s, d.p, d.q, d.r, f2_code_limit(d)));
        }
        return static_cast<F2Code>(v);
    }
    return parse_f2_tensor(read_input(s), d);
}

void print_progress(const std::string& stage, double fraction) {
    std::cerr << fmt::format("\r{:<12} {:5.1f}%", stage, 100.0 * fraction) << (fraction >= 1.0 ? "\n" : "") << std::flush;
}

CensusTables compute(const RunConfig& cfg, Dims d, bool progress) {
    CensusOptions opts;
    opts.threads = cfg.threads;
    opts.low_memory = cfg.low_memory;
    if (progress) opts.progress = print_progress;
    return run_census(d, opts);
}

/// Loads the cache at `path` when it holds format `d`; otherwise computes the
/// census and, when a path is given, persists it.
CensusTables obtain(const RunConfig& cfg, Dims d, bool& loaded, bool progress) {
    const fs::path path = cfg.cache_path();
    loaded = false;
    if (path.empty()) return compute(cfg, d, progress);
    CacheLock lock(path);
    Dims stored;
    if (fs::exists(path) && read_cache_dims(path, stored) && stored == d) {
        loaded = true;
        return load_cache(path);
    }
    CensusTables tables;
    try {
        tables = compute(cfg, d, progress);
        save_cache(tables, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(fs::path(path.string() + ".partial"), ec);
        throw;
    }
    return tables;
}

int cmd_census(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    bool loaded = false;
    const CensusTables tables = obtain(cfg, cfg.shape(), loaded, true);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const RankSummary s = summarize(tables);
    std::uint64_t small = 0, large = 0;
    for (std::size_t r = 1; r < s.small.size(); ++r) {
        small += s.small[r];
        large += s.large[r];
    }
    fmt::print("small={} large={} max_rank={}\n", small, large, s.tensors.size() - 1);
    for (std::size_t r = 1; r < s.tensors.size(); ++r) fmt::print("rank {}: {}\n", r, s.tensors[r]);
    fmt::print("{} in {:.1f} s\n", loaded ? "loaded" : "computed", seconds);
    return 0;
}

int cmd_rank_f2(const RunConfig& cfg) {
    Dims d = cfg.shape();
    const F2Code x = read_code(cfg, d);
    if (x == 0) {
        fmt::print("rank 0\n");
        return 0;
    }
    bool loaded = false;
    const CensusTables tables = obtain(cfg, d, loaded, false);
    const OrbitRecord& rec = tables.orbit_of(x);
    fmt::print("rank {}\nsmall orbit {}\nlarge orbit {}\ncanonical {} {}\n", tables.rank[x], rec.index, rec.large_index,
               rec.canonical, dots_pattern(rec.canonical, d));
    return 0;
}

int cmd_orbit_f2(const RunConfig& cfg) {
    Dims d = cfg.shape();
    const F2Code x = read_code(cfg, d);
    if (x == 0) {
        fmt::print("zero array: orbit {{0}}\n");
        return 0;
    }
    const std::vector<F2Code> orbit = spin_orbit(x, d, census_generators(d));
    fmt::print("size {}\ncanonical {} {}\n", orbit.size(), orbit.front(), dots_pattern(orbit.front(), d));
    return 0;
}

int cmd_table(const RunConfig& cfg) {
    const fs::path path = cfg.cache_path();
    if (path.empty() || !fs::exists(path)) {
        throw std::runtime_error("table needs an existing cache (run 'census' first or set --cache/TENSORLAB_CACHE)");
    }
    CensusTables tables;
    {
        CacheLock lock(path);
        tables = load_cache(path);
    }
    emit_table(tables, std::cout, cfg.format == "tsv" ? TableFormat::tsv : TableFormat::dots);
    return 0;
}

int cmd_decompose(const RunConfig& cfg) {
    const DenseTensor t = parse_tensor(read_input(cfg.input));
    const Decomposition d = decompose(t, cfg.tolerance());
    std::cout << format_decomposition(d);
    return d.residual <= cfg.tol_residual ? 0 : 1;
}

int cmd_rank222(const RunConfig& cfg) {
    const DenseTensor t = parse_tensor(read_input(cfg.input));
    if (t.dims() != Dims{2, 2, 2}) throw UsageError("rank222 needs a 2x2x2 array");
    fmt::print("{}\n", rank_222(t, cfg.tolerance()));
    return 0;
}

int cmd_hyperdet(const RunConfig& cfg) {
    const DenseTensor t = parse_tensor(read_input(cfg.input));
    if (t.dims() != Dims{2, 2, 2}) throw UsageError("hyperdet needs a 2x2x2 array");
    fmt::print("{}\n", format_scalar(hyperdeterminant(t)));
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const DenseTensor t = parse_tensor(read_input(cfg.input));
    const Decomposition d = parse_decomposition(read_input(cfg.second));
    const double res = verify(t, d);
    fmt::print("terms {}\nresidual {:.3e}\n", d.size(), res);
    return res <= cfg.tol_residual ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"F2 census and exact-rank decompositions of small 3-way arrays"};
    app.require_subcommand(1);
    RunConfig cfg;

    const auto dims_check = CLI::Range(1, 3);
    app.add_option("--dims", cfg.dims, "array format P Q R")->expected(3)->allow_extra_args(false)->check(dims_check)->capture_default_str();
    app.add_option("--cache", cfg.cache, "census cache file (default: $TENSORLAB_CACHE)");
    app.add_option("--format", cfg.format, "table format")->check(CLI::IsMember({"tsv", "dots"}))->capture_default_str();
    app.add_flag("--low-memory", cfg.low_memory, "skip the link array and re-spin orbits instead");
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tol-rank", cfg.tol_rank, "relative rank tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-residual", cfg.tol_residual, "relative residual tolerance")->check(CLI::PositiveNumber);
    for (CLI::Option* opt : app.get_options()) opt->configurable();
    app.fallthrough();

    auto* census = app.add_subcommand("census", "classify every code of the format and persist the tables");
    auto* rank_f2 = app.add_subcommand("rank-f2", "rank and orbit of an F2 array");
    rank_f2->add_option("code", cfg.input, "decimal or 0x-hex code, or a file holding the array")->required();
    auto* orbit_f2 = app.add_subcommand("orbit-f2", "size and canonical form of an F2 orbit");
    orbit_f2->add_option("code", cfg.input, "decimal or 0x-hex code, or a file holding the array")->required();
    auto* table = app.add_subcommand("table", "large-orbit table and rank summary from the cache");
    auto* decompose_cmd = app.add_subcommand("decompose", "decompose a complex array");
    decompose_cmd->add_option("tensor", cfg.input, "tensor file, '-' for stdin")->required();
    auto* rank222 = app.add_subcommand("rank222", "rank of a complex 2x2x2 array");
    rank222->add_option("tensor", cfg.input, "tensor file, '-' for stdin")->required();
    auto* hyperdet = app.add_subcommand("hyperdet", "Cayley hyperdeterminant of a 2x2x2 array");
    hyperdet->add_option("tensor", cfg.input, "tensor file, '-' for stdin")->required();
    auto* verify_cmd = app.add_subcommand("verify", "residual of a decomposition against an array");
    verify_cmd->add_option("tensor", cfg.input, "tensor file")->required();
    verify_cmd->add_option("decomposition", cfg.second, "decomposition file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (census->parsed()) return cmd_census(cfg);
        if (rank_f2->parsed()) return cmd_rank_f2(cfg);
        if (orbit_f2->parsed()) return cmd_orbit_f2(cfg);
        if (table->parsed()) return cmd_table(cfg);
        if (decompose_cmd->parsed()) return cmd_decompose(cfg);
        if (rank222->parsed()) return cmd_rank222(cfg);
        if (hyperdet->parsed()) return cmd_hyperdet(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DecompositionFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
