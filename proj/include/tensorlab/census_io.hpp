#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "tensorlab/census.hpp"

namespace tensorlab {

inline constexpr std::uint16_t cache_version = 1;

/// Binary layout, little-endian without padding: "F2CENSUS", u16 version,
/// p q r as three bytes, orbit ids and ranks of codes 1..2^(pqr)-1 (one byte
/// each), then 13-byte records (index u16, canonical u32, size u32, rank u8,
/// large index u16) up to end of file.
void save_cache(const CensusTables& tables, const std::filesystem::path& path);

/// Throws std::runtime_error on a malformed or truncated file.
CensusTables load_cache(const std::filesystem::path& path);

/// Reads only the header; returns false if the file is not a cache.
bool read_cache_dims(const std::filesystem::path& path, Dims& dims);

/// Exclusive advisory lock on "<path>.lock", held for the object's lifetime.
class CacheLock {
public:
    explicit CacheLock(const std::filesystem::path& cache);
    ~CacheLock();
    CacheLock(const CacheLock&) = delete;
    CacheLock& operator=(const CacheLock&) = delete;

private:
    int fd_ = -1;
};

enum class TableFormat { tsv, dots };

/// One line per large orbit (index, rank, size, dot pattern) followed by the
/// per-rank summary block.
void emit_table(const CensusTables& tables, std::ostream& sink, TableFormat format);

/// The row for one large orbit, without a trailing newline.
std::string table_row(const LargeOrbit& big, Dims d, TableFormat format);

} // namespace tensorlab
