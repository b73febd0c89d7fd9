#include "tensorlab/census_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fmt/format.h>

#include "tensorlab/text_io.hpp"

namespace tensorlab {

namespace {

constexpr char magic[8] = {'F', '2', 'C', 'E', 'N', 'S', 'U', 'S'};
constexpr std::size_t header_bytes = sizeof(magic) + 2 + 3;
constexpr std::size_t record_bytes = 13;

template <class T>
void put_le(std::string& buf, T value) {
    for (std::size_t n = 0; n < sizeof(T); ++n) buf.push_back(static_cast<char>((value >> (8 * n)) & 0xffu));
}

template <class T>
T get_le(const unsigned char* p) {
    T value = 0;
    for (std::size_t n = 0; n < sizeof(T); ++n) value |= static_cast<T>(T{p[n]} << (8 * n));
    return value;
}

Dims parse_dims(const unsigned char* p) {
    const Dims d{p[0], p[1], p[2]};
    if (!d.valid()) throw std::runtime_error("cache dimensions outside 1..3");
    return d;
}

} // namespace

void save_cache(const CensusTables& tables, const std::filesystem::path& path) {
    const F2Code limit = tables.code_count();
    if (tables.orbit_id.size() != std::size_t{limit} + 1 || tables.rank.size() != std::size_t{limit} + 1) {
        throw std::invalid_argument("census tables incomplete");
    }
    std::string head(magic, sizeof(magic));
    put_le<std::uint16_t>(head, cache_version);
    head.push_back(static_cast<char>(tables.dims.p));
    head.push_back(static_cast<char>(tables.dims.q));
    head.push_back(static_cast<char>(tables.dims.r));
    std::string tail;
    for (const OrbitRecord& rec : tables.orbits) {
        put_le<std::uint16_t>(tail, rec.index);
        put_le<std::uint32_t>(tail, rec.canonical);
        put_le<std::uint32_t>(tail, rec.size);
        put_le<std::uint8_t>(tail, rec.rank);
        put_le<std::uint16_t>(tail, rec.large_index);
    }

    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        out.write(head.data(), static_cast<std::streamsize>(head.size()));
        out.write(reinterpret_cast<const char*>(tables.orbit_id.data() + 1), limit);
        out.write(reinterpret_cast<const char*>(tables.rank.data() + 1), limit);
        out.write(tail.data(), static_cast<std::streamsize>(tail.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error(fmt::format("write to {} failed", tmp.string()));
        }
    }
    std::filesystem::rename(tmp, path);
}

bool read_cache_dims(const std::filesystem::path& path, Dims& dims) {
    std::ifstream in(path, std::ios::binary);
    std::array<unsigned char, header_bytes> head{};
    if (!in.read(reinterpret_cast<char*>(head.data()), head.size())) return false;
    if (std::memcmp(head.data(), magic, sizeof(magic)) != 0) return false;
    if (get_le<std::uint16_t>(head.data() + 8) != cache_version) return false;
    const Dims d{head[10], head[11], head[12]};
    if (!d.valid()) return false;
    dims = d;
    return true;
}

CensusTables load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error(fmt::format("cannot open cache {}", path.string()));
    const auto total = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    std::array<unsigned char, header_bytes> head{};
    if (!in.read(reinterpret_cast<char*>(head.data()), head.size()) ||
        std::memcmp(head.data(), magic, sizeof(magic)) != 0) {
        throw std::runtime_error(fmt::format("{} is not a census cache", path.string()));
    }
    const auto version = get_le<std::uint16_t>(head.data() + 8);
    if (version != cache_version) throw std::runtime_error(fmt::format("unsupported cache version {}", version));

    CensusTables tables;
    tables.dims = parse_dims(head.data() + 10);
    const F2Code limit = tables.code_count();
    const std::uint64_t arrays = 2 * std::uint64_t{limit};
    if (total < header_bytes + arrays || (total - header_bytes - arrays) % record_bytes != 0) {
        throw std::runtime_error(fmt::format("cache {} is truncated or malformed", path.string()));
    }
    tables.orbit_id.assign(std::size_t{limit} + 1, 0);
    tables.rank.assign(std::size_t{limit} + 1, 0);
    in.read(reinterpret_cast<char*>(tables.orbit_id.data() + 1), limit);
    in.read(reinterpret_cast<char*>(tables.rank.data() + 1), limit);
    const std::size_t count = (total - header_bytes - arrays) / record_bytes;
    std::vector<unsigned char> raw(count * record_bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw std::runtime_error(fmt::format("short read from {}", path.string()));
    for (std::size_t n = 0; n < count; ++n) {
        const unsigned char* p = raw.data() + n * record_bytes;
        OrbitRecord rec;
        rec.index = get_le<std::uint16_t>(p);
        rec.canonical = get_le<std::uint32_t>(p + 2);
        rec.size = get_le<std::uint32_t>(p + 6);
        rec.rank = p[10];
        rec.large_index = get_le<std::uint16_t>(p + 11);
        if (rec.index != n + 1 || rec.canonical == 0 || rec.canonical > limit) {
            throw std::runtime_error(fmt::format("cache record {} is inconsistent", n + 1));
        }
        tables.orbits.push_back(rec);
    }
    return tables;
}

CacheLock::CacheLock(const std::filesystem::path& cache) {
    std::filesystem::path lock = cache;
    lock += ".lock";
    fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "open " + lock.string());
    if (::flock(fd_, LOCK_EX) != 0) {
        const int err = errno;
        ::close(fd_);
        throw std::system_error(err, std::generic_category(), "lock " + lock.string());
    }
}

CacheLock::~CacheLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

std::string table_row(const LargeOrbit& big, Dims d, TableFormat format) {
    const std::string pattern = dots_pattern(big.canonical, d);
    if (format == TableFormat::tsv) return fmt::format("{}\t{}\t{}\t{}", big.index, big.rank, big.size, pattern);
    return fmt::format("{:>4} {} {:>8} {}", big.index, big.rank, big.size, pattern);
}

void emit_table(const CensusTables& tables, std::ostream& sink, TableFormat format) {
    const Dims d = tables.dims;
    if (format == TableFormat::tsv) {
        sink << "index\trank\tsize\tcanonical\n";
    } else {
        sink << fmt::format("{:>4} {} {:>8} {}\n", "#", "r", "size", "canonical form");
    }
    for (const LargeOrbit& big : large_orbits(tables)) sink << table_row(big, d, format) << '\n';

    const RankSummary s = summarize(tables);
    const double total = static_cast<double>(std::uint64_t{1} << d.size());
    const auto line = [&](const std::string& label, auto cell) {
        std::string out = format == TableFormat::tsv ? label : fmt::format("{:<10}", label);
        for (std::size_t r = 0; r < s.tensors.size(); ++r) {
            out += format == TableFormat::tsv ? fmt::format("\t{}", cell(r)) : fmt::format("{:>10}", cell(r));
        }
        sink << out << '\n';
    };
    sink << '\n';
    line("rank", [](std::size_t r) { return fmt::format("{}", r); });
    line("# small", [&](std::size_t r) { return fmt::format("{}", s.small[r]); });
    line("# large", [&](std::size_t r) { return fmt::format("{}", s.large[r]); });
    line("# tensors", [&](std::size_t r) { return fmt::format("{}", s.tensors[r]); });
    line("percent", [&](std::size_t r) { return fmt::format("{:.4f}", 100.0 * s.tensors[r] / total); });
}

} // namespace tensorlab
