#include "lucky/lucky_table.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lucky/error.hpp"

namespace lucky {

std::uint64_t LuckyTable::ell(std::uint64_t n) const {
    if (n == 0 || n > values_.size()) {
        throw RangeError("lucky index " + std::to_string(n) + " outside table of size " +
                         std::to_string(values_.size()));
    }
    return values_[n - 1];
}

std::vector<std::uint64_t> LuckyTable::display(FirstTerm first, std::uint64_t count) const {
    count = std::min<std::uint64_t>(count, values_.size());
    std::vector<std::uint64_t> out(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count));
    if (first == FirstTerm::One && !out.empty()) out.front() = 1;
    return out;
}

std::optional<std::uint64_t> LuckyTable::first_invariant_violation(std::uint64_t from,
                                                                   std::uint64_t to) const {
    const std::uint64_t n = values_.size();
    if (to == 0 || to > n) to = n;
    from = std::max<std::uint64_t>(from, 1);
    static constexpr std::array<std::uint64_t, 3> head = {2, 3, 7};
    for (std::uint64_t i = from; i <= to; ++i) {
        const std::uint64_t v = values_[i - 1];
        if (i <= head.size() && v != head[i - 1]) return i;
        if (i > 1 && (v % 2 == 0 || v <= values_[i - 2])) return i;
    }
    return std::nullopt;
}

std::uint64_t table_checksum(std::span<const std::uint64_t> values) noexcept {
    std::uint64_t sum = 0;
    for (auto v : values) sum += v;  // wraps modulo 2^64
    return sum;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t decode_u64(const unsigned char* b) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

bool read_exact(std::istream& in, unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace

void save_table(const LuckyTable& table, std::ostream& out) {
    out.write(table_magic, 4);
    put_u32(out, table_format_version);
    put_u64(out, table.size());
    for (auto v : table.values()) put_u64(out, v);
    put_u64(out, table_checksum(table.values()));
    if (!out) throw FormatError(FormatError::Kind::Io, "failed writing lucky table");
}

LuckyTable load_table(std::istream& in) {
    unsigned char header[16];
    if (!read_exact(in, header, 4) || std::memcmp(header, table_magic, 4) != 0) {
        throw FormatError(FormatError::Kind::CorruptHeader, "bad magic: not a lucky table");
    }
    if (!read_exact(in, header + 4, 12)) {
        throw FormatError(FormatError::Kind::CorruptHeader, "header shorter than 16 bytes");
    }
    const std::uint32_t version = static_cast<std::uint32_t>(header[4]) |
                                  static_cast<std::uint32_t>(header[5]) << 8 |
                                  static_cast<std::uint32_t>(header[6]) << 16 |
                                  static_cast<std::uint32_t>(header[7]) << 24;
    if (version != table_format_version) {
        throw FormatError(FormatError::Kind::CorruptHeader,
                          "unsupported table version " + std::to_string(version));
    }
    const std::uint64_t count = decode_u64(header + 8);

    std::vector<std::uint64_t> values;
    constexpr std::size_t chunk = 1 << 16;
    std::vector<unsigned char> buf(chunk * 8);
    std::uint64_t remaining = count;
    while (remaining > 0) {
        const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, chunk));
        if (!read_exact(in, buf.data(), take * 8)) {
            throw FormatError(FormatError::Kind::Truncated,
                              "table body truncated: expected " + std::to_string(count) + " values");
        }
        for (std::size_t i = 0; i < take; ++i) values.push_back(decode_u64(buf.data() + 8 * i));
        remaining -= take;
    }
    unsigned char tail[8];
    if (!read_exact(in, tail, 8)) {
        throw FormatError(FormatError::Kind::Truncated, "table checksum missing");
    }
    if (decode_u64(tail) != table_checksum(values)) {
        throw FormatError(FormatError::Kind::ChecksumMismatch, "table checksum mismatch");
    }
    return LuckyTable(std::move(values));
}

void save_table(const LuckyTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::Io, "cannot open " + path + " for writing");
    save_table(table, out);
}

LuckyTable load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::Io, "table not found: " + path);
    return load_table(in);
}

}  // namespace lucky
