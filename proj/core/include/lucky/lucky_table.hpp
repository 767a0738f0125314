#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lucky {

// Which integer starts the sequence. The table always stores 2; the
// classical presentation (OEIS A000959) starts with 1.
enum class FirstTerm { Two, One };

// The lucky numbers l_1 < l_2 < ... < l_N with the convention l_1 = 2.
//
// A table produced by generate() or naive_generate() satisfies the
// structural invariants (strictly increasing, starts 2, 3, 7, odd after the
// first entry). Tables read from disk are taken as recorded; call
// first_invariant_violation() when provenance is unknown.
class LuckyTable {
public:
    static constexpr FirstTerm convention = FirstTerm::Two;

    LuckyTable() = default;
    explicit LuckyTable(std::vector<std::uint64_t> values) : values_(std::move(values)) {}

    std::uint64_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    // l_n, 1-based. Throws RangeError when n is 0 or beyond the table.
    std::uint64_t ell(std::uint64_t n) const;
    // Unchecked 1-based access.
    std::uint64_t operator[](std::uint64_t n) const noexcept { return values_[n - 1]; }

    std::span<const std::uint64_t> values() const noexcept { return values_; }

    // The prefix rendered with the requested first term.
    std::vector<std::uint64_t> display(FirstTerm first, std::uint64_t count) const;

    // Smallest 1-based index that breaks an invariant, if any.
    std::optional<std::uint64_t> first_invariant_violation(std::uint64_t from = 1,
                                                           std::uint64_t to = 0) const;

    bool operator==(const LuckyTable&) const = default;

private:
    std::vector<std::uint64_t> values_;
};

// Binary table format, little-endian throughout:
//   "LUKT" | u32 version (=1) | u64 count | count x u64 values | u64 checksum
// where checksum is the sum of all values modulo 2^64.
inline constexpr char table_magic[4] = {'L', 'U', 'K', 'T'};
inline constexpr std::uint32_t table_format_version = 1;

void save_table(const LuckyTable& table, std::ostream& out);
LuckyTable load_table(std::istream& in);

void save_table(const LuckyTable& table, const std::string& path);
LuckyTable load_table(const std::string& path);

std::uint64_t table_checksum(std::span<const std::uint64_t> values) noexcept;

}  // namespace lucky
