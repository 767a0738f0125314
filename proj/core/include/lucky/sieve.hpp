#pragma once

#include <cstdint>
#include <vector>

#include "lucky/lucky_table.hpp"

namespace lucky {

// Survivors of the deletion sieve over the window [1, value_limit].
//
// Candidates are stored one bit each: bit 0 stands for the value 2 and bit
// i >= 1 for the odd value 2i + 1, so a fresh state is exactly L_2, i.e. 2
// followed by the odd integers >= 3. A Fenwick tree over per-word
// population counts answers rank and select in O(log words).
//
// Deleting every k-th survivor only depends on ranks, so the state for a
// window is always the exact prefix of the unbounded sequence L_m.
class SieveState {
public:
    explicit SieveState(std::uint64_t value_limit);

    std::uint64_t value_limit() const noexcept { return value_limit_; }
    // The state holds L_m; a fresh state is round 2.
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t survivors() const noexcept { return survivors_; }

    // Number of survivors <= value, i.e. L_m(value) when value is inside
    // the window.
    std::uint64_t rank(std::uint64_t value) const;
    // Value of the k-th survivor (1-based). Requires 1 <= k <= survivors().
    std::uint64_t select(std::uint64_t k) const;
    bool contains(std::uint64_t value) const;

    // Deletes the survivors whose 1-based rank is divisible by modulus and
    // advances the round. Returns the number of deletions.
    std::uint64_t delete_every(std::uint64_t modulus);

    std::vector<std::uint64_t> prefix(std::uint64_t count) const;

private:
    static std::uint64_t value_of(std::uint64_t pos) noexcept { return pos == 0 ? 2 : 2 * pos + 1; }

    std::uint64_t select_pos(std::uint64_t k) const;
    void erase_pos(std::uint64_t pos);
    std::uint64_t sweep_delete(std::uint64_t modulus);
    std::uint64_t select_delete(std::uint64_t modulus);
    void rebuild_index();

    std::uint64_t value_limit_;
    std::uint64_t bit_count_;
    std::uint64_t survivors_ = 0;
    std::uint64_t round_ = 2;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint32_t> tree_;  // Fenwick over words_, 1-based
    std::uint64_t top_step_ = 0;       // highest power of two <= words
};

// Value window used for a first attempt at generating `count` lucky numbers.
std::uint64_t initial_window(std::uint64_t count);

// l_1..l_count using the rank/select sieve. Grows the window by 25% and
// resieves when it turns out too small.
LuckyTable generate(std::uint64_t count);

// Same contract as generate(), by repeated deletion from a plain list.
// Quadratic-ish; meant as an oracle for count <= ~10^6.
LuckyTable naive_generate(std::uint64_t count);

// An intermediate sieve sequence: the first entries of (l_{m,n})_n.
struct IntermediateSequence {
    std::uint64_t m;
    std::vector<std::uint64_t> values_prefix;
};

// The first prefix_len entries of L_m, m >= 2. The deletion moduli l_2 ..
// l_{m-1} are read off the sieve itself.
IntermediateSequence intermediate(std::uint64_t m, std::uint64_t prefix_len);

}  // namespace lucky
