#include "lucky/sieve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <new>

#include "lucky/error.hpp"

namespace lucky {

namespace {

// Largest window (in values) we are willing to allocate.
constexpr std::uint64_t max_window = std::uint64_t{1} << 40;

// Position of the r-th set bit (1-based) of w; requires r <= popcount(w).
unsigned select_in_word(std::uint64_t w, unsigned r) {
    unsigned base = 0;
    for (;;) {
        const unsigned c = static_cast<unsigned>(std::popcount(w & 0xFFu));
        if (r <= c) break;
        r -= c;
        w >>= 8;
        base += 8;
    }
    while (--r) w &= w - 1;
    return base + static_cast<unsigned>(std::countr_zero(w));
}

}  // namespace

SieveState::SieveState(std::uint64_t value_limit)
    : value_limit_(value_limit),
      bit_count_(value_limit >= 2 ? (value_limit - 1) / 2 + 1 : 0) {
    if (value_limit > max_window) {
        throw ResourceError("sieve window of " + std::to_string(value_limit) + " values is too large");
    }
    try {
        const std::uint64_t nwords = (bit_count_ + 63) / 64;
        words_.assign(nwords, ~std::uint64_t{0});
        if (bit_count_ % 64 != 0) words_.back() = (std::uint64_t{1} << (bit_count_ % 64)) - 1;
        tree_.assign(nwords + 1, 0);
    } catch (const std::bad_alloc&) {
        throw ResourceError("cannot allocate sieve window of " + std::to_string(value_limit) + " values");
    }
    top_step_ = words_.empty() ? 0 : std::bit_floor(words_.size());
    rebuild_index();
}

void SieveState::rebuild_index() {
    const std::size_t n = words_.size();
    survivors_ = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const auto c = static_cast<std::uint32_t>(std::popcount(words_[i - 1]));
        survivors_ += c;
        tree_[i] = c;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t j = i + (i & (~i + 1));
        if (j <= n) tree_[j] += tree_[i];
    }
}

std::uint64_t SieveState::rank(std::uint64_t value) const {
    if (value < 2 || bit_count_ == 0) return 0;
    const std::uint64_t last = std::min((value - 1) / 2, bit_count_ - 1);
    const std::uint64_t full = (last + 1) / 64;
    std::uint64_t count = 0;
    for (std::uint64_t i = full; i > 0; i &= i - 1) count += tree_[i];
    const unsigned partial = static_cast<unsigned>((last + 1) % 64);
    if (partial != 0) count += static_cast<std::uint64_t>(std::popcount(words_[full] & ((std::uint64_t{1} << partial) - 1)));
    return count;
}

std::uint64_t SieveState::select_pos(std::uint64_t k) const {
    std::uint64_t idx = 0;
    std::uint64_t rem = k;
    const std::uint64_t n = words_.size();
    for (std::uint64_t step = top_step_; step != 0; step >>= 1) {
        if (idx + step <= n && tree_[idx + step] < rem) {
            idx += step;
            rem -= tree_[idx];
        }
    }
    return idx * 64 + select_in_word(words_[idx], static_cast<unsigned>(rem));
}

std::uint64_t SieveState::select(std::uint64_t k) const {
    if (k == 0 || k > survivors_) {
        throw RangeError("select(" + std::to_string(k) + ") with " + std::to_string(survivors_) + " survivors");
    }
    return value_of(select_pos(k));
}

bool SieveState::contains(std::uint64_t value) const {
    if (value < 2 || value > value_limit_) return false;
    if (value != 2 && value % 2 == 0) return false;
    const std::uint64_t pos = value == 2 ? 0 : (value - 1) / 2;
    return (words_[pos / 64] >> (pos % 64)) & 1;
}

void SieveState::erase_pos(std::uint64_t pos) {
    words_[pos / 64] &= ~(std::uint64_t{1} << (pos % 64));
    for (std::uint64_t i = pos / 64 + 1; i < tree_.size(); i += i & (~i + 1)) --tree_[i];
    --survivors_;
}

std::uint64_t SieveState::select_delete(std::uint64_t modulus) {
    // Top-down so that lower ranks are unaffected by earlier erasures.
    std::uint64_t deleted = 0;
    for (std::uint64_t k = survivors_ / modulus; k >= 1; --k) {
        erase_pos(select_pos(k * modulus));
        ++deleted;
    }
    return deleted;
}

std::uint64_t SieveState::sweep_delete(std::uint64_t modulus) {
    // seen = survivors passed so far, modulo modulus.
    std::uint64_t seen = 0;
    std::uint64_t deleted = 0;
    for (auto& word : words_) {
        const auto pc = static_cast<std::uint64_t>(std::popcount(word));
        if (seen + pc < modulus) {
            seen += pc;
            continue;
        }
        const std::uint64_t original = word;
        std::uint64_t r = modulus - seen;
        for (; r <= pc; r += modulus) {
            word &= ~(std::uint64_t{1} << select_in_word(original, static_cast<unsigned>(r)));
            ++deleted;
        }
        seen = pc - (r - modulus);
    }
    rebuild_index();
    return deleted;
}

std::uint64_t SieveState::delete_every(std::uint64_t modulus) {
    if (modulus < 2) throw DomainError("delete_every: modulus must be >= 2");
    ++round_;
    const std::uint64_t expected = survivors_ / modulus;
    if (expected == 0) return 0;
    // A sweep touches every word once; select-based deletion pays about
    // three tree walks per deletion.
    const auto depth = static_cast<std::uint64_t>(std::bit_width(words_.size()));
    if (words_.size() < expected * 3 * depth) return sweep_delete(modulus);
    return select_delete(modulus);
}

std::vector<std::uint64_t> SieveState::prefix(std::uint64_t count) const {
    count = std::min(count, survivors_);
    std::vector<std::uint64_t> out;
    out.reserve(count);
    for (std::uint64_t w = 0; w < words_.size() && out.size() < count; ++w) {
        for (std::uint64_t bits = words_[w]; bits != 0 && out.size() < count; bits &= bits - 1) {
            out.push_back(value_of(w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits))));
        }
    }
    return out;
}

std::uint64_t initial_window(std::uint64_t count) {
    if (count < 16) return 64;
    const double n = static_cast<double>(count);
    const double llog = std::log(std::log(n));
    return static_cast<std::uint64_t>(std::ceil(n * (std::log(n) + llog * llog + 3.0)));
}

LuckyTable generate(std::uint64_t count) {
    if (count == 0) throw DomainError("generate: count must be >= 1");
    std::uint64_t window = initial_window(count);
    for (;;) {
        SieveState state(window);
        bool enough = true;
        for (std::uint64_t m = 2;; ++m) {
            // Survivor counts only shrink, so a shortfall is final.
            if (state.survivors() < count || m > state.survivors()) {
                enough = false;
                break;
            }
            const std::uint64_t ell_m = state.select(m);
            // Once l_m > count the first count survivors are final.
            if (ell_m > count) break;
            state.delete_every(ell_m);
        }
        if (enough) return LuckyTable(state.prefix(count));
        window += window / 4 + 1;
    }
}

LuckyTable naive_generate(std::uint64_t count) {
    if (count == 0) throw DomainError("naive_generate: count must be >= 1");
    std::uint64_t window = 4 * count + 16;
    for (;;) {
        if (window > max_window) throw ResourceError("naive_generate: window too large");
        std::vector<std::uint64_t> list;
        try {
            list.reserve(window / 2 + 1);
        } catch (const std::bad_alloc&) {
            throw ResourceError("naive_generate: cannot allocate list");
        }
        list.push_back(2);
        for (std::uint64_t v = 3; v <= window; v += 2) list.push_back(v);

        bool enough = true;
        for (std::uint64_t m = 2;; ++m) {
            if (list.size() < count || m > list.size()) {
                enough = false;
                break;
            }
            const std::uint64_t step = list[m - 1];
            if (step > count) break;
            // Drop list positions (1-based) divisible by step.
            std::size_t write = step - 1;
            for (std::size_t read = step; read < list.size(); read += step) {
                const std::size_t run = std::min<std::size_t>(step - 1, list.size() - read);
                std::copy(list.begin() + static_cast<std::ptrdiff_t>(read),
                          list.begin() + static_cast<std::ptrdiff_t>(read + run),
                          list.begin() + static_cast<std::ptrdiff_t>(write));
                write += run;
            }
            list.resize(std::min(write, list.size()));
        }
        if (enough) {
            list.resize(count);
            return LuckyTable(std::move(list));
        }
        window *= 2;
    }
}

IntermediateSequence intermediate(std::uint64_t m, std::uint64_t prefix_len) {
    if (m < 2) throw DomainError("intermediate: round index must be >= 2");
    const double scale = static_cast<double>(prefix_len + m);
    auto window = static_cast<std::uint64_t>(4.0 * scale * (std::log(scale) + 2.0)) + 64;
    for (;;) {
        SieveState state(window);
        for (std::uint64_t k = 2; k < m; ++k) {
            // l_k lies beyond the window: no later round touches it.
            if (k > state.survivors()) break;
            state.delete_every(state.select(k));
        }
        if (state.survivors() >= prefix_len) return {m, state.prefix(prefix_len)};
        window *= 2;
    }
}

}  // namespace lucky
