#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "lucky/interval.hpp"
#include "lucky/lucky_table.hpp"

namespace lucky {

// Certified quantities derived from a lucky table: the density products
// rho_m, the normalised error sums tau_{m,n}, varrho_n, xi_{x,y} and the
// counting functions L_i(x).
//
// The context keeps a reference to the table, which must outlive it.
// Products and harmonic sums are cached at checkpoints every 1024
// indices; the cache is built on first use under a lock, after which
// every member is safe to call concurrently.
class StatsContext {
public:
    static constexpr std::uint64_t checkpoint_stride = 1024;

    explicit StatsContext(const LuckyTable& table, mpfr_prec_t prec = 0);

    const LuckyTable& table() const noexcept { return *table_; }
    mpfr_prec_t precision() const noexcept { return prec_; }

    // rho_m = prod_{i<m} 1/(1 - 1/l_i), 2 <= m <= table size.
    Interval rho(std::uint64_t m) const;
    // varrho_n = rho_n - 1 - H_{n-1}, 2 <= n <= table size.
    Interval varrho(std::uint64_t n) const;
    // H_{n-1} = 1 + 1/2 + ... + 1/(n-1).
    Interval harmonic_before(std::uint64_t n) const;

    // varrho_n and rho_n recomputed as sums over k < n of terms built from
    // l_k and the directly evaluated tau_k. Meant for cross-checks on
    // small n.
    Interval varrho_via_tau(std::uint64_t n) const;
    Interval rho_via_tau(std::uint64_t n) const;

    // L_i(x), the number of elements of L_i in [1, x], by replaying the
    // first i - 1 sieve rounds over [1, floor(x)] with the table's moduli.
    std::uint64_t count_L(std::uint64_t i, double x) const;
    std::uint64_t count_L(std::uint64_t i, std::uint64_t x) const;
    // L_1(x), ..., L_m(x) from one replay; element i - 1 holds L_i(x).
    std::vector<std::uint64_t> counts_all(std::uint64_t m, std::uint64_t x) const;

    // l_{m,n}, the n-th element of L_m.
    std::uint64_t ell_mn(std::uint64_t m, std::uint64_t n) const;

    // tau_{m,n} from its definition, with exact fractional parts.
    Interval tau(std::uint64_t m, std::uint64_t n) const;
    // tau_n = 1 - l_n / (n rho_n), which the fundamental identity yields
    // for m = n. Cheap; used by the verifier.
    Interval tau_identity(std::uint64_t n) const;

    // xi_{x,y}: sum of 1/l_i over integers x < i < y. Needs y <= size + 1.
    Interval xi(double x, double y) const;

private:
    friend class RhoStream;

    void require_index(std::uint64_t n, const char* what) const;
    void warm() const;

    const LuckyTable* table_;
    mpfr_prec_t prec_;
    mutable std::once_flag warmed_;
    // Entry j holds rho_m and H_{m-1} for m = 2 + j * checkpoint_stride.
    mutable std::vector<Interval> rho_checkpoints_;
    mutable std::vector<Interval> harmonic_checkpoints_;
};

// Walks rho_n and H_{n-1} forward one index at a time, starting from any
// n in [2, table size].
class RhoStream {
public:
    RhoStream(const StatsContext& ctx, std::uint64_t start);

    std::uint64_t index() const noexcept { return n_; }
    Interval rho() const;
    Interval harmonic_before() const;
    Interval varrho() const;
    // Moves to n + 1; requires n + 1 <= table size.
    void advance();

private:
    const StatsContext* ctx_;
    std::uint64_t n_;
    detail::Float rho_lo_, rho_hi_, h_lo_, h_hi_;
};

}  // namespace lucky
