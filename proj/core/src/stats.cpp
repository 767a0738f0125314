#include "lucky/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lucky/error.hpp"
#include "lucky/sieve.hpp"

namespace lucky {

namespace {

using detail::Float;

// x <- x * l / (l - 1), x > 0, rounded in direction rnd.
void mul_density(mpfr_ptr x, std::uint64_t l, mpfr_rnd_t rnd) {
    mpfr_mul_ui(x, x, static_cast<unsigned long>(l), rnd);
    mpfr_div_ui(x, x, static_cast<unsigned long>(l - 1), rnd);
}

void add_reciprocal(mpfr_ptr x, mpfr_ptr scratch, std::uint64_t k, mpfr_rnd_t rnd) {
    mpfr_set_ui(scratch, 1, MPFR_RNDN);
    mpfr_div_ui(scratch, scratch, static_cast<unsigned long>(k), rnd);
    mpfr_add(x, x, scratch, rnd);
}

}  // namespace

StatsContext::StatsContext(const LuckyTable& table, mpfr_prec_t prec)
    : table_(&table), prec_(prec > 0 ? prec : working_precision()) {}

void StatsContext::require_index(std::uint64_t n, const char* what) const {
    if (n > table_->size()) {
        throw RangeError(std::string(what) + ": index " + std::to_string(n) + " outside table of size " +
                         std::to_string(table_->size()));
    }
}

void StatsContext::warm() const {
    std::call_once(warmed_, [this] {
        const std::uint64_t size = table_->size();
        Float rho_lo(prec_), rho_hi(prec_), h_lo(prec_), h_hi(prec_), t(prec_);
        mpfr_set_ui(rho_lo.get(), 2, MPFR_RNDD);
        mpfr_set_ui(rho_hi.get(), 2, MPFR_RNDU);
        mpfr_set_ui(h_lo.get(), 1, MPFR_RNDD);
        mpfr_set_ui(h_hi.get(), 1, MPFR_RNDU);
        std::vector<Interval> rhos, harmonics;
        rhos.reserve(size / checkpoint_stride + 1);
        harmonics.reserve(size / checkpoint_stride + 1);
        for (std::uint64_t m = 2; m <= size; ++m) {
            if ((m - 2) % checkpoint_stride == 0) {
                rhos.push_back(Interval::bounds(rho_lo.get(), rho_hi.get()));
                harmonics.push_back(Interval::bounds(h_lo.get(), h_hi.get()));
            }
            const std::uint64_t l = (*table_)[m];
            mul_density(rho_lo.get(), l, MPFR_RNDD);
            mul_density(rho_hi.get(), l, MPFR_RNDU);
            add_reciprocal(h_lo.get(), t.get(), m, MPFR_RNDD);
            add_reciprocal(h_hi.get(), t.get(), m, MPFR_RNDU);
        }
        rho_checkpoints_ = std::move(rhos);
        harmonic_checkpoints_ = std::move(harmonics);
    });
}

Interval StatsContext::rho(std::uint64_t m) const {
    if (m < 2) throw DomainError("rho: index must be >= 2");
    require_index(m, "rho");
    return RhoStream(*this, m).rho();
}

Interval StatsContext::harmonic_before(std::uint64_t n) const {
    if (n < 2) throw DomainError("harmonic_before: index must be >= 2");
    require_index(n, "harmonic_before");
    return RhoStream(*this, n).harmonic_before();
}

Interval StatsContext::varrho(std::uint64_t n) const {
    if (n < 2) throw DomainError("varrho: index must be >= 2");
    require_index(n, "varrho");
    return RhoStream(*this, n).varrho();
}

Interval StatsContext::rho_via_tau(std::uint64_t n) const {
    if (n < 2) throw DomainError("rho_via_tau: index must be >= 2");
    require_index(n, "rho_via_tau");
    const PrecisionScope scope(prec_);
    Interval sum(2);
    for (std::uint64_t k = 2; k < n; ++k) {
        const Interval l((*table_)[k]);
        const Interval term = Interval(1) / (Interval(k) * (Interval(1) - Interval(1) / l) * (Interval(1) - tau(k, k)));
        sum += term;
    }
    return sum;
}

Interval StatsContext::varrho_via_tau(std::uint64_t n) const {
    if (n < 2) throw DomainError("varrho_via_tau: index must be >= 2");
    require_index(n, "varrho_via_tau");
    const PrecisionScope scope(prec_);
    Interval sum(0);
    for (std::uint64_t k = 2; k < n; ++k) {
        const Interval l((*table_)[k]);
        const Interval inner = Interval(1) / ((Interval(1) - Interval(1) / l) * (Interval(1) - tau(k, k)));
        sum += (inner - Interval(1)) / Interval(k);
    }
    return sum;
}

std::vector<std::uint64_t> StatsContext::counts_all(std::uint64_t m, std::uint64_t x) const {
    if (m < 1) throw DomainError("counts_all: round index must be >= 1");
    // L_m needs the moduli l_2 .. l_{m-1}.
    if (m >= 2) require_index(m - 1, "counts_all");
    std::vector<std::uint64_t> counts;
    counts.reserve(m);
    counts.push_back(x);
    if (m == 1) return counts;
    SieveState state(x);
    counts.push_back(state.survivors());
    for (std::uint64_t k = 2; k < m; ++k) {
        state.delete_every((*table_)[k]);
        counts.push_back(state.survivors());
    }
    return counts;
}

std::uint64_t StatsContext::count_L(std::uint64_t i, std::uint64_t x) const {
    if (i < 1) throw DomainError("count_L: index must be >= 1");
    return counts_all(i, x).back();
}

std::uint64_t StatsContext::count_L(std::uint64_t i, double x) const {
    if (!(x >= 0)) throw DomainError("count_L: x must be nonnegative");
    return count_L(i, static_cast<std::uint64_t>(std::floor(x)));
}

std::uint64_t StatsContext::ell_mn(std::uint64_t m, std::uint64_t n) const {
    if (m < 2) throw DomainError("ell_mn: round index must be >= 2");
    if (n < 1) throw DomainError("ell_mn: position must be >= 1");
    require_index(m - 1, "ell_mn");
    const double scale = static_cast<double>(n + m);
    auto window = static_cast<std::uint64_t>(2.0 * scale * (std::log(scale) + 2.0)) + 64;
    for (;;) {
        SieveState state(window);
        for (std::uint64_t k = 2; k < m && k <= state.survivors(); ++k) state.delete_every((*table_)[k]);
        if (state.survivors() >= n) return state.select(n);
        window *= 2;
    }
}

Interval StatsContext::tau(std::uint64_t m, std::uint64_t n) const {
    if (m < 2) throw DomainError("tau: round index must be >= 2");
    if (n < 1) throw DomainError("tau: position must be >= 1");
    const std::uint64_t x = ell_mn(m, n);
    const std::vector<std::uint64_t> counts = counts_all(m - 1, x);
    const PrecisionScope scope(prec_);
    // Walk i downwards so that ratio = rho_{i+1}/rho_m = prod_{j=i+1}^{m-1} (1 - 1/l_j).
    Interval sum(0);
    Interval ratio(1);
    for (std::uint64_t i = m - 1; i >= 1; --i) {
        const std::uint64_t l = (*table_)[i];
        const std::uint64_t rem = counts[i - 1] % l;
        if (rem != 0) sum += ratio * Interval::rational(static_cast<long long>(rem), l);
        ratio *= Interval::rational(static_cast<long long>(l - 1), l);
    }
    return sum / Interval(n);
}

Interval StatsContext::tau_identity(std::uint64_t n) const {
    if (n < 2) throw DomainError("tau_identity: index must be >= 2");
    require_index(n, "tau_identity");
    const PrecisionScope scope(prec_);
    return Interval(1) - Interval((*table_)[n]) / (Interval(n) * rho(n));
}

Interval StatsContext::xi(double x, double y) const {
    if (!(x >= 1) || !(y >= 1)) throw DomainError("xi: arguments must be >= 1");
    const auto first = static_cast<std::uint64_t>(std::floor(x)) + 1;
    const auto ceil_y = static_cast<std::uint64_t>(std::ceil(y));
    Float lo(prec_), hi(prec_), t(prec_);
    if (ceil_y >= 1 && ceil_y - 1 >= first) {
        require_index(ceil_y - 1, "xi");
        for (std::uint64_t i = ceil_y - 1; i >= first; --i) {
            add_reciprocal(lo.get(), t.get(), (*table_)[i], MPFR_RNDD);
            add_reciprocal(hi.get(), t.get(), (*table_)[i], MPFR_RNDU);
        }
    }
    return Interval::bounds(lo.get(), hi.get());
}

RhoStream::RhoStream(const StatsContext& ctx, std::uint64_t start)
    : ctx_(&ctx), n_(start), rho_lo_(ctx.prec_), rho_hi_(ctx.prec_), h_lo_(ctx.prec_), h_hi_(ctx.prec_) {
    if (start < 2) throw DomainError("RhoStream: start must be >= 2");
    ctx.require_index(start, "RhoStream");
    ctx.warm();
    const std::uint64_t j = (start - 2) / StatsContext::checkpoint_stride;
    const Interval& r = ctx.rho_checkpoints_[j];
    const Interval& h = ctx.harmonic_checkpoints_[j];
    mpfr_set(rho_lo_.get(), r.lo(), MPFR_RNDD);
    mpfr_set(rho_hi_.get(), r.hi(), MPFR_RNDU);
    mpfr_set(h_lo_.get(), h.lo(), MPFR_RNDD);
    mpfr_set(h_hi_.get(), h.hi(), MPFR_RNDU);
    n_ = 2 + j * StatsContext::checkpoint_stride;
    while (n_ < start) advance();
}

void RhoStream::advance() {
    const LuckyTable& table = *ctx_->table_;
    if (n_ + 1 > table.size()) throw RangeError("RhoStream: advanced past the end of the table");
    const std::uint64_t l = table[n_];
    mul_density(rho_lo_.get(), l, MPFR_RNDD);
    mul_density(rho_hi_.get(), l, MPFR_RNDU);
    Float t(ctx_->prec_);
    add_reciprocal(h_lo_.get(), t.get(), n_, MPFR_RNDD);
    add_reciprocal(h_hi_.get(), t.get(), n_, MPFR_RNDU);
    ++n_;
}

Interval RhoStream::rho() const { return Interval::bounds(rho_lo_.get(), rho_hi_.get()); }

Interval RhoStream::harmonic_before() const { return Interval::bounds(h_lo_.get(), h_hi_.get()); }

Interval RhoStream::varrho() const {
    const PrecisionScope scope(ctx_->prec_);
    return rho() - Interval(1) - harmonic_before();
}

}  // namespace lucky
