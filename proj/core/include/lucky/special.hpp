#pragma once

#include <cstdint>
#include <optional>

#include "lucky/interval.hpp"

namespace lucky {

// Enclosures of the Euler-Mascheroni constant and of e. Up to 280 bits
// they come from stored 90-digit decimal expansions.
Interval euler_gamma(mpfr_prec_t prec = 0);
Interval napier_e(mpfr_prec_t prec = 0);
// -1/e, the left end of the domain of W.
Interval neg_inv_e(mpfr_prec_t prec = 0);

// Principal branch of the Lambert W function, W(x) e^W(x) = x, enclosed
// over the whole input interval. Requires x >= -1/e.
Interval lambert_w(const Interval& x);

// omega(x) = e^W(x) = x / W(x).
Interval omega(const Interval& x);

enum class TailIntegralKind {
    SquaredLogOverSquare,  // (log s)^2 / s^2
    MixedC4Integrand,      // c3 (log s/s)^2 + (r2/c1) ((log s + c2)/s + c3 (log s/s)^2)^2
    CubedLogOverSquare,    // (log s)^3 / s^2
};

struct TailParams {
    std::optional<Interval> c1;
    std::optional<Interval> c2;
    std::optional<Interval> c3;
    std::optional<Interval> r2;
};

// Integral of the kind's integrand over [lower, +inf). Requires lower >= 1;
// throws MissingParameterError when the kind needs a parameter that is
// absent.
Interval tail_integral(TailIntegralKind kind, const Interval& lower, const TailParams& params = {});

// Integral of (log s)^k / s^p over [a, +inf) for p >= 2, a >= 1.
Interval log_power_tail(unsigned k, unsigned p, const Interval& a);

// 1 + 1/2 + ... + 1/n.
Interval harmonic_sum(std::uint64_t n, mpfr_prec_t prec = 0);

}  // namespace lucky
