#include "lucky/special.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <utility>

#include "lucky/error.hpp"

namespace lucky {

namespace {

using detail::Float;

// 90 correct decimals, truncated; the enclosure is [d, d + 10^-90].
constexpr const char* gamma_digits =
    "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063";
constexpr const char* e_digits =
    "2.718281828459045235360287471352662497757247093699959574966967627724076630353547594571382178";
constexpr mpfr_prec_t stored_digits_bits = 280;

mpfr_prec_t resolve(mpfr_prec_t prec) { return prec > 0 ? prec : working_precision(); }

Interval from_digits(const char* digits, mpfr_prec_t prec) {
    const Interval lo = Interval::decimal(digits, prec);
    return Interval::hull(lo, lo + Interval::decimal("1e-90", prec));
}

// Sign of w e^w - x for the point w, if certain.
enum class Sign { Negative, Positive, Unknown };

Sign residual_sign(mpfr_srcptr w, const Interval& x) {
    const Interval wi = Interval::point(w, x.precision());
    const Interval f = wi * exp(wi);
    if (f.certainly_lt(x)) return Sign::Negative;
    if (f.certainly_gt(x)) return Sign::Positive;
    return Sign::Unknown;
}

// Floating-point estimate of W(p) at precision prec (no guarantee).
void w_estimate(mpfr_ptr w, mpfr_srcptr p, mpfr_prec_t prec) {
    Float t(prec), u(prec), ew(prec), f(prec);
    const double pd = mpfr_get_d(p, MPFR_RNDN);
    if (mpfr_zero_p(p)) {
        mpfr_set_zero(w, 1);
        return;
    }
    if (pd < -0.3) {
        // Branch point series: W ~ -1 + sqrt(2(1 + e p)).
        mpfr_set_ui(t.get(), 1, MPFR_RNDN);
        mpfr_exp(t.get(), t.get(), MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), p, MPFR_RNDN);
        mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
        if (mpfr_sgn(t.get()) < 0) mpfr_set_zero(t.get(), 1);
        mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDN);
        mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
        mpfr_sub_ui(w, t.get(), 1, MPFR_RNDN);
    } else if (pd < 3.0) {
        mpfr_log1p(w, p, MPFR_RNDN);
        if (pd > 0) mpfr_mul_d(w, w, 0.8, MPFR_RNDN);
    } else {
        mpfr_log(t.get(), p, MPFR_RNDN);
        mpfr_log(u.get(), t.get(), MPFR_RNDN);
        mpfr_sub(w, t.get(), u.get(), MPFR_RNDN);
    }
    // Halley iterations on f(w) = w e^w - p; stop once the step reaches
    // rounding noise or stops shrinking.
    mpfr_exp_t last_step = MPFR_EMAX_MAX;
    for (int iter = 0; iter < 200; ++iter) {
        mpfr_add_ui(t.get(), w, 1, MPFR_RNDN);
        if (mpfr_cmp_d(t.get(), 1e-30) < 0) break;  // too close to the branch point
        mpfr_exp(ew.get(), w, MPFR_RNDN);
        mpfr_mul(f.get(), w, ew.get(), MPFR_RNDN);
        mpfr_sub(f.get(), f.get(), p, MPFR_RNDN);
        if (mpfr_zero_p(f.get())) break;
        // step = f / (e^w (w + 1) - (w + 2) f / (2w + 2))
        mpfr_mul(u.get(), ew.get(), t.get(), MPFR_RNDN);
        Float v(prec);
        mpfr_add_ui(v.get(), w, 2, MPFR_RNDN);
        mpfr_mul(v.get(), v.get(), f.get(), MPFR_RNDN);
        mpfr_div(v.get(), v.get(), t.get(), MPFR_RNDN);
        mpfr_div_2ui(v.get(), v.get(), 1, MPFR_RNDN);
        mpfr_sub(u.get(), u.get(), v.get(), MPFR_RNDN);
        mpfr_div(f.get(), f.get(), u.get(), MPFR_RNDN);
        mpfr_sub(w, w, f.get(), MPFR_RNDN);
        if (mpfr_zero_p(f.get())) break;
        if (!mpfr_zero_p(w) && mpfr_get_exp(f.get()) < mpfr_get_exp(w) - prec + 16) break;
        if (mpfr_get_exp(f.get()) >= last_step && mpfr_get_exp(f.get()) < mpfr_get_exp(w) - prec / 2) break;
        last_step = mpfr_get_exp(f.get());
    }
    if (mpfr_cmp_si(w, -1) < 0) mpfr_set_si(w, -1, MPFR_RNDN);
}

// Enclosure of W(p) for the single point p >= -1/e. When near_branch is
// set p may coincide with -1/e and the lower end is taken as -1.
Interval w_point(mpfr_srcptr p, mpfr_prec_t prec, bool near_branch) {
    const mpfr_prec_t wp = prec + 24;
    const Interval x = Interval::point(p, wp);
    Float w0(wp);
    if (near_branch) {
        mpfr_set_si(w0.get(), -1, MPFR_RNDN);
    } else {
        w_estimate(w0.get(), p, wp + 32);
    }

    Float delta(wp), lo(wp), hi(wp);
    mpfr_set_ui(delta.get(), 1, MPFR_RNDU);
    mpfr_mul_2si(delta.get(), delta.get(), -(near_branch ? wp / 2 : wp - 12), MPFR_RNDU);
    if (mpfr_cmpabs_ui(w0.get(), 1) > 0) mpfr_mul(delta.get(), delta.get(), w0.get(), MPFR_RNDU);
    mpfr_abs(delta.get(), delta.get(), MPFR_RNDU);

    bool bracketed = false;
    for (int attempt = 0; attempt < 400 && !bracketed; ++attempt) {
        mpfr_sub(lo.get(), w0.get(), delta.get(), MPFR_RNDD);
        mpfr_add(hi.get(), w0.get(), delta.get(), MPFR_RNDU);
        bool lo_ok = false;
        if (near_branch || mpfr_cmp_si(lo.get(), -1) <= 0) {
            mpfr_set_si(lo.get(), -1, MPFR_RNDD);
            lo_ok = true;
        } else {
            lo_ok = residual_sign(lo.get(), x) == Sign::Negative;
        }
        const bool hi_ok = residual_sign(hi.get(), x) == Sign::Positive;
        bracketed = lo_ok && hi_ok;
        if (!bracketed) mpfr_mul_2ui(delta.get(), delta.get(), 2, MPFR_RNDU);
    }
    if (!bracketed) throw DomainError("lambert_w: failed to bracket the root");

    // f is increasing on [-1, inf), so the sign checks certify the root.
    Interval enclosure = Interval::bounds(lo.get(), hi.get(), wp);

    // Interval Newton: N(X) = m - f(m) / f'(X), f'(w) = (1 + w) e^w.
    double width = enclosure.width_double();
    for (int iter = 0; iter < 30; ++iter) {
        const Interval deriv = (enclosure + Interval(1)) * exp(enclosure);
        if (deriv.contains_zero()) break;
        Float mid(wp);
        mpfr_add(mid.get(), enclosure.lo(), enclosure.hi(), MPFR_RNDN);
        mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
        const Interval m = Interval::point(mid.get(), wp);
        const Interval newton = m - (m * exp(m) - x) / deriv;
        if (!newton.overlaps(enclosure)) break;
        const Interval next = intersect(newton, enclosure);
        const double next_width = next.width_double();
        enclosure = next;
        if (!(next_width < 0.5 * width)) break;
        width = next_width;
    }
    return enclosure.with_precision(prec);
}

}  // namespace

Interval euler_gamma(mpfr_prec_t prec) {
    prec = resolve(prec);
    if (prec <= stored_digits_bits) return from_digits(gamma_digits, prec);
    Float lo(prec), hi(prec);
    mpfr_const_euler(lo.get(), MPFR_RNDD);
    mpfr_const_euler(hi.get(), MPFR_RNDU);
    return Interval::bounds(lo.get(), hi.get());
}

Interval napier_e(mpfr_prec_t prec) {
    prec = resolve(prec);
    if (prec <= stored_digits_bits) return from_digits(e_digits, prec);
    const PrecisionScope scope(prec);
    return exp(Interval(1));
}

Interval neg_inv_e(mpfr_prec_t prec) {
    prec = resolve(prec);
    const PrecisionScope scope(prec);
    return -(Interval(1) / napier_e(prec));
}

Interval lambert_w(const Interval& x) {
    const mpfr_prec_t prec = x.precision();
    const Interval branch = neg_inv_e(prec + 24);
    if (mpfr_less_p(x.lo(), branch.lo())) {
        throw DomainError("lambert_w: lower bound " + x.lo_string(20) + " is below -1/e");
    }
    Float lo(prec), hi(prec);
    if (x.is_point() && mpfr_greater_p(x.lo(), branch.hi())) {
        return w_point(x.lo(), prec, false).with_precision(prec);
    }
    if (mpfr_lessequal_p(x.lo(), branch.hi())) {
        mpfr_set_si(lo.get(), -1, MPFR_RNDD);
    } else {
        const Interval w = w_point(x.lo(), prec, false);
        mpfr_set(lo.get(), w.lo(), MPFR_RNDD);
    }
    if (mpfr_inf_p(x.hi())) {
        mpfr_set_inf(hi.get(), 1);
    } else {
        const Interval w = w_point(x.hi(), prec, mpfr_lessequal_p(x.hi(), branch.hi()) != 0);
        mpfr_set(hi.get(), w.hi(), MPFR_RNDU);
    }
    return Interval::bounds(lo.get(), hi.get(), prec);
}

Interval omega(const Interval& x) {
    const Interval w = lambert_w(x);
    Interval r = exp(w);
    if (mpfr_sgn(w.lo()) > 0 && x.is_finite()) {
        const Interval alt = x / w;
        if (alt.overlaps(r)) r = intersect(r, alt);
    }
    return r;
}

Interval log_power_tail(unsigned k, unsigned p, const Interval& a) {
    if (p < 2) throw DomainError("log_power_tail: exponent p must be >= 2");
    if (mpfr_cmp_ui(a.lo(), 1) < 0) {
        throw DomainError("log_power_tail: lower limit " + a.lo_string(20) + " is below 1");
    }
    // a^-q sum_{j=0}^k (k!/j!) A^j / q^(k-j+1), q = p - 1, A = log a.
    const PrecisionScope scope(a.precision());
    const long q = static_cast<long>(p) - 1;
    const Interval big_a = log(a);
    Interval sum(0);
    Interval factorial_ratio(1);  // k!/j!, built from j = k downwards
    for (long j = static_cast<long>(k); j >= 0; --j) {
        sum += factorial_ratio * pow_int(big_a, j) / pow_int(Interval(q), static_cast<long>(k) - j + 1);
        factorial_ratio *= Interval(j == 0 ? 1L : j);
    }
    return sum / pow_int(a, q);
}

Interval tail_integral(TailIntegralKind kind, const Interval& lower, const TailParams& params) {
    if (mpfr_cmp_ui(lower.lo(), 1) < 0) {
        throw DomainError("tail_integral: lower limit " + lower.lo_string(20) + " is below 1");
    }
    auto need = [](const std::optional<Interval>& v, const char* name) -> const Interval& {
        if (!v) throw MissingParameterError(std::string("tail_integral: missing parameter ") + name);
        return *v;
    };
    switch (kind) {
        case TailIntegralKind::SquaredLogOverSquare:
            return log_power_tail(2, 2, lower);
        case TailIntegralKind::CubedLogOverSquare:
            return log_power_tail(3, 2, lower);
        case TailIntegralKind::MixedC4Integrand: {
            const Interval& c1 = need(params.c1, "c1");
            const Interval& c2 = need(params.c2, "c2");
            const Interval& c3 = need(params.c3, "c3");
            const Interval& r2 = need(params.r2, "r2");
            const PrecisionScope scope(lower.precision());
            const Interval i22 = log_power_tail(2, 2, lower);
            const Interval square = i22 + Interval(2) * c2 * log_power_tail(1, 2, lower) +
                                    c2 * c2 * log_power_tail(0, 2, lower) +
                                    Interval(2) * c3 * (log_power_tail(3, 3, lower) + c2 * log_power_tail(2, 3, lower)) +
                                    c3 * c3 * log_power_tail(4, 4, lower);
            return c3 * i22 + r2 / c1 * square;
        }
    }
    throw DomainError("tail_integral: unknown kind");
}

Interval harmonic_sum(std::uint64_t n, mpfr_prec_t prec) {
    prec = resolve(prec);
    if (n == 0) return Interval::exact(0.0, prec);
    if (n <= 1000000) {
        Float lo(prec), hi(prec), t(prec);
        for (std::uint64_t k = n; k >= 1; --k) {  // small terms first
            mpfr_set_ui(t.get(), 1, MPFR_RNDN);
            mpfr_div_ui(t.get(), t.get(), static_cast<unsigned long>(k), MPFR_RNDD);
            mpfr_add(lo.get(), lo.get(), t.get(), MPFR_RNDD);
            mpfr_set_ui(t.get(), 1, MPFR_RNDN);
            mpfr_div_ui(t.get(), t.get(), static_cast<unsigned long>(k), MPFR_RNDU);
            mpfr_add(hi.get(), hi.get(), t.get(), MPFR_RNDU);
        }
        return Interval::bounds(lo.get(), hi.get());
    }
    // Euler-Maclaurin: H_n = log n + gamma + 1/(2n) - sum_k B_2k / (2k n^2k).
    // The remainder after any term has the sign of the next term and is
    // smaller in magnitude.
    static constexpr std::pair<long long, unsigned long long> bernoulli[] = {
        {1, 6},         {-1, 30},     {1, 42},          {-1, 30},     {5, 66},
        {-691, 2730},   {7, 6},       {-3617, 510},     {43867, 798}, {-174611, 330},
        {854513, 138},  {-236364091, 2730}, {8553103, 6}, {-23749461029, 870},
    };
    const PrecisionScope scope(prec);
    const Interval nn(static_cast<unsigned long>(n));
    const Interval inv_sq = Interval(1) / (nn * nn);
    Interval sum = log(nn) + euler_gamma(prec) + Interval(1) / (Interval(2) * nn);
    Interval power = inv_sq;
    const std::size_t terms = std::size(bernoulli) - 1;
    for (std::size_t k = 0; k < terms; ++k) {
        const auto [num, den] = bernoulli[k];
        sum -= Interval::rational(num, den * 2 * (k + 1)) * power;
        power *= inv_sq;
    }
    const auto [num, den] = bernoulli[terms];
    const Interval next = -Interval::rational(num, den * 2 * (terms + 1)) * power;
    return sum + Interval::hull(Interval(0), next);
}

}  // namespace lucky
