#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace lucky {

// Precision (bits of significand) given to intervals created without an
// explicit precision. Thread-local; 128 unless changed.
mpfr_prec_t working_precision() noexcept;
void set_working_precision(mpfr_prec_t bits);

// Sets the working precision for the lifetime of the scope.
class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t previous_;
};

namespace detail {

// One MPFR number whose significand lives inline for precisions up to
// 256 bits. Uses the mpfr_custom interface, so it must never be passed to
// mpfr_set_prec or mpfr_clear.
class Float {
public:
    explicit Float(mpfr_prec_t prec);
    Float(const Float& other);
    Float(Float&& other) noexcept;
    Float& operator=(const Float& other);
    Float& operator=(Float&& other) noexcept;
    ~Float();

    mpfr_ptr get() noexcept { return &value_; }
    mpfr_srcptr get() const noexcept { return &value_; }
    mpfr_prec_t prec() const noexcept { return mpfr_get_prec(&value_); }

private:
    static constexpr std::size_t inline_limbs = 4;

    void init(mpfr_prec_t prec);
    void release() noexcept;

    __mpfr_struct value_;
    mp_limb_t storage_[inline_limbs];
    mp_limb_t* heap_ = nullptr;
};

}  // namespace detail

// A closed interval [lo, hi] of extended reals with outward rounding:
// every operation returns an enclosure of the exact result over all
// points of its inputs. lo may be -inf and hi may be +inf; NaN never
// appears, operations outside their domain throw DomainError.
class Interval {
public:
    // [0, 0] at the working precision.
    Interval();
    Interval(int value);
    Interval(long value);
    Interval(long long value);
    Interval(unsigned long value);
    Interval(unsigned long long value);

    // The exact binary value of a double.
    static Interval exact(double value, mpfr_prec_t prec = 0);
    // Enclosure of num/den.
    static Interval rational(long long num, unsigned long long den, mpfr_prec_t prec = 0);
    // Enclosure of a decimal literal such as "0.542" or "1e-5".
    static Interval decimal(std::string_view text, mpfr_prec_t prec = 0);
    // [lo, hi] from two decimal literals, rounded outward.
    static Interval decimal(std::string_view lo, std::string_view hi, mpfr_prec_t prec = 0);
    // [lo, hi] from two doubles (exact binary values). Requires lo <= hi.
    static Interval bounds(double lo, double hi, mpfr_prec_t prec = 0);
    // [lo, hi] from MPFR values, rounded outward to prec (0: the larger of
    // the two input precisions).
    static Interval bounds(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec = 0);
    static Interval point(mpfr_srcptr value, mpfr_prec_t prec = 0) { return bounds(value, value, prec); }
    static Interval hull(const Interval& a, const Interval& b);
    // [0, +inf)
    static Interval nonnegative(mpfr_prec_t prec = 0);

    mpfr_prec_t precision() const noexcept { return lo_.prec(); }
    // Copy rounded outward to another precision.
    Interval with_precision(mpfr_prec_t prec) const;

    mpfr_srcptr lo() const noexcept { return lo_.get(); }
    mpfr_srcptr hi() const noexcept { return hi_.get(); }
    // Endpoints rounded outward to double.
    double lo_double() const noexcept;
    double hi_double() const noexcept;
    double mid_double() const noexcept;
    // hi - lo rounded up, as a double.
    double width_double() const noexcept;

    bool is_point() const noexcept;
    bool is_finite() const noexcept;
    bool contains(const Interval& other) const noexcept;
    bool contains(double value) const noexcept;
    bool contains_integer(const mpz_class& value) const noexcept;
    bool contains_zero() const noexcept;
    bool overlaps(const Interval& other) const noexcept;

    // Certified order relations between every pair of points.
    bool certainly_lt(const Interval& b) const noexcept;
    bool certainly_le(const Interval& b) const noexcept;
    bool certainly_gt(const Interval& b) const noexcept { return b.certainly_lt(*this); }
    bool certainly_ge(const Interval& b) const noexcept { return b.certainly_le(*this); }

    // Conservative integer roundings of the endpoints.
    mpz_class ceil_hi() const;   // ceil(hi): >= ceil(x) for every x inside
    mpz_class floor_lo() const;  // floor(lo): <= floor(x) for every x inside

    Interval& operator+=(const Interval& b);
    Interval& operator-=(const Interval& b);
    Interval& operator*=(const Interval& b);
    Interval& operator/=(const Interval& b);

    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
    friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
    friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
    friend Interval operator-(const Interval& a);

    friend Interval sqrt(const Interval& x);
    friend Interval log(const Interval& x);
    friend Interval exp(const Interval& x);
    friend Interval pow_int(const Interval& x, long k);
    friend Interval max(const Interval& a, const Interval& b);
    friend Interval min(const Interval& a, const Interval& b);
    friend Interval intersect(const Interval& a, const Interval& b);

    // Decimal rendering where a trailing '?' means the preceding digit may
    // be off by one, e.g. "10770.556?". Falls back to "[lo, hi]" when the
    // interval is too wide for a single digit string.
    std::string to_question_string(int max_digits = 30) const;
    // Endpoints as decimal strings, rounded outward.
    std::string lo_string(int digits = 0) const;
    std::string hi_string(int digits = 0) const;

private:
    explicit Interval(mpfr_prec_t prec, int /*tag*/);
    void check_nan(const char* op) const;

    detail::Float lo_;
    detail::Float hi_;
};

std::ostream& operator<<(std::ostream& os, const Interval& x);

// log n for a positive integer n.
Interval log_of(std::uint64_t n, mpfr_prec_t prec = 0);

}  // namespace lucky
