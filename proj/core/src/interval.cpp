#include "lucky/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <ostream>
#include <utility>

#include "lucky/error.hpp"

namespace lucky {

namespace {

thread_local mpfr_prec_t tls_precision = 128;

mpfr_prec_t resolve(mpfr_prec_t prec) { return prec > 0 ? prec : tls_precision; }

// mpfr_mul, except that 0 * inf is 0: interval endpoints that are
// infinite stand for unbounded sets of finite reals.
void mul_round(mpfr_ptr dst, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) {
    if ((mpfr_zero_p(x) && mpfr_inf_p(y)) || (mpfr_inf_p(x) && mpfr_zero_p(y))) {
        mpfr_set_zero(dst, 1);
        return;
    }
    mpfr_mul(dst, x, y, rnd);
}

std::string format_scientific(const std::string& digits, long exp10, bool negative) {
    // digits holds the significant digits, value = 0.digits * 10^exp10.
    std::string out = negative ? "-" : "";
    out += digits[0];
    if (digits.size() > 1) {
        out += '.';
        out += digits.substr(1);
    }
    out += 'e';
    out += std::to_string(exp10 - 1);
    return out;
}

std::string endpoint_string(mpfr_srcptr x, mpfr_rnd_t rnd, int digits) {
    if (mpfr_inf_p(x)) return mpfr_sgn(x) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(x)) return "0";
    mpfr_exp_t exp10 = 0;
    std::unique_ptr<char, void (*)(char*)> raw(
        mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits), x, rnd), mpfr_free_str);
    std::string s(raw.get());
    bool negative = false;
    if (!s.empty() && s[0] == '-') {
        negative = true;
        s.erase(0, 1);
    }
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    return format_scientific(s, static_cast<long>(exp10), negative);
}

}  // namespace

mpfr_prec_t working_precision() noexcept { return tls_precision; }

void set_working_precision(mpfr_prec_t bits) {
    if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) throw DomainError("invalid precision");
    tls_precision = bits;
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : previous_(tls_precision) {
    set_working_precision(bits);
}

PrecisionScope::~PrecisionScope() { tls_precision = previous_; }

namespace detail {

void Float::init(mpfr_prec_t prec) {
    const std::size_t bytes = mpfr_custom_get_size(prec);
    void* significand = storage_;
    if (bytes > sizeof(storage_)) {
        heap_ = static_cast<mp_limb_t*>(::operator new(bytes));
        significand = heap_;
    }
    mpfr_custom_init(significand, prec);
    mpfr_custom_init_set(&value_, MPFR_ZERO_KIND, 0, prec, significand);
}

void Float::release() noexcept {
    if (heap_ != nullptr) {
        ::operator delete(heap_);
        heap_ = nullptr;
    }
}

Float::Float(mpfr_prec_t prec) { init(prec); }

Float::Float(const Float& other) {
    init(other.prec());
    mpfr_set(&value_, &other.value_, MPFR_RNDN);
}

Float::Float(Float&& other) noexcept {
    if (other.heap_ != nullptr) {
        value_ = other.value_;
        heap_ = std::exchange(other.heap_, nullptr);
        other.init(MPFR_PREC_MIN);
    } else {
        init(other.prec());
        mpfr_set(&value_, &other.value_, MPFR_RNDN);
    }
}

Float& Float::operator=(const Float& other) {
    if (this == &other) return *this;
    if (prec() != other.prec()) {
        release();
        init(other.prec());
    }
    mpfr_set(&value_, &other.value_, MPFR_RNDN);
    return *this;
}

Float& Float::operator=(Float&& other) noexcept {
    if (this == &other) return *this;
    if (other.heap_ != nullptr) {
        release();
        value_ = other.value_;
        heap_ = std::exchange(other.heap_, nullptr);
        other.init(MPFR_PREC_MIN);
        return *this;
    }
    if (prec() != other.prec()) {
        release();
        init(other.prec());
    }
    mpfr_set(&value_, &other.value_, MPFR_RNDN);
    return *this;
}

Float::~Float() { release(); }

}  // namespace detail

Interval::Interval(mpfr_prec_t prec, int) : lo_(prec), hi_(prec) {}

Interval::Interval() : Interval(tls_precision, 0) {}

Interval::Interval(int value) : Interval(static_cast<long>(value)) {}

Interval::Interval(long value) : Interval(tls_precision, 0) {
    mpfr_set_si(lo_.get(), value, MPFR_RNDD);
    mpfr_set_si(hi_.get(), value, MPFR_RNDU);
}

Interval::Interval(long long value) : Interval(static_cast<long>(value)) {}

Interval::Interval(unsigned long value) : Interval(tls_precision, 0) {
    mpfr_set_ui(lo_.get(), value, MPFR_RNDD);
    mpfr_set_ui(hi_.get(), value, MPFR_RNDU);
}

Interval::Interval(unsigned long long value) : Interval(static_cast<unsigned long>(value)) {}

Interval Interval::exact(double value, mpfr_prec_t prec) {
    if (std::isnan(value)) throw DomainError("Interval::exact: NaN");
    Interval r(resolve(prec), 0);
    mpfr_set_d(r.lo_.get(), value, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), value, MPFR_RNDU);
    return r;
}

Interval Interval::bounds(double lo, double hi, mpfr_prec_t prec) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw DomainError("Interval::bounds: invalid endpoints");
    Interval r(resolve(prec), 0);
    mpfr_set_d(r.lo_.get(), lo, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), hi, MPFR_RNDU);
    return r;
}

Interval Interval::bounds(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec) {
    if (mpfr_nan_p(lo) || mpfr_nan_p(hi) || mpfr_greater_p(lo, hi)) {
        throw DomainError("Interval::bounds: invalid endpoints");
    }
    Interval r(prec > 0 ? prec : std::max(mpfr_get_prec(lo), mpfr_get_prec(hi)), 0);
    mpfr_set(r.lo_.get(), lo, MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi, MPFR_RNDU);
    return r;
}

Interval Interval::rational(long long num, unsigned long long den, mpfr_prec_t prec) {
    if (den == 0) throw DomainError("Interval::rational: zero denominator");
    Interval r(resolve(prec), 0);
    mpfr_set_si(r.lo_.get(), static_cast<long>(num), MPFR_RNDD);
    mpfr_set_si(r.hi_.get(), static_cast<long>(num), MPFR_RNDU);
    mpfr_div_ui(r.lo_.get(), r.lo_.get(), static_cast<unsigned long>(den), MPFR_RNDD);
    mpfr_div_ui(r.hi_.get(), r.hi_.get(), static_cast<unsigned long>(den), MPFR_RNDU);
    return r;
}

Interval Interval::decimal(std::string_view text, mpfr_prec_t prec) { return decimal(text, text, prec); }

Interval Interval::decimal(std::string_view lo, std::string_view hi, mpfr_prec_t prec) {
    Interval r(resolve(prec), 0);
    const std::string l(lo), h(hi);
    if (mpfr_set_str(r.lo_.get(), l.c_str(), 10, MPFR_RNDD) != 0 ||
        mpfr_set_str(r.hi_.get(), h.c_str(), 10, MPFR_RNDU) != 0) {
        throw DomainError("Interval::decimal: cannot parse '" + l + "' / '" + h + "'");
    }
    if (mpfr_nan_p(r.lo_.get()) || mpfr_nan_p(r.hi_.get()) || mpfr_greater_p(r.lo_.get(), r.hi_.get())) {
        throw DomainError("Interval::decimal: invalid endpoints '" + l + "' / '" + h + "'");
    }
    return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()), 0);
    mpfr_min(r.lo_.get(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

Interval Interval::nonnegative(mpfr_prec_t prec) {
    Interval r(resolve(prec), 0);
    mpfr_set_inf(r.hi_.get(), 1);
    return r;
}

Interval Interval::with_precision(mpfr_prec_t prec) const {
    Interval r(prec, 0);
    mpfr_set(r.lo_.get(), lo(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi(), MPFR_RNDU);
    return r;
}

double Interval::lo_double() const noexcept { return mpfr_get_d(lo(), MPFR_RNDD); }
double Interval::hi_double() const noexcept { return mpfr_get_d(hi(), MPFR_RNDU); }
double Interval::mid_double() const noexcept {
    return 0.5 * (mpfr_get_d(lo(), MPFR_RNDN) + mpfr_get_d(hi(), MPFR_RNDN));
}

double Interval::width_double() const noexcept {
    detail::Float w(precision());
    mpfr_sub(w.get(), hi(), lo(), MPFR_RNDU);
    return mpfr_get_d(w.get(), MPFR_RNDU);
}

bool Interval::is_point() const noexcept { return mpfr_equal_p(lo(), hi()) != 0; }
bool Interval::is_finite() const noexcept { return mpfr_number_p(lo()) && mpfr_number_p(hi()); }

bool Interval::contains(const Interval& other) const noexcept {
    return mpfr_lessequal_p(lo(), other.lo()) && mpfr_lessequal_p(other.hi(), hi());
}

bool Interval::contains(double value) const noexcept {
    return mpfr_cmp_d(lo(), value) <= 0 && mpfr_cmp_d(hi(), value) >= 0;
}

bool Interval::contains_integer(const mpz_class& value) const noexcept {
    return mpfr_cmp_z(lo(), value.get_mpz_t()) <= 0 && mpfr_cmp_z(hi(), value.get_mpz_t()) >= 0;
}

bool Interval::contains_zero() const noexcept { return mpfr_sgn(lo()) <= 0 && mpfr_sgn(hi()) >= 0; }

bool Interval::overlaps(const Interval& other) const noexcept {
    return mpfr_lessequal_p(lo(), other.hi()) && mpfr_lessequal_p(other.lo(), hi());
}

bool Interval::certainly_lt(const Interval& b) const noexcept { return mpfr_less_p(hi(), b.lo()) != 0; }
bool Interval::certainly_le(const Interval& b) const noexcept { return mpfr_lessequal_p(hi(), b.lo()) != 0; }

mpz_class Interval::ceil_hi() const {
    if (!mpfr_number_p(hi())) throw DomainError("ceil_hi: unbounded interval");
    mpz_class r;
    mpfr_get_z(r.get_mpz_t(), hi(), MPFR_RNDU);
    return r;
}

mpz_class Interval::floor_lo() const {
    if (!mpfr_number_p(lo())) throw DomainError("floor_lo: unbounded interval");
    mpz_class r;
    mpfr_get_z(r.get_mpz_t(), lo(), MPFR_RNDD);
    return r;
}

void Interval::check_nan(const char* op) const {
    if (mpfr_nan_p(lo()) || mpfr_nan_p(hi())) throw DomainError(std::string(op) + ": undefined result");
}

Interval& Interval::operator+=(const Interval& b) {
    Interval r(std::max(precision(), b.precision()), 0);
    mpfr_add(r.lo_.get(), lo(), b.lo(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), hi(), b.hi(), MPFR_RNDU);
    *this = std::move(r);
    check_nan("add");
    return *this;
}

Interval& Interval::operator-=(const Interval& b) {
    Interval r(std::max(precision(), b.precision()), 0);
    mpfr_sub(r.lo_.get(), lo(), b.hi(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), hi(), b.lo(), MPFR_RNDU);
    *this = std::move(r);
    check_nan("sub");
    return *this;
}

Interval& Interval::operator*=(const Interval& b) {
    Interval r(std::max(precision(), b.precision()), 0);
    if (mpfr_sgn(lo()) >= 0 && mpfr_sgn(b.lo()) >= 0) {
        mul_round(r.lo_.get(), lo(), b.lo(), MPFR_RNDD);
        mul_round(r.hi_.get(), hi(), b.hi(), MPFR_RNDU);
    } else {
        detail::Float t(r.precision());
        mpfr_srcptr xs[2] = {lo(), hi()};
        mpfr_srcptr ys[2] = {b.lo(), b.hi()};
        mpfr_set_inf(r.lo_.get(), 1);
        mpfr_set_inf(r.hi_.get(), -1);
        for (auto x : xs) {
            for (auto y : ys) {
                mul_round(t.get(), x, y, MPFR_RNDD);
                mpfr_min(r.lo_.get(), r.lo_.get(), t.get(), MPFR_RNDD);
                mul_round(t.get(), x, y, MPFR_RNDU);
                mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
            }
        }
    }
    *this = std::move(r);
    check_nan("mul");
    return *this;
}

Interval& Interval::operator/=(const Interval& b) {
    if (b.contains_zero()) {
        throw DomainError("div: denominator [" + b.lo_string(17) + ", " + b.hi_string(17) + "] contains zero");
    }
    if (mpfr_sgn(b.hi()) < 0) {
        *this = -*this / -b;
        return *this;
    }
    // b.lo > 0
    Interval r(std::max(precision(), b.precision()), 0);
    if (mpfr_sgn(lo()) >= 0) {
        mpfr_div(r.lo_.get(), lo(), b.hi(), MPFR_RNDD);
    } else {
        mpfr_div(r.lo_.get(), lo(), b.lo(), MPFR_RNDD);
    }
    if (mpfr_sgn(hi()) >= 0) {
        mpfr_div(r.hi_.get(), hi(), b.lo(), MPFR_RNDU);
    } else {
        mpfr_div(r.hi_.get(), hi(), b.hi(), MPFR_RNDU);
    }
    *this = std::move(r);
    check_nan("div");
    return *this;
}

Interval operator-(const Interval& a) {
    Interval r(a.precision(), 0);
    mpfr_neg(r.lo_.get(), a.hi(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo(), MPFR_RNDU);
    return r;
}

namespace {

// One correctly rounded evaluation at a point: the exact value lies in
// [f(x) rounded down, next float up], or is f(x) itself when exact.
template <class F>
void point_increasing(F f, mpfr_ptr lo, mpfr_ptr hi, mpfr_srcptr x) {
    const int inexact = f(lo, x, MPFR_RNDD);
    mpfr_set(hi, lo, MPFR_RNDU);
    if (inexact != 0) mpfr_nextabove(hi);
}

}  // namespace

Interval sqrt(const Interval& x) {
    if (mpfr_sgn(x.lo()) < 0) {
        throw DomainError("sqrt: lower bound " + x.lo_string(17) + " is negative");
    }
    Interval r(x.precision(), 0);
    if (x.is_point()) {
        point_increasing(mpfr_sqrt, r.lo_.get(), r.hi_.get(), x.lo());
        return r;
    }
    mpfr_sqrt(r.lo_.get(), x.lo(), MPFR_RNDD);
    mpfr_sqrt(r.hi_.get(), x.hi(), MPFR_RNDU);
    return r;
}

Interval log(const Interval& x) {
    if (mpfr_sgn(x.lo()) <= 0) {
        throw DomainError("log: lower bound " + x.lo_string(17) + " is not positive");
    }
    Interval r(x.precision(), 0);
    if (x.is_point()) {
        point_increasing(mpfr_log, r.lo_.get(), r.hi_.get(), x.lo());
        return r;
    }
    mpfr_log(r.lo_.get(), x.lo(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), x.hi(), MPFR_RNDU);
    return r;
}

Interval exp(const Interval& x) {
    Interval r(x.precision(), 0);
    if (x.is_point()) {
        point_increasing(mpfr_exp, r.lo_.get(), r.hi_.get(), x.lo());
        return r;
    }
    mpfr_exp(r.lo_.get(), x.lo(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), x.hi(), MPFR_RNDU);
    return r;
}

Interval pow_int(const Interval& x, long k) {
    if (k < 0) return Interval(1) / pow_int(x, -k);
    Interval r(x.precision(), 0);
    if (k == 0) {
        mpfr_set_ui(r.lo_.get(), 1, MPFR_RNDD);
        mpfr_set_ui(r.hi_.get(), 1, MPFR_RNDU);
        return r;
    }
    if (k % 2 == 1 || mpfr_sgn(x.lo()) >= 0) {
        mpfr_pow_si(r.lo_.get(), x.lo(), k, MPFR_RNDD);
        mpfr_pow_si(r.hi_.get(), x.hi(), k, MPFR_RNDU);
    } else if (mpfr_sgn(x.hi()) <= 0) {
        mpfr_pow_si(r.lo_.get(), x.hi(), k, MPFR_RNDD);
        mpfr_pow_si(r.hi_.get(), x.lo(), k, MPFR_RNDU);
    } else {
        detail::Float t(r.precision());
        mpfr_pow_si(r.hi_.get(), x.lo(), k, MPFR_RNDU);
        mpfr_pow_si(t.get(), x.hi(), k, MPFR_RNDU);
        mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
    }
    return r;
}

Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()), 0);
    mpfr_max(r.lo_.get(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()), 0);
    mpfr_min(r.lo_.get(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

Interval intersect(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()), 0);
    mpfr_max(r.lo_.get(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi(), b.hi(), MPFR_RNDU);
    if (mpfr_greater_p(r.lo(), r.hi())) throw DomainError("intersect: disjoint intervals");
    return r;
}

std::string Interval::lo_string(int digits) const {
    if (digits <= 0) digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30103)) + 2;
    return endpoint_string(lo(), MPFR_RNDD, digits);
}

std::string Interval::hi_string(int digits) const {
    if (digits <= 0) digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30103)) + 2;
    return endpoint_string(hi(), MPFR_RNDU, digits);
}

std::string Interval::to_question_string(int max_digits) const {
    const std::string bracket = "[" + lo_string(20) + ", " + hi_string(20) + "]";
    if (!is_finite()) return bracket;
    if (is_point() && mpfr_integer_p(lo()) && mpfr_cmpabs_ui(lo(), 1000000000000000000UL) < 0) {
        return std::to_string(mpfr_get_si(lo(), MPFR_RNDN));
    }
    if (contains_zero()) return is_point() ? "0" : bracket;

    const bool negative = mpfr_sgn(hi()) < 0;
    const Interval mag = (negative ? -*this : *this).with_precision(precision() + 64);
    const PrecisionScope scope(precision() + 64);

    // Decimal exponent of the leading digit of the upper bound.
    detail::Float l10(53);
    mpfr_log10(l10.get(), mag.hi(), MPFR_RNDN);
    const long lead = static_cast<long>(std::floor(mpfr_get_d(l10.get(), MPFR_RNDN)));

    for (int k = max_digits; k >= 1; --k) {
        const long p = k - 1 - lead;  // mag * 10^p has k digits before the point
        const Interval scale = pow_int(Interval(10), p);
        const Interval scaled = mag * scale;
        detail::Float mid(mag.precision());
        mpfr_add(mid.get(), scaled.lo(), scaled.hi(), MPFR_RNDN);
        mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
        mpz_class m;
        mpfr_get_z(m.get_mpz_t(), mid.get(), MPFR_RNDN);
        if (mpfr_cmp_z(scaled.lo(), mpz_class(m - 1).get_mpz_t()) < 0) continue;
        if (mpfr_cmp_z(scaled.hi(), mpz_class(m + 1).get_mpz_t()) > 0) continue;

        std::string digits = m.get_str();
        const std::string sign = negative ? "-" : "";
        const long len = static_cast<long>(digits.size());
        if (p <= 0 || lead < -6 || lead > 20) {
            // value = 0.digits * 10^(len - p)
            std::string s = format_scientific(digits, len - p, negative);
            const auto e = s.find('e');
            return s.substr(0, e) + "?" + s.substr(e);
        }
        if (len > p) {
            return sign + digits.substr(0, static_cast<std::size_t>(len - p)) + "." +
                   digits.substr(static_cast<std::size_t>(len - p)) + "?";
        }
        return sign + "0." + std::string(static_cast<std::size_t>(p - len), '0') + digits + "?";
    }
    return bracket;
}

std::ostream& operator<<(std::ostream& os, const Interval& x) { return os << x.to_question_string(); }

Interval log_of(std::uint64_t n, mpfr_prec_t prec) {
    const PrecisionScope scope(resolve(prec));
    return log(Interval(static_cast<unsigned long>(n)));
}

}  // namespace lucky
