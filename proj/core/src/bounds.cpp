#include "lucky/bounds.hpp"

#include <algorithm>
#include <array>

#include "lucky/special.hpp"

namespace lucky {

// ConstantSet ---------------------------------------------------------------

ConstantEntry* ConstantSet::find(const std::string& name) {
    for (auto& e : entries_) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const ConstantEntry* ConstantSet::find(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

void ConstantSet::set(const std::string& name, Interval value, const std::string& lemma) {
    if (auto* e = find(name)) {
        e->real = std::move(value);
        e->integer.reset();
        e->lemma = lemma;
        return;
    }
    entries_.push_back({name, std::move(value), std::nullopt, lemma});
}

void ConstantSet::set(const std::string& name, mpz_class value, const std::string& lemma) {
    if (auto* e = find(name)) {
        e->integer = std::move(value);
        e->real.reset();
        e->lemma = lemma;
        return;
    }
    entries_.push_back({name, std::nullopt, std::move(value), lemma});
}

void ConstantSet::merge(const ConstantSet& other) {
    for (const auto& e : other.entries_) {
        if (e.real) set(e.name, *e.real, e.lemma);
        if (e.integer) set(e.name, *e.integer, e.lemma);
    }
}

bool ConstantSet::has(const std::string& name) const { return find(name) != nullptr; }

const Interval& ConstantSet::real(const std::string& name) const {
    const auto* e = find(name);
    if (e == nullptr || !e->real) throw MissingParameterError("constant " + name + " is not available");
    return *e->real;
}

const mpz_class& ConstantSet::integer(const std::string& name) const {
    const auto* e = find(name);
    if (e == nullptr || !e->integer) throw MissingParameterError("integer " + name + " is not available");
    return *e->integer;
}

std::uint64_t ConstantSet::index(const std::string& name) const {
    const mpz_class& v = integer(name);
    if (v < 0 || !v.fits_ulong_p()) throw RangeError(name + " = " + v.get_str() + " is not a usable index");
    return v.get_ui();
}

// Forms ---------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Form, std::string_view>, 9> form_names = {{
    {Form::FirstLower, "FirstLower"},
    {Form::TauUpper, "TauUpper"},
    {Form::EllUpper, "EllUpper"},
    {Form::TauLower, "TauLower"},
    {Form::SecondLower, "SecondLower"},
    {Form::ThmLower1, "ThmLower1"},
    {Form::ThmLower2, "ThmLower2"},
    {Form::ThmUpper1, "ThmUpper1"},
    {Form::ThmUpper2, "ThmUpper2"},
}};

Interval to_interval(const mpz_class& n) {
    if (n.fits_ulong_p()) return Interval(n.get_ui());
    detail::Float lo(working_precision()), hi(working_precision());
    mpfr_set_z(lo.get(), n.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(hi.get(), n.get_mpz_t(), MPFR_RNDU);
    return Interval::bounds(lo.get(), hi.get());
}

Interval half() { return Interval::rational(1, 2); }

Interval decimal_0542() { return Interval::decimal("0.542"); }

void require(bool ok, const char* lemma_id, const std::string& detail) {
    if (!ok) throw HypothesisError("", lemma_id, detail);
}

bool certainly_positive(const Interval& x) { return mpfr_sgn(x.lo()) > 0; }

void require_c1_range(const Interval& c1, const char* lemma_id) {
    const Interval low = Interval::decimal("0.99");
    require(c1.certainly_ge(low) && c1.certainly_le(Interval(1)), lemma_id,
            "c1 = " + c1.to_question_string() + " is not certified to lie in [0.99, 1]");
}

}  // namespace

std::string_view form_name(Form form) {
    for (const auto& [f, name] : form_names) {
        if (f == form) return name;
    }
    return "unknown";
}

std::optional<Form> parse_form(std::string_view name) {
    for (const auto& [f, n] : form_names) {
        if (n == name) return f;
    }
    return std::nullopt;
}

bool bounds_tau(Form form) { return form == Form::TauUpper || form == Form::TauLower; }

bool is_upper(Form form) {
    return form == Form::TauUpper || form == Form::EllUpper || form == Form::ThmUpper1 || form == Form::ThmUpper2;
}

std::uint64_t form_minimum(Form form) {
    return form == Form::FirstLower || form == Form::ThmLower1 ? 1 : 3;
}

std::vector<std::string> form_constants(Form form) {
    switch (form) {
        case Form::FirstLower: return {"c1"};
        case Form::TauUpper: return {"c1", "c2", "c3"};
        case Form::EllUpper: return {"c1", "c2", "c4"};
        case Form::TauLower: return {"c5", "c6"};
        case Form::SecondLower:
        case Form::ThmLower2: return {"c7", "c8"};
        case Form::ThmUpper2: return {"c2", "c4"};
        case Form::ThmLower1:
        case Form::ThmUpper1: return {};
    }
    return {};
}

std::string BoundStatement::id() const { return std::string(form_name(form)) + "/" + round; }

BoundEvaluator::BoundEvaluator(const BoundStatement& stmt) : form_(stmt.form) {
    Interval* slots[] = {&c1_, &c2_, &c3_, &c4_, &c5_, &c6_, &c7_, &c8_};
    for (const auto& name : form_constants(stmt.form)) {
        const auto it = stmt.constants.find(name);
        if (it == stmt.constants.end()) {
            throw MissingParameterError(stmt.id() + " lacks constant " + name);
        }
        *slots[name[1] - '1'] = it->second;
    }
}

bool BoundEvaluator::scaled() const noexcept { return !bounds_tau(form_); }

Interval BoundEvaluator::operator()(std::uint64_t n, const Interval& log_n, const Interval& llog_n) const {
    const Interval g = shape(log_n, llog_n);
    return scaled() ? Interval(n) * g : g;
}

Interval BoundEvaluator::shape(const Interval& log_n, const Interval& llog_n) const {
    const Interval& L = log_n;
    const Interval& LL = llog_n;
    switch (form_) {
        case Form::FirstLower:
            return c1_ * L;
        case Form::ThmLower1:
            return L;
        case Form::TauUpper: {
            const Interval v = LL / L;
            return ((LL + c2_) / L + c3_ * v * v) / c1_;
        }
        case Form::EllUpper:
            return L + (half() * LL * LL + c2_ * LL + c4_) / c1_;
        case Form::TauLower:
            return (LL - c5_) / L - c6_ * LL * LL * LL / (L * L);
        case Form::SecondLower:
        case Form::ThmLower2:
            return L + half() * LL * LL - c7_ * LL - c8_;
        case Form::ThmUpper1:
            return L + half() * LL * LL + Interval(1);
        case Form::ThmUpper2:
            return L + half() * LL * LL + c2_ * LL + c4_;
    }
    throw DomainError("unknown form");
}

Interval log_of(const mpz_class& n) {
    if (n <= 0) throw DomainError("log_of: argument must be positive");
    return log(to_interval(n));
}

Interval c3_of(const mpz_class& n) {
    const Interval L = log_of(n);
    const Interval LL = log(L);
    const Interval v = LL / L;
    const Interval first = (-log(Interval(1) - v) - v) / (v * v);
    return first + L * L / (to_interval(n) * LL * LL);
}

// Derivations ---------------------------------------------------------------

ConstantSet derive_first_lower(const StatsContext& ctx, std::uint64_t n0) {
    require(n0 >= 2, lemma::first_lower, "n0 must be >= 2");
    const PrecisionScope scope(ctx.precision());
    const Interval c0 = ctx.varrho(n0) + euler_gamma() + Interval(1) - decimal_0542() / Interval(n0);
    const Interval c1 = Interval(1) - exp(-c0);
    const mpz_class n1 = (exp(c0) * Interval(n0)).ceil_hi();
    ConstantSet out(round_label::first);
    out.set("n0", mpz_class(static_cast<unsigned long>(n0)), lemma::first_lower);
    out.set("c0", c0, lemma::first_lower);
    out.set("c1", c1, lemma::first_lower);
    out.set("n1", n1, lemma::first_lower);
    return out;
}

Interval optimal_t(const Interval& c0) {
    const PrecisionScope scope(c0.precision());
    return (lambert_w(exp(Interval(1) - c0)) + c0 - Interval(1)) / c0;
}

FiniteRange finite_range(const StatsContext& ctx, std::uint64_t n0, const Interval& t) {
    if (!t.certainly_le(Interval(1))) throw DomainError("finite_range: t must satisfy t <= 1");
    const ConstantSet first = derive_first_lower(ctx, n0);
    const PrecisionScope scope(ctx.precision());
    const Interval& c0 = first.real("c0");
    const Interval growth = exp(c0 * t);
    FiniteRange r;
    r.n0 = n0;
    r.c0 = c0;
    r.t = t;
    r.m1 = (growth * Interval(n0)).ceil_hi();
    r.m2 = exp(c0 * (Interval(1) - t) * (growth - Interval(1))).floor_lo();
    return r;
}

FiniteRange finite_range(const StatsContext& ctx, std::uint64_t n0) {
    const ConstantSet first = derive_first_lower(ctx, n0);
    return finite_range(ctx, n0, optimal_t(first.real("c0")));
}

ConstantSet derive_tau_upper(const StatsContext& ctx, const Interval& c1, std::uint64_t n1, const std::string& round) {
    const PrecisionScope scope(ctx.precision());
    require_c1_range(c1, lemma::tau_upper);
    require(n1 >= 10771, lemma::tau_upper, "n1 = " + std::to_string(n1) + " is below 10771");
    const Interval L1 = log_of(n1);
    const Interval LL1 = log(L1);
    const mpz_class n2 = (Interval(n1) * L1).ceil_hi();
    const Interval c2 = -log(Interval(1) / c1) + Interval(1) / (Interval(1) - LL1 / L1);
    const Interval c3 = c3_of(n2);
    ConstantSet out(round);
    out.set("c1", c1, lemma::tau_upper);
    out.set("n1", mpz_class(static_cast<unsigned long>(n1)), lemma::tau_upper);
    out.set("n2", n2, lemma::tau_upper);
    out.set("c2", c2, lemma::tau_upper);
    out.set("c3", c3, lemma::omega_sum);
    return out;
}

ConstantSet derive_ell_upper(const StatsContext& ctx, const ConstantSet& prior) {
    const PrecisionScope scope(ctx.precision());
    const Interval& c1 = prior.real("c1");
    const Interval& c2 = prior.real("c2");
    const Interval& c3 = prior.real("c3");
    const mpz_class& n2_big = prior.integer("n2");
    require(certainly_positive(c1) && certainly_positive(c2) && certainly_positive(c3), lemma::ell_upper,
            "c1, c2, c3 must be positive");
    // e^e = 15.15...
    require(n2_big >= 16, lemma::ell_upper, "n2 = " + n2_big.get_str() + " does not exceed e^e");
    const std::uint64_t n2 = prior.index("n2");
    const std::uint64_t ell_n2 = ctx.table().ell(n2);  // RangeError beyond the table
    const Interval varrho_n2 = ctx.varrho(n2);

    const Interval L2 = log_of(n2);
    const Interval LL2 = log(L2);
    const Interval v = LL2 / L2;
    const Interval r1 = Interval(1) / (Interval(1) - Interval(1) / Interval(ell_n2));
    const Interval inner = ((LL2 + c2) / L2 + c3 * v * v) / c1;
    require(inner.certainly_lt(Interval(1)), lemma::ell_upper,
            "tau bound at n2 is not below 1: " + inner.to_question_string());
    const Interval r2 = Interval(1) / (Interval(1) - inner);

    const Interval Lm = log_of(n2 - 1);
    const Interval LLm = log(Lm);
    TailParams params{c1, c2, c3, r2};
    const Interval c4 = c1 * (varrho_n2 + euler_gamma() + Interval(1)) - half() * LLm * LLm - c2 * LLm +
                        r1 * r2 / (Interval(n2 - 1) * L2) +
                        tail_integral(TailIntegralKind::MixedC4Integrand, Lm, params);

    ConstantSet out = prior;
    out.set("r1", r1, lemma::ell_upper);
    out.set("r2", r2, lemma::ell_upper);
    out.set("c4", c4, lemma::ell_upper);
    return out;
}

ConstantSet derive_tau_lower(const StatsContext& ctx, const ConstantSet& prior) {
    const PrecisionScope scope(ctx.precision());
    const Interval& c1 = prior.real("c1");
    const Interval& c2 = prior.real("c2");
    const Interval& c4 = prior.real("c4");
    const mpz_class& n2 = prior.integer("n2");
    require_c1_range(c1, lemma::tau_lower);
    require(certainly_positive(c2), lemma::tau_lower, "c2 = " + c2.to_question_string() + " is not positive");
    require(certainly_positive(c4), lemma::tau_lower, "c4 = " + c4.to_question_string() + " is not positive");
    require(n2 >= 10771, lemma::tau_lower, "n2 = " + n2.get_str() + " is below 10771");

    const mpz_class n3 = (to_interval(n2) * log_of(n2)).ceil_hi();
    const Interval c5 = log(Interval(1) / c1);
    const Interval c3n3 = c3_of(n3);
    const Interval L3 = log_of(n3);
    const Interval LL3 = log(L3);
    const Interval c6 =
        (half() + c2 / LL3 + c4 / (LL3 * LL3)) / (Interval(1) - LL3 / L3) / c1 +
        (Interval(1) / LL3 + Interval(2) * c3n3 / L3 + c3n3 * c3n3 * LL3 / (L3 * L3)) / (Interval(2) * c1 * c1);

    ConstantSet out = prior;
    out.set("n3", n3, lemma::tau_lower);
    out.set("c3_n3", c3n3, lemma::omega_sum);
    out.set("c5", c5, lemma::tau_lower);
    out.set("c6", c6, lemma::tau_lower);
    return out;
}

ConstantSet derive_second_lower(const StatsContext& ctx, const ConstantSet& prior) {
    const PrecisionScope scope(ctx.precision());
    const Interval& c1 = prior.real("c1");
    const Interval& c2 = prior.real("c2");
    const Interval& c3 = prior.real("c3");
    const Interval& c5 = prior.real("c5");
    const Interval& c6 = prior.real("c6");
    const mpz_class& n3_big = prior.integer("n3");
    require(certainly_positive(c1) && certainly_positive(c2) && certainly_positive(c3) && certainly_positive(c6),
            lemma::second_lower, "c1, c2, c3, c6 must be positive");
    require(mpfr_sgn(c5.lo()) >= 0, lemma::second_lower, "c5 must be nonnegative");
    // e^(e^2) = 1618.17...
    require(n3_big >= 1619, lemma::second_lower, "n3 = " + n3_big.get_str() + " does not exceed e^(e^2)");
    const std::uint64_t n3 = prior.index("n3");
    const Interval varrho_n3 = ctx.varrho(n3);

    const Interval L3 = log_of(n3);
    const Interval LL3 = log(L3);
    const Interval Lm = log_of(n3 - 1);
    const Interval LLm = log(Lm);
    const Interval r3_raw = -varrho_n3 - euler_gamma() - Interval(1) + decimal_0542() / Interval(n3) +
                            half() * LL3 * LL3 - c5 * LLm +
                            c6 * tail_integral(TailIntegralKind::CubedLogOverSquare, Lm);
    const Interval r3 = max(Interval(0), r3_raw);
    const Interval w = LL3 * LL3 / L3;
    const Interval r4 = c2 + Interval(27) * exp(c2 / Interval(3) - Interval(3)) / Interval(2) +
                        c3 * (w + half() * w * w);
    const Interval c7 = c5 + Interval(1) / c1;
    const Interval c8 = r3 + r4 / c1;

    ConstantSet out = prior;
    out.set("r3", r3, lemma::second_lower);
    out.set("r4", r4, lemma::second_lower);
    out.set("c7", c7, lemma::second_lower);
    out.set("c8", c8, lemma::second_lower);
    return out;
}

BootstrapThreshold bootstrap_threshold(const Interval& c7, const Interval& c8) {
    const PrecisionScope scope(std::max(c7.precision(), c8.precision()));
    if (!c7.is_finite() || !c8.is_finite()) throw DomainError("bootstrap_threshold: constants must be finite");
    BootstrapThreshold b;
    b.exponent = c7 + sqrt(c7 * c7 + Interval(2) * c8);
    const Interval log_n4 = exp(b.exponent);  // n4 = ceil(exp(log_n4))
    const Interval googol_log = Interval(100) * log(Interval(10)) - Interval::decimal("1e-20");
    b.below_googol = log_n4.certainly_lt(googol_log);
    if (log_n4.certainly_le(Interval(20000))) b.n4 = exp(log_n4).ceil_hi();
    return b;
}

}  // namespace lucky
