#include <algorithm>
#include <functional>

#include "lucky/bounds.hpp"
#include "lucky/special.hpp"
#include "lucky/verifier.hpp"

namespace lucky {

std::vector<BoundStatement> PipelineResult::statements() const {
    std::vector<BoundStatement> out;
    for (const auto& s : stages) out.insert(out.end(), s.statements.begin(), s.statements.end());
    return out;
}

const StageResult& PipelineResult::stage(std::string_view name) const {
    for (const auto& s : stages) {
        if (s.stage == name) return s;
    }
    throw MissingParameterError("no stage named " + std::string(name));
}

namespace {

mpz_class big(std::uint64_t n) { return mpz_class(static_cast<unsigned long>(n)); }

mpz_class googol() {
    mpz_class g;
    mpz_ui_pow_ui(g.get_mpz_t(), 10, 100);
    return g;
}

BoundStatement statement(Form form, const ConstantSet& constants, const mpz_class& from,
                         std::optional<mpz_class> to = std::nullopt) {
    BoundStatement s;
    s.form = form;
    s.round = constants.round();
    for (const auto& name : form_constants(form)) s.constants.emplace(name, constants.real(name));
    s.valid_from = from;
    s.valid_to = std::move(to);
    return s;
}

// n -> ceil(n log n), the step from n1 to n2 and from n2 to n3.
mpz_class next_threshold(const mpz_class& n) {
    detail::Float lo(working_precision()), hi(working_precision());
    mpfr_set_z(lo.get(), n.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(hi.get(), n.get_mpz_t(), MPFR_RNDU);
    return (Interval::bounds(lo.get(), hi.get()) * log_of(n)).ceil_hi();
}

// Largest n1 >= floor whose chain of `steps` thresholds stays inside the
// table; 0 when even floor does not fit.
std::uint64_t largest_fitting_n1(std::uint64_t floor, int steps, std::uint64_t size) {
    auto fits = [&](std::uint64_t n1) {
        mpz_class n = big(n1);
        for (int i = 0; i < steps; ++i) n = next_threshold(n);
        return n <= big(size);
    };
    if (floor > size || !fits(floor)) return 0;
    std::uint64_t lo = floor, hi = size;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (fits(mid)) lo = mid; else hi = mid - 1;
    }
    return lo;
}

template <class F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageAbort&) {
        throw;
    } catch (const HypothesisError& e) {
        throw StageAbort(stage, e.lemma(), e.detail());
    } catch (const RangeError& e) {
        throw StageAbort(stage, "table", std::string("out of table: ") + e.what());
    } catch (const MissingParameterError& e) {
        throw StageAbort(stage, "parameters", e.what());
    } catch (const DomainError& e) {
        throw StageAbort(stage, "domain", e.what());
    }
}

// Smallest n0 >= 2 giving c1 >= 0.99; 0 if no index in the table does.
std::uint64_t auto_n0(const StatsContext& ctx) {
    const std::uint64_t size = ctx.table().size();
    if (size < 2) return 0;
    const PrecisionScope scope(ctx.precision());
    // c1 >= 0.99 iff c0 >= log 100.
    const Interval target = log(Interval(100));
    const Interval base = euler_gamma() + Interval(1);
    RhoStream stream(ctx, 2);
    for (std::uint64_t n = 2;; ++n) {
        const Interval c0 = stream.varrho() + base - Interval::decimal("0.542") / Interval(n);
        if (c0.certainly_ge(target)) return n;
        if (n == size) return 0;
        stream.advance();
    }
}

// One full round: tau upper, ell upper, tau lower, second lower.
ConstantSet full_round(const StatsContext& ctx, const Interval& c1, std::uint64_t n1, const std::string& round) {
    ConstantSet cs = derive_tau_upper(ctx, c1, n1, round);
    cs = derive_ell_upper(ctx, cs);
    cs = derive_tau_lower(ctx, cs);
    return derive_second_lower(ctx, cs);
}

void emit_round_statements(StageResult& stage, bool with_second_lower) {
    const ConstantSet& cs = stage.constants;
    const mpz_class& n2 = cs.integer("n2");
    stage.statements.push_back(statement(Form::TauUpper, cs, n2));
    stage.statements.push_back(statement(Form::EllUpper, cs, n2));
    if (with_second_lower) {
        const mpz_class& n3 = cs.integer("n3");
        stage.statements.push_back(statement(Form::TauLower, cs, n3));
        stage.statements.push_back(statement(Form::SecondLower, cs, n3));
    }
}

std::uint64_t pick_n1(std::uint64_t configured, std::uint64_t floor, int steps, std::uint64_t size,
                      const char* lemma_id) {
    if (configured != 0) return configured;
    const std::uint64_t n1 = largest_fitting_n1(std::max<std::uint64_t>(floor, 10771), steps, size);
    if (n1 == 0) {
        throw RangeError(std::string(lemma_id) + ": no n1 >= " + std::to_string(std::max<std::uint64_t>(floor, 10771)) +
                         " keeps the derived thresholds inside a table of size " + std::to_string(size));
    }
    return n1;
}

}  // namespace

PipelineResult run_pipeline(const StatsContext& ctx, const PipelineParams& params) {
    const PrecisionScope scope(ctx.precision());
    const std::uint64_t size = ctx.table().size();
    PipelineResult result;

    // First lower bound.
    StageResult first{stage_name::first_lower, ConstantSet(round_label::first), {}};
    in_stage(stage_name::first_lower, [&] {
        std::uint64_t n0 = params.n0_first;
        if (n0 == 0) {
            n0 = auto_n0(ctx);
            if (n0 == 0) {
                throw HypothesisError("", lemma::tau_upper,
                                      "no n0 in a table of size " + std::to_string(size) + " gives c1 >= 0.99");
            }
        }
        first.constants = derive_first_lower(ctx, n0);
        first.statements.push_back(statement(Form::FirstLower, first.constants, first.constants.integer("n1")));
    });
    result.stages.push_back(first);

    // First round.
    StageResult round1{stage_name::first_round, ConstantSet(round_label::first), {}};
    in_stage(stage_name::first_round, [&] {
        const mpz_class& floor = first.constants.integer("n1");
        if (!floor.fits_ulong_p() || floor > big(size)) {
            throw RangeError("n1 = " + floor.get_str() + " from the first lower bound exceeds the table");
        }
        const std::uint64_t n1 = pick_n1(params.n1_first, floor.get_ui(), 2, size, lemma::tau_upper);
        if (big(n1) < floor) {
            throw HypothesisError("", lemma::tau_upper,
                                  "n1 = " + std::to_string(n1) + " is below the first lower bound threshold " +
                                      floor.get_str());
        }
        round1.constants = full_round(ctx, first.constants.real("c1"), n1, round_label::first);
        emit_round_statements(round1, true);
    });
    result.stages.push_back(round1);

    // Bootstrapping: l_n > n log n on all of [1, inf).
    StageResult boot{stage_name::bootstrapping, ConstantSet(round_label::first), {}};
    in_stage(stage_name::bootstrapping, [&] {
        ConstantSet& cs = boot.constants;
        const BootstrapThreshold b = bootstrap_threshold(round1.constants.real("c7"), round1.constants.real("c8"));
        cs.set("n4_exponent", b.exponent, lemma::bootstrapping);
        std::optional<mpz_class> tail_from;
        if (b.n4) {
            cs.set("n4", *b.n4, lemma::bootstrapping);
            tail_from = std::max(*b.n4, round1.constants.integer("n3"));
        } else if (b.below_googol) {
            tail_from = std::max(googol(), round1.constants.integer("n3"));
        } else {
            throw HypothesisError("", lemma::bootstrapping,
                                  "n4 = exp(exp(" + b.exponent.to_question_string() + ")) is not below 10^100");
        }

        std::vector<std::pair<mpz_class, std::optional<mpz_class>>> pieces;
        const std::uint64_t direct = params.direct_limit == 0 ? size : std::min(params.direct_limit, size);
        if (direct >= 1) {
            BoundStatement s;
            s.form = Form::ThmLower1;
            s.round = round_label::first;
            const VerificationReport r = verify_range(ctx, s, 1, direct, VerifyOptions{});
            if (r.outcome != Outcome::Pass) {
                throw HypothesisError("", lemma::direct,
                                      "l_n > n log n is not certified on [1, " + std::to_string(direct) + "]: " +
                                          std::string(outcome_name(r.outcome)));
            }
            cs.set("direct_limit", big(direct), lemma::direct);
            pieces.emplace_back(big(1), big(direct));
        }
        for (const std::uint64_t n0 : params.bootstrap_n0) {
            FiniteRange fr = finite_range(ctx, n0);
            const std::string tag = "[" + std::to_string(n0) + "]";
            cs.set("t" + tag, fr.t, lemma::finite_range);
            cs.set("m1" + tag, fr.m1, lemma::finite_range);
            cs.set("m2" + tag, fr.m2, lemma::finite_range);
            if (!fr.empty()) pieces.emplace_back(fr.m1, fr.m2);
            result.finite_ranges.push_back(std::move(fr));
        }
        pieces.emplace_back(*tail_from, std::nullopt);

        std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        mpz_class reach = 0;  // [1, reach] is covered
        for (const auto& [from, to] : pieces) {
            if (from > reach + 1) break;
            if (!to) {
                reach = -1;
                break;
            }
            reach = std::max(reach, *to);
        }
        if (reach != -1) {
            throw HypothesisError("", lemma::bootstrapping,
                                  "coverage of l_n > n log n stops at n = " + reach.get_str());
        }
        result.coverage = pieces;
        boot.statements.push_back(statement(Form::ThmLower1, cs, big(1)));
    });
    result.stages.push_back(boot);

    // Second round, c1 = 1 from l_n > n log n.
    StageResult round2{stage_name::second_round, ConstantSet(round_label::second), {}};
    in_stage(stage_name::second_round, [&] {
        const std::uint64_t n1 = pick_n1(params.n1_second, 10771, 2, size, lemma::tau_upper);
        round2.constants = full_round(ctx, Interval(1), n1, round_label::second);
        emit_round_statements(round2, true);
        round2.statements.push_back(statement(Form::ThmLower2, round2.constants, round2.constants.integer("n3")));
    });
    result.stages.push_back(round2);

    // Third half-round: stops after the upper bound on l_n.
    StageResult round3{stage_name::third_half_round, ConstantSet(round_label::third_half), {}};
    in_stage(stage_name::third_half_round, [&] {
        const std::uint64_t n1 = pick_n1(params.n1_third, 10771, 1, size, lemma::tau_upper);
        ConstantSet cs = derive_tau_upper(ctx, Interval(1), n1, round_label::third_half);
        round3.constants = derive_ell_upper(ctx, cs);
        emit_round_statements(round3, false);
        const mpz_class& n2 = round3.constants.integer("n2");
        round3.statements.push_back(statement(Form::ThmUpper2, round3.constants, n2));
        round3.statements.push_back(statement(Form::ThmUpper1, round3.constants, big(4), big(10000000)));
    });
    result.stages.push_back(round3);

    return result;
}

}  // namespace lucky
