#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "lucky/error.hpp"
#include "lucky/interval.hpp"
#include "lucky/stats.hpp"

namespace lucky {

// Names of the lemma routines, used as provenance tags.
namespace lemma {
inline constexpr const char* first_lower = "ell-first-lower-bound";
inline constexpr const char* finite_range = "ell-finite-range";
inline constexpr const char* tau_upper = "tau-upper-bound";
inline constexpr const char* omega_sum = "omega-sum";
inline constexpr const char* ell_upper = "ell-upper-bound";
inline constexpr const char* tau_lower = "tau-lower-bound";
inline constexpr const char* second_lower = "ell-second-lower-bound";
inline constexpr const char* bootstrapping = "bootstrapping";
inline constexpr const char* direct = "direct-computation";
}  // namespace lemma

// Round labels.
namespace round_label {
inline constexpr const char* first = "first";
inline constexpr const char* second = "second";
inline constexpr const char* third_half = "third_half";
}  // namespace round_label

struct ConstantEntry {
    std::string name;
    std::optional<Interval> real;
    std::optional<mpz_class> integer;
    std::string lemma;
};

// Named certified constants (c0..c8, r1..r4, n0..n4, t, m1, m2, ...) in
// insertion order, each tagged with the lemma that produced it.
class ConstantSet {
public:
    explicit ConstantSet(std::string round = round_label::first) : round_(std::move(round)) {}

    const std::string& round() const noexcept { return round_; }

    void set(const std::string& name, Interval value, const std::string& lemma);
    void set(const std::string& name, mpz_class value, const std::string& lemma);
    void merge(const ConstantSet& other);

    bool has(const std::string& name) const;
    // Throw MissingParameterError when absent or of the other kind.
    const Interval& real(const std::string& name) const;
    const mpz_class& integer(const std::string& name) const;
    // The integer as a table index; RangeError if it does not fit.
    std::uint64_t index(const std::string& name) const;

    const std::vector<ConstantEntry>& entries() const noexcept { return entries_; }

private:
    ConstantEntry* find(const std::string& name);
    const ConstantEntry* find(const std::string& name) const;

    std::string round_;
    std::vector<ConstantEntry> entries_;
};

enum class Form {
    FirstLower,   // l_n > c1 n log n
    TauUpper,     // tau_n < ((LL + c2)/L + c3 (LL/L)^2) / c1
    EllUpper,     // l_n < n (L + (LL^2/2 + c2 LL + c4) / c1)
    TauLower,     // tau_n > (LL - c5)/L - c6 LL^3 / L^2
    SecondLower,  // l_n > n (L + LL^2/2 - c7 LL - c8)
    ThmLower1,    // l_n > n log n
    ThmLower2,    // l_n > n (L + LL^2/2 - c7 LL - c8), c7 = 1
    ThmUpper1,    // l_n < n (L + LL^2/2 + 1)
    ThmUpper2,    // l_n < n (L + LL^2/2 + c2 LL + c4)
};
// L = log n, LL = log log n.

std::string_view form_name(Form form);
std::optional<Form> parse_form(std::string_view name);
// Whether the statement bounds tau_n (otherwise l_n).
bool bounds_tau(Form form);
// Whether the statement is an upper bound on its quantity.
bool is_upper(Form form);
// Smallest n at which the right-hand side is defined (3 when log log n
// appears, 1 otherwise).
std::uint64_t form_minimum(Form form);
// The constants a form reads, e.g. {"c1", "c2", "c3"} for TauUpper.
std::vector<std::string> form_constants(Form form);

struct BoundStatement {
    Form form = Form::ThmLower1;
    std::string round = round_label::first;
    std::map<std::string, Interval> constants;
    mpz_class valid_from = 1;
    std::optional<mpz_class> valid_to;

    std::string id() const;  // e.g. "EllUpper/second"
};

// Evaluates the right-hand side of a statement; the constants are looked
// up once at construction.
class BoundEvaluator {
public:
    explicit BoundEvaluator(const BoundStatement& stmt);

    // Right-hand side at n given enclosures of log n and log log n (the
    // latter ignored by forms that do not use it).
    Interval operator()(std::uint64_t n, const Interval& log_n, const Interval& llog_n) const;

    // The right-hand side is n * shape(L, LL) when scaled(), shape(L, LL)
    // otherwise. Enclosures of L and LL valid for a whole block of n give a
    // shape valid for every n in the block.
    bool scaled() const noexcept;
    Interval shape(const Interval& log_n, const Interval& llog_n) const;

private:
    Form form_;
    Interval c1_, c2_, c3_, c4_, c5_, c6_, c7_, c8_;
};

// c3 as a function of its threshold n:
// (-log(1 - v) - v)/v^2 + (log n)^2 / (n (log log n)^2), v = log log n / log n.
Interval c3_of(const mpz_class& n);

// Enclosure of log n for a (possibly huge) positive integer.
Interval log_of(const mpz_class& n);

// Stage outputs ------------------------------------------------------------

ConstantSet derive_first_lower(const StatsContext& ctx, std::uint64_t n0);

struct FiniteRange {
    std::uint64_t n0 = 0;
    Interval c0;
    Interval t;
    mpz_class m1;
    mpz_class m2;
    bool empty() const { return m1 > m2; }
};

// (m1, m2) for the given n0 and t (t <= 1).
FiniteRange finite_range(const StatsContext& ctx, std::uint64_t n0, const Interval& t);
// The t maximising m2: (W(e^(1 - c0)) + c0 - 1) / c0.
Interval optimal_t(const Interval& c0);
FiniteRange finite_range(const StatsContext& ctx, std::uint64_t n0);

ConstantSet derive_tau_upper(const StatsContext& ctx, const Interval& c1, std::uint64_t n1,
                             const std::string& round = round_label::first);
ConstantSet derive_ell_upper(const StatsContext& ctx, const ConstantSet& prior);
ConstantSet derive_tau_lower(const StatsContext& ctx, const ConstantSet& prior);
ConstantSet derive_second_lower(const StatsContext& ctx, const ConstantSet& prior);

struct BootstrapThreshold {
    // n4 = ceil(exp(exp(exponent))), exponent = c7 + sqrt(c7^2 + 2 c8).
    Interval exponent;
    // Present when n4 is small enough to write out.
    std::optional<mpz_class> n4;
    // Certified n4 < 10^100, decided through logarithms.
    bool below_googol = false;
};

BootstrapThreshold bootstrap_threshold(const Interval& c7, const Interval& c8);

// Pipeline ------------------------------------------------------------------

struct PipelineParams {
    std::uint64_t n0_first = 0;
    std::uint64_t n1_first = 0;
    std::uint64_t n1_second = 10771;
    std::uint64_t n1_third = 0;
    std::vector<std::uint64_t> bootstrap_n0 = {66, 124000};
    // Largest n checked directly for l_n > n log n while bootstrapping;
    // 0 means the whole table.
    std::uint64_t direct_limit = 0;
};

struct StageResult {
    std::string stage;
    ConstantSet constants;
    std::vector<BoundStatement> statements;
};

struct PipelineResult {
    std::vector<StageResult> stages;
    std::vector<FiniteRange> finite_ranges;
    // Pieces of [1, inf) on which l_n > n log n was established, as
    // (from, to) with to absent for unbounded.
    std::vector<std::pair<mpz_class, std::optional<mpz_class>>> coverage;

    std::vector<BoundStatement> statements() const;
    const StageResult& stage(std::string_view name) const;
};

namespace stage_name {
inline constexpr const char* first_lower = "first-lower";
inline constexpr const char* first_round = "first-round";
inline constexpr const char* bootstrapping = "bootstrapping";
inline constexpr const char* second_round = "second-round";
inline constexpr const char* third_half_round = "third-half-round";
}  // namespace stage_name

// Runs the five stages in order. Any failure inside a stage (violated
// hypothesis, index beyond the table, coverage gap) is rethrown as
// StageAbort naming the stage.
PipelineResult run_pipeline(const StatsContext& ctx, const PipelineParams& params);

class StageAbort : public Error {
public:
    StageAbort(std::string stage, std::string lemma, std::string detail)
        : Error("stage " + stage + " aborted (" + lemma + "): " + detail),
          stage_(std::move(stage)), lemma_(std::move(lemma)), detail_(std::move(detail)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& lemma() const noexcept { return lemma_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string stage_;
    std::string lemma_;
    std::string detail_;
};

}  // namespace lucky
