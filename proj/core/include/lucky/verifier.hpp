#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lucky/bounds.hpp"
#include "lucky/lucky_table.hpp"
#include "lucky/stats.hpp"

namespace lucky {

enum class Outcome { Pass, Fail, Indeterminate };

std::string_view outcome_name(Outcome outcome);

// The smallest n at which a statement was certified false.
struct Violation {
    std::uint64_t n = 0;
    // Left-hand side: l_n exactly, or the enclosure of tau_n.
    std::string quantity;
    // Outward-rounded enclosure of the right-hand side.
    std::string bound_lo;
    std::string bound_hi;
    std::string reason;
};

struct VerificationReport {
    std::string statement_id;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    Outcome outcome = Outcome::Pass;
    std::optional<Violation> first_violation;
    std::uint64_t indeterminate_count = 0;
    std::optional<std::uint64_t> first_indeterminate;
    std::uint64_t checked = 0;
    double wall_time = 0.0;
    mpfr_prec_t precision = 0;
    // Free-form detail, e.g. the enclosure computed by a spot check.
    std::string note;
};

struct VerifyOptions {
    unsigned workers = 1;
    // 0: the context's precision.
    mpfr_prec_t precision = 0;
    // Re-evaluate overlapping comparisons once at twice the precision.
    bool retry = true;
    std::uint64_t chunk = std::uint64_t{1} << 16;
    // Called after each finished chunk with (numbers done, numbers total).
    std::function<void(std::uint64_t, std::uint64_t)> progress;
};

// Checks stmt at every n in [lo, hi] against the table. Pass requires a
// certified strict inequality at each n; overlapping enclosures are
// counted as indeterminate, never as passes. Table entries that break the
// structural invariants inside the range are reported as failures.
VerificationReport verify_range(const StatsContext& ctx, const BoundStatement& stmt, std::uint64_t lo,
                                std::uint64_t hi, const VerifyOptions& options = {});
VerificationReport verify_range(const LuckyTable& table, const BoundStatement& stmt, std::uint64_t lo,
                                std::uint64_t hi, const VerifyOptions& options = {});

struct RangeJob {
    BoundStatement statement;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

// Several statements in one pass over the table, sharing log n and
// log log n between them. Reports come back in job order.
std::vector<VerificationReport> verify_jobs(const StatsContext& ctx, const std::vector<RangeJob>& jobs,
                                            const VerifyOptions& options = {});

// The spot computations behind the omega estimates: omega(10^5) > 2,
// 0.99 (log 10^5 - log log 10^5) > 1, and the technical inequality at
// x0 = 11.51, 12 and 14.
std::vector<VerificationReport> verify_fixed_checks(mpfr_prec_t precision = 0);

// Every pipeline statement over [max(valid_from, form minimum),
// min(valid_to, table size)]. Statements whose range misses the table are
// reported with checked = 0.
std::vector<VerificationReport> verify_pipeline_consistency(const StatsContext& ctx, const PipelineResult& result,
                                                            const VerifyOptions& options = {});

struct MutantReport {
    std::string statement_id;
    std::string constant;
    int shift = 0;  // +1 or -1
    VerificationReport report;
    bool detected() const { return report.outcome == Outcome::Fail; }
};

// The direction (+1 or -1) in which changing the constant weakens the
// truth of the statement.
int unsound_direction(Form form, const std::string& constant);

// For every statement and every constant it reads, shifts the constant by
// one unit in the unsound direction and verifies the result over the
// statement's range.
std::vector<MutantReport> verify_mutants(const StatsContext& ctx, const PipelineResult& result,
                                         const VerifyOptions& options = {});

}  // namespace lucky
