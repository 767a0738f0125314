#include "lucky/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <thread>

#include "lucky/error.hpp"
#include "lucky/special.hpp"

namespace lucky {

std::string_view outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::Pass: return "pass";
        case Outcome::Fail: return "fail";
        case Outcome::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

namespace {

enum class Verdict { Pass, Fail, Unknown };

Verdict judge(bool upper, const Interval& quantity, const Interval& bound) {
    if (upper) {
        if (quantity.certainly_lt(bound)) return Verdict::Pass;
        if (quantity.certainly_ge(bound)) return Verdict::Fail;
    } else {
        if (quantity.certainly_gt(bound)) return Verdict::Pass;
        if (quantity.certainly_le(bound)) return Verdict::Fail;
    }
    return Verdict::Unknown;
}

struct PreparedJob {
    BoundEvaluator eval;
    bool tau;
    bool upper;
    std::uint64_t lo;
    std::uint64_t hi;
};

struct JobTally {
    std::optional<Violation> violation;
    std::uint64_t indeterminate = 0;
    std::optional<std::uint64_t> first_indeterminate;
    std::uint64_t checked = 0;
};

// Logs of n at one precision; log log n only from n = 3 on.
struct Logs {
    Interval log_n;
    Interval llog_n;
};

Logs logs_at(std::uint64_t n) {
    Logs l{log_of(n), Interval(0)};
    if (n >= 3) l.llog_n = log(l.log_n);
    return l;
}

// Block lengths grow with n so that the block-wide log enclosures stay
// narrow relative to the margins; below 2^14 every n is its own block.
std::uint64_t block_length(std::uint64_t first) {
    return std::clamp<std::uint64_t>(first >> 14, 1, 1024);
}

// Pass certified from the block-wide shape alone.
bool quick_pass(const PreparedJob& job, const Interval& shape, std::uint64_t n, std::uint64_t ell,
                const Interval& tau, mpfr_ptr scratch) {
    if (job.tau) return job.upper ? tau.certainly_lt(shape) : tau.certainly_gt(shape);
    if (job.upper) {
        mpfr_mul_ui(scratch, shape.lo(), n, MPFR_RNDD);
        return mpfr_cmp_ui(scratch, ell) > 0;
    }
    mpfr_mul_ui(scratch, shape.hi(), n, MPFR_RNDU);
    return mpfr_cmp_ui(scratch, ell) < 0;
}

Violation make_violation(std::uint64_t n, const Interval& quantity, bool tau, std::uint64_t ell,
                         const Interval& bound, bool upper) {
    Violation v;
    v.n = n;
    v.quantity = tau ? quantity.to_question_string() : std::to_string(ell);
    v.bound_lo = bound.lo_string(25);
    v.bound_hi = bound.hi_string(25);
    const std::string q = tau ? "tau_n" : "l_n";
    v.reason = upper ? q + " >= bound" : q + " <= bound";
    return v;
}

class Sweep {
public:
    Sweep(const StatsContext& ctx, const std::vector<RangeJob>& jobs, const VerifyOptions& options)
        : ctx_(ctx), options_(options), prec_(options.precision > 0 ? options.precision : ctx.precision()) {
        const std::uint64_t size = ctx.table().size();
        for (const auto& job : jobs) {
            const BoundStatement& s = job.statement;
            if (job.lo < 1 || job.lo > job.hi) {
                throw RangeError(s.id() + ": invalid range [" + std::to_string(job.lo) + ", " +
                                 std::to_string(job.hi) + "]");
            }
            if (job.hi > size) {
                throw RangeError(s.id() + ": range end " + std::to_string(job.hi) + " beyond table of size " +
                                 std::to_string(size));
            }
            if (job.lo < form_minimum(s.form)) {
                throw DomainError(s.id() + ": form needs n >= " + std::to_string(form_minimum(s.form)));
            }
            const PrecisionScope scope(prec_);
            prepared_.push_back({BoundEvaluator(s), bounds_tau(s.form), is_upper(s.form), job.lo, job.hi});
            need_tau_ = need_tau_ || bounds_tau(s.form);
            lo_ = std::min(lo_, job.lo);
            hi_ = std::max(hi_, job.hi);
        }
        violated_chunk_ = std::make_unique<std::atomic<std::uint64_t>[]>(prepared_.size());
        for (std::size_t j = 0; j < prepared_.size(); ++j) violated_chunk_[j] = UINT64_MAX;
    }

    std::vector<VerificationReport> run(const std::vector<RangeJob>& jobs) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<VerificationReport> reports(jobs.size());
        if (prepared_.empty()) return reports;

        const std::uint64_t chunk = std::max<std::uint64_t>(options_.chunk, 1);
        const std::uint64_t total = hi_ - lo_ + 1;
        const std::uint64_t chunks = (total + chunk - 1) / chunk;
        std::vector<std::vector<JobTally>> tallies(chunks);
        std::atomic<std::uint64_t> next{0};
        std::atomic<std::uint64_t> done{0};
        std::mutex progress_mutex;
        std::exception_ptr error;
        std::mutex error_mutex;

        auto worker = [&] {
            try {
                const PrecisionScope scope(prec_);
                for (;;) {
                    const std::uint64_t c = next.fetch_add(1);
                    if (c >= chunks) break;
                    const std::uint64_t a = lo_ + c * chunk;
                    const std::uint64_t b = std::min(hi_, a + chunk - 1);
                    tallies[c] = scan(a, b, c);
                    const std::uint64_t d = done.fetch_add(b - a + 1) + (b - a + 1);
                    if (options_.progress) {
                        const std::lock_guard lock(progress_mutex);
                        options_.progress(d, total);
                    }
                }
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        };
        const unsigned workers = std::max(1u, options_.workers);
        if (workers == 1 || chunks == 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (unsigned i = 0; i < std::min<std::uint64_t>(workers, chunks); ++i) threads.emplace_back(worker);
            for (auto& t : threads) t.join();
        }
        if (error) std::rethrow_exception(error);

        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            VerificationReport& r = reports[j];
            r.statement_id = jobs[j].statement.id();
            r.lo = jobs[j].lo;
            r.hi = jobs[j].hi;
            r.precision = prec_;
            r.wall_time = seconds;
            // Chunks past the first refuted one may or may not have been
            // scanned; leaving them out keeps the report deterministic.
            for (const auto& per_chunk : tallies) {
                const JobTally& t = per_chunk[j];
                r.checked += t.checked;
                r.indeterminate_count += t.indeterminate;
                if (t.first_indeterminate && !r.first_indeterminate) r.first_indeterminate = t.first_indeterminate;
                if (t.violation) {
                    r.first_violation = t.violation;
                    break;
                }
            }
            if (r.first_violation) {
                r.outcome = Outcome::Fail;
            } else if (r.indeterminate_count > 0) {
                r.outcome = Outcome::Indeterminate;
            } else {
                r.outcome = Outcome::Pass;
            }
        }
        return reports;
    }

private:
    const StatsContext& retry_context() {
        std::call_once(retry_once_, [this] {
            retry_ctx_ = std::make_unique<StatsContext>(ctx_.table(), 2 * prec_);
        });
        return *retry_ctx_;
    }

    // Exact comparison at a single n, with one retry at twice the precision.
    Verdict exact(const PreparedJob& job, std::uint64_t n, std::uint64_t ell, const Logs& logs,
                  const Interval& tau, Interval& quantity, Interval& bound) {
        bound = job.eval(n, logs.log_n, logs.llog_n);
        quantity = job.tau ? tau : Interval(ell);
        Verdict verdict = judge(job.upper, quantity, bound);
        if (verdict != Verdict::Unknown || !options_.retry) return verdict;
        const StatsContext& hctx = retry_context();
        const PrecisionScope scope(2 * prec_);
        const Logs hlogs = logs_at(n);
        bound = job.eval(n, hlogs.log_n, hlogs.llog_n);
        quantity = job.tau ? Interval(1) - Interval(ell) / (Interval(n) * hctx.rho(n)) : Interval(ell);
        return judge(job.upper, quantity, bound);
    }

    std::vector<JobTally> scan(std::uint64_t a, std::uint64_t b, std::uint64_t chunk) {
        const LuckyTable& table = ctx_.table();
        const std::size_t jobs = prepared_.size();
        std::vector<JobTally> out(jobs);
        // Jobs already refuted in an earlier chunk need no further work.
        std::vector<bool> done(jobs);
        for (std::size_t j = 0; j < jobs; ++j) done[j] = violated_chunk_[j].load() < chunk;
        std::optional<RhoStream> stream;
        if (need_tau_) stream.emplace(ctx_, std::max<std::uint64_t>(a, 2));

        std::vector<std::optional<Interval>> shapes(jobs);
        detail::Float scratch(prec_);
        Interval quantity, bound, tau;
        for (std::uint64_t first = a; first <= b;) {
            const std::uint64_t last = std::min(b, first + block_length(first) - 1);
            // log n and log log n over the whole block; both are increasing.
            const Logs head = logs_at(first);
            Logs span = head;
            if (last > first) {
                const Logs tail = logs_at(last);
                span.log_n = Interval::hull(head.log_n, tail.log_n);
                span.llog_n = Interval::hull(head.llog_n, tail.llog_n);
            }
            for (std::size_t j = 0; j < jobs; ++j) {
                const PreparedJob& job = prepared_[j];
                shapes[j].reset();
                if (done[j] || last < job.lo || first > job.hi || out[j].violation) continue;
                shapes[j] = job.eval.shape(span.log_n, span.llog_n);
            }

            for (std::uint64_t n = first; n <= last; ++n) {
                const std::uint64_t ell = table[n];
                const bool broken = table.first_invariant_violation(n, n).has_value();
                std::optional<Logs> logs;
                bool tau_ready = false;
                for (std::size_t j = 0; j < jobs; ++j) {
                    const PreparedJob& job = prepared_[j];
                    if (done[j] || n < job.lo || n > job.hi) continue;
                    JobTally& t = out[j];
                    if (t.violation) continue;  // scanning stops at the first violation
                    ++t.checked;
                    if (broken) {
                        Violation v;
                        v.n = n;
                        v.quantity = std::to_string(ell);
                        v.reason = "table entry breaks the lucky-table invariants";
                        t.violation = v;
                        continue;
                    }
                    if (job.tau && !tau_ready) {
                        tau = Interval(1) - Interval(ell) / (Interval(n) * stream->rho());
                        tau_ready = true;
                    }
                    if (quick_pass(job, *shapes[j], n, ell, tau, scratch.get())) continue;
                    if (!logs) logs = logs_at(n);
                    const Verdict verdict = exact(job, n, ell, *logs, tau, quantity, bound);
                    if (verdict == Verdict::Fail) {
                        t.violation = make_violation(n, quantity, job.tau, ell, bound, job.upper);
                    } else if (verdict == Verdict::Unknown) {
                        ++t.indeterminate;
                        if (!t.first_indeterminate) t.first_indeterminate = n;
                    }
                }
                if (stream && n >= stream->index() && n < b) stream->advance();
            }
            first = last + 1;
        }
        for (std::size_t j = 0; j < jobs; ++j) {
            if (!out[j].violation) continue;
            std::uint64_t seen = violated_chunk_[j].load();
            while (chunk < seen && !violated_chunk_[j].compare_exchange_weak(seen, chunk)) {
            }
        }
        return out;
    }

    const StatsContext& ctx_;
    VerifyOptions options_;
    mpfr_prec_t prec_;
    std::vector<PreparedJob> prepared_;
    bool need_tau_ = false;
    std::uint64_t lo_ = UINT64_MAX;
    std::uint64_t hi_ = 0;
    std::unique_ptr<std::atomic<std::uint64_t>[]> violated_chunk_;
    std::once_flag retry_once_;
    std::unique_ptr<StatsContext> retry_ctx_;
};

}  // namespace

std::vector<VerificationReport> verify_jobs(const StatsContext& ctx, const std::vector<RangeJob>& jobs,
                                            const VerifyOptions& options) {
    Sweep sweep(ctx, jobs, options);
    return sweep.run(jobs);
}

VerificationReport verify_range(const StatsContext& ctx, const BoundStatement& stmt, std::uint64_t lo,
                                std::uint64_t hi, const VerifyOptions& options) {
    return verify_jobs(ctx, {RangeJob{stmt, lo, hi}}, options).front();
}

VerificationReport verify_range(const LuckyTable& table, const BoundStatement& stmt, std::uint64_t lo,
                                std::uint64_t hi, const VerifyOptions& options) {
    const StatsContext ctx(table, options.precision);
    return verify_range(ctx, stmt, lo, hi, options);
}

namespace {

VerificationReport spot(const std::string& id, bool ok, const std::string& note, mpfr_prec_t prec) {
    VerificationReport r;
    r.statement_id = id;
    r.lo = r.hi = 0;
    r.checked = 1;
    r.outcome = ok ? Outcome::Pass : Outcome::Fail;
    r.precision = prec;
    r.note = note;
    return r;
}

// Both sides of the technical inequality at x = x0 for the pair (x0, x1);
// x1 absent stands for +inf.
std::pair<Interval, Interval> technical_sides(const Interval& x0, const std::optional<Interval>& x1) {
    const Interval one(1);
    const Interval point99 = Interval::decimal("0.99");
    Interval a = Interval::rational(1, 2);
    if (x1) {
        const Interval y0 = log(point99 * (x0 - log(x0))) / *x1;
        a = (-log(one - y0) - y0) / (y0 * y0);
    }
    const Interval lx = log(x0);
    const Interval shrink = log(one - lx / x0);
    const Interval base = one - (log(one / point99) - shrink) / lx;
    const Interval lhs = a * base * base * lx;
    const Interval rhs = -shrink / (lx / x0) + x0 * x0 / (exp(x0) * lx);
    return {lhs, rhs};
}

}  // namespace

std::vector<VerificationReport> verify_fixed_checks(mpfr_prec_t precision) {
    const mpfr_prec_t prec = precision > 0 ? precision : working_precision();
    const PrecisionScope scope(prec);
    std::vector<VerificationReport> out;
    const Interval x5(100000);

    const Interval w = omega(x5);
    const bool omega_ok = w.certainly_gt(Interval(2)) &&
                          Interval::decimal("10770.5", "10770.6").contains(w);
    out.push_back(spot("omega(1e5) > 2", omega_ok, w.to_question_string(), prec));

    const Interval lx5 = log(x5);
    const Interval s = Interval::decimal("0.99") * (lx5 - log(lx5));
    const bool s_ok = s.certainly_gt(Interval(1)) && Interval::decimal("8.9", "9.0").contains(s);
    out.push_back(spot("0.99(log 1e5 - loglog 1e5) > 1", s_ok, s.to_question_string(), prec));

    struct Pair {
        const char* id;
        const char* x0;
        const char* x1;
    };
    const Pair pairs[] = {{"technical inequality x0 = 11.51", "11.51", "12"},
                          {"technical inequality x0 = 12", "12", "14"},
                          {"technical inequality x0 = 14", "14", nullptr}};
    for (const auto& p : pairs) {
        std::optional<Interval> x1;
        if (p.x1 != nullptr) x1 = Interval::decimal(p.x1);
        const auto [lhs, rhs] = technical_sides(Interval::decimal(p.x0), x1);
        out.push_back(spot(p.id, lhs.certainly_gt(rhs),
                           "lhs " + lhs.to_question_string() + " rhs " + rhs.to_question_string(), prec));
    }
    return out;
}

namespace {

std::optional<RangeJob> statement_job(const BoundStatement& s, std::uint64_t size) {
    mpz_class lo = std::max<mpz_class>(s.valid_from, mpz_class(static_cast<unsigned long>(form_minimum(s.form))));
    mpz_class hi = mpz_class(static_cast<unsigned long>(size));
    if (s.valid_to && *s.valid_to < hi) hi = *s.valid_to;
    if (lo > hi) return std::nullopt;
    return RangeJob{s, lo.get_ui(), hi.get_ui()};
}

VerificationReport empty_report(const BoundStatement& s, mpfr_prec_t prec) {
    VerificationReport r;
    r.statement_id = s.id();
    r.lo = s.valid_from.fits_ulong_p() ? s.valid_from.get_ui() : UINT64_MAX;
    r.hi = r.lo;
    r.checked = 0;
    r.outcome = Outcome::Pass;
    r.precision = prec;
    r.note = "valid range starts beyond the table";
    return r;
}

}  // namespace

std::vector<VerificationReport> verify_pipeline_consistency(const StatsContext& ctx, const PipelineResult& result,
                                                            const VerifyOptions& options) {
    const auto statements = result.statements();
    std::vector<RangeJob> jobs;
    std::vector<std::optional<std::size_t>> slot;
    for (const auto& s : statements) {
        auto job = statement_job(s, ctx.table().size());
        if (job) {
            slot.push_back(jobs.size());
            jobs.push_back(*job);
        } else {
            slot.push_back(std::nullopt);
        }
    }
    const auto reports = verify_jobs(ctx, jobs, options);
    const mpfr_prec_t prec = options.precision > 0 ? options.precision : ctx.precision();
    std::vector<VerificationReport> out;
    for (std::size_t i = 0; i < statements.size(); ++i) {
        out.push_back(slot[i] ? reports[*slot[i]] : empty_report(statements[i], prec));
    }
    return out;
}

int unsound_direction(Form form, const std::string& constant) {
    // Raising c1 shrinks every bound it divides or multiplies the wrong
    // way; every other constant enters with a sign that makes lowering it
    // the unsafe move.
    (void)form;
    return constant == "c1" ? +1 : -1;
}

std::vector<MutantReport> verify_mutants(const StatsContext& ctx, const PipelineResult& result,
                                         const VerifyOptions& options) {
    std::vector<RangeJob> jobs;
    std::vector<MutantReport> out;
    for (const auto& s : result.statements()) {
        const auto base = statement_job(s, ctx.table().size());
        if (!base) continue;
        for (const auto& name : form_constants(s.form)) {
            const int shift = unsound_direction(s.form, name);
            RangeJob job = *base;
            Interval& c = job.statement.constants.at(name);
            c = c + Interval(shift);
            jobs.push_back(job);
            MutantReport m;
            m.statement_id = s.id();
            m.constant = name;
            m.shift = shift;
            out.push_back(m);
        }
    }
    const auto reports = verify_jobs(ctx, jobs, options);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].report = reports[i];
    return out;
}

}  // namespace lucky
