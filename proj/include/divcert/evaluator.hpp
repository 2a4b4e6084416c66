#ifndef DIVCERT_EVALUATOR_HPP
#define DIVCERT_EVALUATOR_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "divcert/oscint.hpp"

namespace divcert {

// One summand of a partial sum: either evaluated, or replaced by its
// enclosure (value 0, bound moved into the error).
struct TermEntry {
    std::size_t j = 0;
    std::variant<OscillatoryTerm, Enclosure> result;
    bool bounded_only() const { return std::holds_alternative<Enclosure>(result); }
    cplx value() const
    {
        return bounded_only() ? cplx(0.0, 0.0) : std::get<OscillatoryTerm>(result).value;
    }
    double abs_error() const
    {
        return bounded_only() ? std::get<Enclosure>(result).bound()
                              : std::get<OscillatoryTerm>(result).abs_error;
    }
};

struct PartialSum {
    std::size_t m = 0;
    Target target;
    cplx value{0.0, 0.0};
    double abs_error = 0.0;
    std::vector<TermEntry> per_term;

    bool fully_evaluated() const
    {
        return std::none_of(per_term.begin(), per_term.end(),
                            [](const TermEntry& e) { return e.bounded_only(); });
    }
};

namespace detail {

// Re-raise the active exception with the term index in the message.
[[noreturn]] inline void rethrow_with_term(std::size_t j)
{
    const std::string p = "term " + std::to_string(j) + ": ";
    try {
        throw;
    } catch (const BudgetError& e) {
        throw BudgetError(p + e.what(), e.achieved_error);
    } catch (const DomainError& e) {
        throw DomainError(p + e.what());
    } catch (const InputError& e) {
        throw InputError(p + e.what());
    } catch (const RegimeError& e) {
        throw RegimeError(p + e.what());
    } catch (const StationaryPhaseError& e) {
        throw StationaryPhaseError(p + e.what());
    } catch (const Error& e) {
        throw InternalError(p + e.what());
    }
}

// Run f(i) for i in [0, count) on up to `jobs` threads. The first failure
// by index is rethrown so the result does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& f)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

// S_m f at target, summed over j = 1..m in ascending order. tol applies to
// each term. Log-only terms and terms outside the evaluator's regime
// contribute their enclosure.
inline PartialSum partial_sum(const DispersionSymbol& sym, const Schedule& s, std::size_t m,
                              const Target& target, double tol,
                              const std::vector<AnnulusStats>* stats = nullptr)
{
    if (m > s.size())
        throw DomainError("partial_sum: m = " + std::to_string(m) + " exceeds schedule length "
                          + std::to_string(s.size()));
    if (!(target.t > 0.0))
        throw DomainError("partial_sum: target t must be positive");
    if (!(tol > 0.0))
        throw InputError("partial_sum: tol must be positive");
    PartialSum out;
    out.m = m;
    out.target = target;
    for (std::size_t j = 1; j <= m; ++j) {
        TermEntry e;
        e.j = j;
        try {
            try {
                if (s.log_only(j))
                    throw RegimeError("log-only");
                e.result = compute_term(sym, s, j, target, tol);
            } catch (const RegimeError&) {
                e.result = term_enclosure_at(sym, s, j, target, stats ? &(*stats)[j - 1] : nullptr);
            } catch (const StationaryPhaseError&) {
                e.result = term_enclosure_at(sym, s, j, target, stats ? &(*stats)[j - 1] : nullptr);
            }
        } catch (const Error&) {
            detail::rethrow_with_term(j);
        }
        out.value += e.value();
        out.abs_error += e.abs_error();
        out.per_term.push_back(std::move(e));
    }
    return out;
}

struct BlowupCertificate {
    std::size_t k = 0;
    double t_k = 0.0;
    LogReal log_Rp_k = 0.0L;
    double diagonal = 0.0;
    double below_sum_bound = 0.0;
    double tail_bound = 0.0;
    LogReal log_tail_bound = log_neg_inf;
    double lower_bound = 0.0; // L_k
    double growth_ratio = 0.0;
    std::vector<Enclosure> tail_terms; // j = k+1 .. J
};

// (2 pi)^{-n} |S^{n-1}| 4 (1 - 2 N^{-1/4})
inline double analytic_growth_target(int n, double N)
{
    return polar_constant(n) * 4.0 * (1.0 - 2.0 * std::pow(N, -0.25));
}

inline BlowupCertificate blowup_certificate(const DispersionSymbol& sym, const Schedule& s,
                                            std::size_t k,
                                            const std::vector<AnnulusStats>* stats = nullptr)
{
    s.check_term(k);
    BlowupCertificate c;
    c.k = k;
    c.t_k = s.time(k);
    c.log_Rp_k = s.log_Rp[k - 1];
    c.diagonal = diagonal_term_exact(s, k);
    if (k >= 2)
        c.below_sum_bound = static_cast<double>(static_cast<LogReal>(polar_constant(s.n)) * 4.0L
                                                * std::pow(s.log_Rp[k - 2], 0.25L));
    std::vector<LogReal> logs;
    for (std::size_t j = k + 1; j <= s.size(); ++j) {
        try {
            c.tail_terms.push_back(term_enclosure(sym, s, j, k, stats ? &(*stats)[j - 1] : nullptr));
        } catch (const Error&) {
            detail::rethrow_with_term(j);
        }
        logs.push_back(c.tail_terms.back().log_bound);
    }
    c.log_tail_bound = log_sum(logs);
    c.tail_bound = exp_upper(c.log_tail_bound);
    c.lower_bound = c.diagonal - c.below_sum_bound - c.tail_bound;
    c.growth_ratio = static_cast<double>(c.lower_bound / std::pow(c.log_Rp_k, 0.25L));
    return c;
}

struct BlowupRow {
    std::size_t k = 0;
    double t_k = 0.0;
    LogReal log_Rp_k = 0.0L;
    double L_k = 0.0;
    double growth_ratio = 0.0;
    std::optional<double> abs_S;   // |S_J f(x_k, t_k)| when every term is evaluated
    std::optional<double> abs_err;

    bool operator==(const BlowupRow&) const = default;
};

struct BlowupTable {
    std::vector<BlowupRow> rows;
    std::vector<BlowupCertificate> certificates;
};

struct TableOptions {
    unsigned jobs = 1;
    double tol = 1e-8;
    bool with_sums = true;
};

inline BlowupTable blowup_table(const DispersionSymbol& sym, const Schedule& s,
                                std::vector<std::size_t> ks, const TableOptions& opt = {})
{
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (auto k : ks)
        s.check_term(k);
    const auto stats = annulus_table(sym, s);
    bool computable = opt.with_sums;
    for (std::size_t j = 1; computable && j <= s.size(); ++j)
        computable = !s.log_only(j);

    BlowupTable out;
    out.rows.resize(ks.size());
    out.certificates.resize(ks.size());
    detail::parallel_for(ks.size(), opt.jobs, [&](std::size_t i) {
        const std::size_t k = ks[i];
        auto c = blowup_certificate(sym, s, k, &stats);
        BlowupRow r;
        r.k = k;
        r.t_k = c.t_k;
        r.log_Rp_k = c.log_Rp_k;
        r.L_k = c.lower_bound;
        r.growth_ratio = c.growth_ratio;
        if (computable) {
            const auto ps = partial_sum(sym, s, s.size(), target_of(s, k), opt.tol, &stats);
            if (ps.fully_evaluated()) {
                r.abs_S = std::abs(ps.value);
                r.abs_err = ps.abs_error;
            }
        }
        out.rows[i] = r;
        out.certificates[i] = std::move(c);
    });
    return out;
}

inline std::vector<std::size_t> all_terms(const Schedule& s)
{
    std::vector<std::size_t> ks(s.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
        ks[i] = i + 1;
    return ks;
}

// sup over {t >= t_min, |x| <= x_max} of |S_J f - S_m f|, bounded by the
// sum of uniform enclosures of the remaining terms. Natural log; -inf for m = J.
inline LogReal log_continuity_tail_bound(const DispersionSymbol& sym, const Schedule& s,
                                         std::size_t m, double t_min, double x_max,
                                         const std::vector<AnnulusStats>* stats = nullptr)
{
    if (!(t_min > 0.0))
        throw DomainError("continuity_tail_bound: t_min must be positive");
    if (!(x_max >= 0.0))
        throw DomainError("continuity_tail_bound: x_max must be nonnegative");
    if (m > s.size())
        throw DomainError("continuity_tail_bound: m exceeds schedule length");
    std::vector<LogReal> logs;
    for (std::size_t j = m + 1; j <= s.size(); ++j)
        logs.push_back(
            term_enclosure_over_set(sym, s, j, t_min, x_max, stats ? &(*stats)[j - 1] : nullptr).log_bound);
    return log_sum(logs);
}

inline double continuity_tail_bound(const DispersionSymbol& sym, const Schedule& s, std::size_t m,
                                    double t_min, double x_max,
                                    const std::vector<AnnulusStats>* stats = nullptr)
{
    return exp_upper(log_continuity_tail_bound(sym, s, m, t_min, x_max, stats));
}

// CSV ------------------------------------------------------------------

inline constexpr const char* blowup_csv_header = "k,t_k,log_Rp_k,L_k,growth_ratio,abs_S,abs_err";

template <class T>
std::string shortest(T v)
{
    char buf[128];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    if (r.ec != std::errc())
        throw InternalError("shortest: formatting failed");
    return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& s, const char* what)
{
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw InputError(std::string("csv: bad ") + what + " '" + s + "'");
    return v;
}

inline void write_blowup_csv(std::ostream& os, const std::vector<BlowupRow>& rows)
{
    os << blowup_csv_header << '\n';
    for (const auto& r : rows) {
        os << r.k << ',' << shortest(r.t_k) << ',' << shortest(r.log_Rp_k) << ',' << shortest(r.L_k)
           << ',' << shortest(r.growth_ratio) << ',' << (r.abs_S ? shortest(*r.abs_S) : "") << ','
           << (r.abs_err ? shortest(*r.abs_err) : "") << '\n';
    }
}

inline std::vector<BlowupRow> read_blowup_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != blowup_csv_header)
        throw InputError("csv: header mismatch, expected " + std::string(blowup_csv_header));
    std::vector<BlowupRow> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (line.back() == ',')
            f.emplace_back();
        if (f.size() != 7)
            throw InputError("csv: expected 7 fields in '" + line + "'");
        BlowupRow r;
        r.k = parse_number<std::size_t>(f[0], "k");
        r.t_k = parse_number<double>(f[1], "t_k");
        r.log_Rp_k = parse_number<LogReal>(f[2], "log_Rp_k");
        r.L_k = parse_number<double>(f[3], "L_k");
        r.growth_ratio = parse_number<double>(f[4], "growth_ratio");
        if (!f[5].empty())
            r.abs_S = parse_number<double>(f[5], "abs_S");
        if (!f[6].empty())
            r.abs_err = parse_number<double>(f[6], "abs_err");
        rows.push_back(r);
    }
    return rows;
}

} // namespace divcert

#endif
