#ifndef DIVCERT_SCHEDULE_HPP
#define DIVCERT_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "divcert/conditions.hpp"
#include "divcert/errors.hpp"
#include "divcert/logmath.hpp"
#include "divcert/symbol.hpp"

namespace divcert {

// Width profile of the approach region |y - x| < gamma(t).
struct ApproachProfile {
    enum class Kind { identity, power, scaled };
    Kind kind = Kind::identity;
    double param = 1.0; // sigma for power, c for scaled

    static ApproachProfile identity() { return {}; }
    static ApproachProfile power(double sigma) { return {Kind::power, sigma}; }
    static ApproachProfile scaled(double c) { return {Kind::scaled, c}; }

    double operator()(double t) const
    {
        switch (kind) {
        case Kind::identity: return t;
        case Kind::power: return std::pow(t, param);
        case Kind::scaled: return param * t;
        }
        return t;
    }

    std::string name() const
    {
        switch (kind) {
        case Kind::identity: return "identity";
        case Kind::power: return "power";
        case Kind::scaled: return "scaled";
        }
        return "?";
    }

    // Strictly increasing near 0 with gamma(0+) = 0, checked on t = 1e-1 .. 1e-8.
    void validate() const
    {
        if ((kind == Kind::power || kind == Kind::scaled) && !(param > 0.0))
            throw InputError("approach profile: parameter must be positive");
        double prev = (*this)(1e-1);
        for (int e = 2; e <= 8; ++e) {
            const double v = (*this)(std::pow(10.0, -e));
            if (!(v < prev) || !(v > 0.0))
                throw InputError("approach profile " + name() + " is not strictly increasing near 0");
            prev = v;
        }
        if (!(prev < 1e-3))
            throw InputError("approach profile " + name() + " does not vanish at 0+");
    }
};

enum class Variant { theorem1, theorem2_strong, theorem2_weak };

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::theorem1: return "theorem1";
    case Variant::theorem2_strong: return "theorem2-strong";
    case Variant::theorem2_weak: return "theorem2-weak";
    }
    return "?";
}

struct TimesPolicy {
    // End margin as a fraction of the block's time interval: 1/(4 M + 4).
    double margin_factor = 4.0;
};

// The counterexample scaffold. Lattice data (delta, points, times, block
// bounds) is indexed 0-based; term accessors take the 1-based term index j
// used in the formulas, where term j carries annulus (R_j, R'_j) and the
// lattice point/time terms[j-1].
struct Schedule {
    int n = 1;
    int K = 0;
    ApproachProfile gamma;
    std::vector<double> delta;                // delta_k, k = 1..K
    std::vector<std::vector<double>> points;  // all blocks, lexicographic per block
    std::vector<double> times;                // strictly decreasing
    std::vector<std::size_t> block_bounds;    // m_1 .. m_K
    std::string times_policy = "uniform-margin-1/(4M+4)";

    // Annulus data; empty for a spatial-only (partial) schedule.
    Variant variant = Variant::theorem1;
    double N = 0.0;
    double validity_radius = 0.0;
    std::vector<std::size_t> terms;           // lattice index per term
    std::vector<LogReal> log_R;
    std::vector<LogReal> log_Rp;

    // Theorem-2 data.
    std::vector<double> center;
    double h = 0.0;
    double beta = 0.0;

    bool has_radii() const { return !log_R.empty(); }
    std::size_t size() const { return terms.size(); }

    void check_term(std::size_t j) const
    {
        if (j < 1 || j > terms.size())
            throw DomainError("term index " + std::to_string(j) + " outside 1.."
                              + std::to_string(terms.size()));
    }
    const std::vector<double>& point(std::size_t j) const
    {
        check_term(j);
        return points[terms[j - 1]];
    }
    double time(std::size_t j) const
    {
        check_term(j);
        return times[terms[j - 1]];
    }
    LogRadius inner(std::size_t j) const
    {
        check_term(j);
        return {log_R[j - 1]};
    }
    LogRadius outer(std::size_t j) const
    {
        check_term(j);
        return {log_Rp[j - 1]};
    }
    // exp(log R'_j) finite in binary64 with margin; otherwise only logs exist.
    bool log_only(std::size_t j) const { return !outer(j).representable(); }

    // eta(t) = min(h/4, 1) min(gamma(t), t)
    double eta(double t) const { return std::min(h / 4.0, 1.0) * std::min(gamma(t), t); }
};

namespace detail {

inline double norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (double c : v)
        s += c * c;
    return std::sqrt(s);
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline constexpr double ball_rel_tol = 1e-12;

inline bool in_open_ball(double norm2, double radius)
{
    return norm2 < radius * radius * (1.0 - ball_rel_tol);
}

inline constexpr std::size_t max_lattice_points = 100'000'000;

// Points of B_k(0) cap delta Z^n in lexicographic coordinate order.
inline std::vector<std::vector<double>> enumerate_block(int n, double k, double delta)
{
    const auto imax = static_cast<std::int64_t>(std::floor(k / delta)) + 1;
    const long double box = std::pow(2.0L * static_cast<long double>(imax) + 1.0L, n);
    if (box > static_cast<long double>(std::numeric_limits<std::int64_t>::max()) / 4)
        throw SizeError("lattice block k=" + std::to_string(static_cast<int>(k))
                        + " overflows a 64-bit point count");
    std::vector<std::vector<double>> out;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), -imax);
    while (true) {
        double norm2 = 0.0;
        for (auto i : idx)
            norm2 += static_cast<double>(i * i) * delta * delta;
        if (in_open_ball(norm2, k)) {
            std::vector<double> p(static_cast<std::size_t>(n));
            for (std::size_t d = 0; d < p.size(); ++d)
                p[d] = static_cast<double>(idx[d]) * delta;
            out.push_back(std::move(p));
            if (out.size() > max_lattice_points)
                throw SizeError("lattice block exceeds " + std::to_string(max_lattice_points)
                                + " points");
        }
        int d = n - 1;
        while (d >= 0 && idx[static_cast<std::size_t>(d)] == imax) {
            idx[static_cast<std::size_t>(d)] = -imax;
            --d;
        }
        if (d < 0)
            break;
        ++idx[static_cast<std::size_t>(d)];
    }
    return out;
}

// Smallest log r >= log_lo (to bisection accuracy) with inf_w log|phi'| > log_thr,
// assuming |phi'| eventually increases.
inline LogReal log_radius_where_dphi_exceeds(const DispersionSymbol& sym, LogReal log_thr,
                                             LogReal log_lo, const std::string& what)
{
    if (log_thr == log_neg_inf)
        return log_lo;
    auto ok = [&](LogReal lr) { return sym.log_inf_abs_dphi({lr}) > log_thr; };
    if (ok(log_lo))
        return log_lo;
    LogReal lo = log_lo;
    LogReal hi = std::max<LogReal>(2.0L * log_lo, 1.0L);
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0L;
        if (!(hi < 1e4000L))
            throw ConstructionError("no radius below the extended range has inf|phi'| above the "
                                    "threshold required by " + what);
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15L * hi; ++it) {
        const LogReal mid = 0.5L * (lo + hi);
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

inline constexpr int annulus_grid_nodes = 256;

} // namespace detail

// inf over [a, b] x S^{n-1} of log|phi'|: endpoints for radially monotone
// symbols, otherwise a 256-node grid uniform in log log r.
inline LogReal log_inf_dphi_on_annulus(const DispersionSymbol& sym, LogRadius a, LogRadius b)
{
    if (sym.radially_monotone())
        return std::min(sym.log_inf_abs_dphi(a), sym.log_inf_abs_dphi(b));
    LogReal best = std::numeric_limits<LogReal>::infinity();
    const LogReal la = a.loglog(), lb = b.loglog();
    for (int i = 0; i < detail::annulus_grid_nodes; ++i) {
        const LogReal ll = la + (lb - la) * i / (detail::annulus_grid_nodes - 1);
        best = std::min(best, sym.log_inf_abs_dphi({std::exp(ll)}));
    }
    return best;
}

// Max over [a, b] x S^{n-1} of a log-domain quantity sampled on the same
// log log grid (endpoints included).
template <class F>
LogReal log_sup_on_annulus(LogRadius a, LogRadius b, F&& f)
{
    LogReal best = log_neg_inf;
    const LogReal la = a.loglog(), lb = b.loglog();
    for (int i = 0; i < detail::annulus_grid_nodes; ++i) {
        const LogReal ll = (i == 0) ? la
                           : (i == detail::annulus_grid_nodes - 1)
                               ? lb
                               : la + (lb - la) * i / (detail::annulus_grid_nodes - 1);
        const LogRadius r = (i == 0) ? a : (i == detail::annulus_grid_nodes - 1) ? b : LogRadius{std::exp(ll)};
        best = std::max(best, f(r));
    }
    return best;
}

inline Schedule build_spatial_schedule(const ApproachProfile& gamma, int n, int K,
                                       TimesPolicy policy = {})
{
    if (n < 1 || n > 3)
        throw InputError("build_spatial_schedule: n must be 1, 2 or 3");
    if (K < 1)
        throw InputError("build_spatial_schedule: K must be >= 1");
    gamma.validate();

    // Size guard before any enumeration: ball volume / cell volume, summed.
    long double estimate = 0.0L;
    for (int k = 1; k <= K; ++k) {
        const long double delta = gamma(1.0 / (k + 1)) / std::sqrt(static_cast<long double>(n));
        estimate += std::pow(2.0L * k / delta + 1.0L, n);
        if (estimate > static_cast<long double>(std::numeric_limits<std::int64_t>::max()))
            throw SizeError("schedule with K=" + std::to_string(K)
                            + " overflows a 64-bit point count");
    }
    if (estimate > 8.0L * detail::max_lattice_points)
        throw SizeError("schedule with K=" + std::to_string(K) + " needs about "
                        + std::to_string(static_cast<double>(estimate)) + " lattice candidates");

    Schedule s;
    s.n = n;
    s.K = K;
    s.gamma = gamma;
    for (int k = 1; k <= K; ++k) {
        const double delta = gamma(1.0 / (k + 1)) / std::sqrt(static_cast<double>(n));
        s.delta.push_back(delta);
        auto block = detail::enumerate_block(n, k, delta);
        if (block.empty())
            throw InternalError("lattice block " + std::to_string(k) + " is empty");
        const auto M = block.size();
        const double hi = 1.0 / (k + 1), lo = 1.0 / (k + 2), w = hi - lo;
        const double margin = w / (policy.margin_factor * static_cast<double>(M) + 4.0);
        for (std::size_t i = 0; i < M; ++i) {
            const double t = (M == 1) ? 0.5 * (lo + hi)
                                      : hi - margin
                                            - static_cast<double>(i) * (w - 2.0 * margin)
                                                  / static_cast<double>(M - 1);
            s.times.push_back(t);
        }
        for (auto& p : block)
            s.points.push_back(std::move(p));
        s.block_bounds.push_back(s.points.size());
    }
    return s;
}

// One lattice index per block k >= max(1, ceil|x|) whose point lies in the
// approach region of width `width(t)` around x: the nearest qualifying point,
// smaller index on ties. Blocks without a qualifying point are reported as
// std::nullopt.
template <class Width>
std::vector<std::optional<std::size_t>> tangential_candidates(const std::vector<double>& x,
                                                              const Schedule& s, Width&& width)
{
    const int first = std::max(1, static_cast<int>(std::ceil(detail::norm(x))));
    std::vector<std::optional<std::size_t>> out;
    for (int k = first; k <= s.K; ++k) {
        const std::size_t begin = (k == 1) ? 0 : s.block_bounds[static_cast<std::size_t>(k - 2)];
        const std::size_t end = s.block_bounds[static_cast<std::size_t>(k - 1)];
        std::optional<std::size_t> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = begin; i < end; ++i) {
            const double d = detail::distance(s.points[i], x);
            if (d < width(s.times[i]) && d < best_d) {
                best_d = d;
                best = i;
            }
        }
        out.push_back(best);
    }
    return out;
}

// Indices (1-based, into the lattice sequence) n_j with |x_{n_j} - x| < gamma(t_{n_j}).
inline std::vector<std::size_t> build_tangential_subsequence(const std::vector<double>& x,
                                                             const Schedule& s)
{
    if (static_cast<int>(x.size()) != s.n)
        throw InputError("build_tangential_subsequence: x has wrong dimension");
    if (detail::norm(x) > s.K - 1)
        throw InputError("build_tangential_subsequence: |x| must be <= K - 1");
    const auto cands = tangential_candidates(x, s, [&](double t) { return s.gamma(t); });
    std::vector<std::size_t> out;
    const int first = std::max(1, static_cast<int>(std::ceil(detail::norm(x))));
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!cands[i])
            throw InternalError("no lattice point of block " + std::to_string(first + static_cast<int>(i))
                                + " lies in the approach region around x");
        out.push_back(*cands[i] + 1);
    }
    return out;
}

namespace detail {

// max_{l<j} log(2|x_l - x_j| / (t_l - t_j)) over term indices (1-based).
inline LogReal log_max_point_speed(const Schedule& s, std::size_t j)
{
    LogReal best = log_neg_inf;
    const auto& xj = s.points[s.terms[j - 1]];
    const double tj = s.times[s.terms[j - 1]];
    for (std::size_t l = 1; l < j; ++l) {
        const double d = distance(s.points[s.terms[l - 1]], xj);
        if (d == 0.0)
            continue;
        const double dt = s.times[s.terms[l - 1]] - tj;
        best = std::max(best, std::log(static_cast<LogReal>(2.0 * d)) - std::log(static_cast<LogReal>(dt)));
    }
    return best;
}

// max_{l<j} log(2^j / (t_l - t_j)); times decrease, so l = j - 1 attains it.
inline LogReal log_time_gap_bound(const Schedule& s, std::size_t j)
{
    const double dt = s.times[s.terms[j - 2]] - s.times[s.terms[j - 1]];
    return static_cast<LogReal>(j) * std::log(2.0L) - std::log(static_cast<LogReal>(dt));
}

// log(2 m) where the factor 2 is still visible in extended precision,
// otherwise m (1 + 2^-40), which is a larger radius.
inline LogReal double_radius(LogReal log_m)
{
    return log_m + std::max(std::log(2.0L), std::abs(log_m) * 0x1p-40L);
}

inline void check_N(double N)
{
    if (!(N >= 2.0) || N != std::floor(N) || !std::isfinite(N))
        throw InputError("radius exponent N must be an integer >= 2");
}

inline void push_radius(Schedule& s, LogReal log_r, std::size_t j)
{
    const LogReal lrp = static_cast<LogReal>(s.N) * log_r;
    if (!std::isfinite(lrp))
        throw ConstructionError("radius of term " + std::to_string(j)
                                + " exceeds the extended log range");
    s.log_R.push_back(log_r);
    s.log_Rp.push_back(lrp);
}

} // namespace detail

// Annulus radii for every term of a spatial schedule (Theorem-1 variant).
inline Schedule build_annulus_schedule(const DispersionSymbol& sym, const Schedule& partial,
                                       double N)
{
    detail::check_N(N);
    if (sym.dimension() != partial.n)
        throw InputError("build_annulus_schedule: symbol and schedule dimensions differ");
    const auto report = verify_growth_conditions(sym, 1e6, 64);
    if (!report.has(Verdict::theorem1))
        throw PreconditionError("build_annulus_schedule: symbol " + sym.name()
                                + " does not satisfy the Theorem-1 growth checks");
    Schedule s = partial;
    s.variant = Variant::theorem1;
    s.N = N;
    s.validity_radius = sym.validity_radius();
    s.terms.resize(s.points.size());
    for (std::size_t i = 0; i < s.terms.size(); ++i)
        s.terms[i] = i;
    s.log_R.clear();
    s.log_Rp.clear();

    const LogReal logR = std::nextafter(std::log(static_cast<LogReal>(sym.validity_radius())),
                                        std::numeric_limits<LogReal>::infinity());
    const LogReal r_star = detail::log_radius_where_dphi_exceeds(sym, 0.0L, logR, "|phi'| > 1");
    detail::push_radius(s, std::max(std::log(2.0L + sym.validity_radius()), detail::double_radius(r_star)), 1);

    for (std::size_t j = 2; j <= s.terms.size(); ++j) {
        const LogReal log_speed = detail::log_max_point_speed(s, j);
        LogReal base = std::max(s.log_Rp[j - 2], detail::log_time_gap_bound(s, j));
        LogReal lr = detail::double_radius(base);
        const auto annulus_ok = [&](LogReal l) {
            return log_inf_dphi_on_annulus(sym, {l}, {static_cast<LogReal>(N) * l}) > log_speed;
        };
        if (!annulus_ok(lr)) {
            const LogReal thr = detail::log_radius_where_dphi_exceeds(
                sym, log_speed, logR, "the point-speed condition at term " + std::to_string(j));
            lr = detail::double_radius(std::max(base, thr));
            for (int it = 0; it < 64 && !annulus_ok(lr); ++it)
                lr *= 2.0L;
            if (!annulus_ok(lr))
                throw ConstructionError("term " + std::to_string(j)
                                        + ": inf|phi'| on the annulus never clears "
                                          "max_l 2|x_l - x_j|/(t_l - t_j)");
        }
        detail::push_radius(s, lr, j);
    }
    return s;
}

// Lower bound (log) on R_j for the weak Theorem-2 rule:
// (2^{j+2} max(1/t, 1/gamma(t)))^{1/beta}.
inline LogReal log_weak_radius_bound(std::size_t j, double t, double gamma_t, double beta)
{
    const LogReal m = std::max(1.0L / t, 1.0L / static_cast<LogReal>(gamma_t));
    return (static_cast<LogReal>(j + 2) * std::log(2.0L) + std::log(m)) / beta;
}

// Greedy subsequence: first admissible candidate, then each next candidate
// with t_next <= t_prev - (3/h) eta(t_prev). Returns lattice indices (0-based).
inline std::vector<std::size_t> select_spaced_subsequence(const Schedule& s,
                                                          const std::vector<std::size_t>& candidates)
{
    std::vector<std::size_t> out;
    for (auto c : candidates) {
        if (out.empty()) {
            out.push_back(c);
            continue;
        }
        const double tp = s.times[out.back()];
        if (s.times[c] <= tp - (3.0 / s.h) * s.eta(tp))
            out.push_back(c);
    }
    return out;
}

inline Schedule build_theorem2_schedule(const DispersionSymbol& sym, const std::vector<double>& x,
                                        const ApproachProfile& gamma, int n, int K, double N,
                                        Variant variant, double beta = 1.0)
{
    if (variant == Variant::theorem1)
        throw InputError("build_theorem2_schedule: variant must be a Theorem-2 variant");
    detail::check_N(N);
    if (sym.dimension() != n || static_cast<int>(x.size()) != n)
        throw InputError("build_theorem2_schedule: dimension mismatch");
    const auto report = verify_growth_conditions(
        sym, 1e6, 64, variant == Variant::theorem2_weak ? std::optional<double>(beta) : std::nullopt);
    if (!(report.lower_bound_h > 0.0))
        throw PreconditionError("build_theorem2_schedule: inf |phi'| = h must be positive");
    const Verdict need = variant == Variant::theorem2_strong ? Verdict::theorem2_strong
                                                             : Verdict::theorem2_weak;
    if (!report.has(need))
        throw PreconditionError(std::string("build_theorem2_schedule: symbol lacks verdict ")
                                + to_string(need));

    Schedule s = build_spatial_schedule(gamma, n, K);
    s.variant = variant;
    s.N = N;
    s.validity_radius = sym.validity_radius();
    s.center = x;
    s.h = report.lower_bound_h;
    s.beta = variant == Variant::theorem2_weak ? beta : 0.0;

    std::vector<std::size_t> cands;
    for (const auto& c : tangential_candidates(x, s, [&](double t) { return s.eta(t); }))
        if (c)
            cands.push_back(*c);
    s.terms = select_spaced_subsequence(s, cands);
    if (s.terms.empty())
        throw ConstructionError("build_theorem2_schedule: no lattice point within eta of x");

    detail::push_radius(s, std::log(2.0L + sym.validity_radius()), 1);
    for (std::size_t j = 2; j <= s.terms.size(); ++j) {
        LogReal bound;
        if (variant == Variant::theorem2_strong)
            bound = detail::log_time_gap_bound(s, j);
        else
            bound = log_weak_radius_bound(j, s.time(j), gamma(s.time(j)), beta);
        detail::push_radius(s, detail::double_radius(std::max(s.log_Rp[j - 2], bound)), j);
    }
    return s;
}

namespace detail {

// Points of B_k cap delta Z^n counted by slicing along the first axis; an
// independent path from enumerate_block.
inline std::size_t count_ball_points(int n, double radius2, double delta)
{
    if (n == 0)
        return radius2 > 0.0 ? 1 : 0;
    std::size_t total = 0;
    const auto imax = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(radius2, 0.0)) / delta)) + 1;
    for (std::int64_t i = -imax; i <= imax; ++i) {
        const double rest = radius2 - static_cast<double>(i * i) * delta * delta;
        if (rest > 0.0)
            total += count_ball_points(n - 1, rest, delta);
    }
    return total;
}

} // namespace detail

// Re-checks every schedule invariant from the raw fields. Returns the list
// of violations (empty when valid).
inline std::vector<std::string> validate(const Schedule& s, const DispersionSymbol* sym = nullptr)
{
    std::vector<std::string> bad;
    auto fail = [&](std::string m) { bad.push_back(std::move(m)); };
    if (s.n < 1 || s.n > 3)
        fail("dimension outside 1..3");
    if (static_cast<int>(s.delta.size()) != s.K || static_cast<int>(s.block_bounds.size()) != s.K)
        return bad.push_back("block arrays do not have K entries"), bad;
    if (s.points.size() != s.times.size())
        return bad.push_back("points and times differ in length"), bad;

    for (int k = 1; k <= s.K; ++k) {
        const double want = s.gamma(1.0 / (k + 1)) / std::sqrt(static_cast<double>(s.n));
        const double got = s.delta[static_cast<std::size_t>(k - 1)];
        if (std::abs(got - want) > 1e-15 * want)
            fail("delta_" + std::to_string(k) + " != gamma(1/(k+1))/sqrt(n)");
        if (k > 1 && !(got < s.delta[static_cast<std::size_t>(k - 2)]))
            fail("delta not strictly decreasing at k=" + std::to_string(k));
    }
    std::size_t prev = 0;
    for (int k = 1; k <= s.K; ++k) {
        const std::size_t end = s.block_bounds[static_cast<std::size_t>(k - 1)];
        if (!(end > prev)) {
            fail("block bounds not strictly increasing at k=" + std::to_string(k));
            prev = end;
            continue;
        }
        const double delta = s.delta[static_cast<std::size_t>(k - 1)];
        const double radius2 = static_cast<double>(k) * k * (1.0 - detail::ball_rel_tol);
        const std::size_t expected = detail::count_ball_points(s.n, radius2, delta);
        if (end - prev != expected)
            fail("block " + std::to_string(k) + " has " + std::to_string(end - prev)
                 + " points, lattice ball has " + std::to_string(expected));
        const double hi = 1.0 / (k + 1), lo = 1.0 / (k + 2);
        for (std::size_t i = prev; i < end && i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            double n2 = 0.0;
            for (double c : p) {
                const double q = c / delta;
                if (std::abs(q - std::round(q)) > 1e-9)
                    fail("point " + std::to_string(i + 1) + " not on the lattice");
                n2 += c * c;
            }
            if (!detail::in_open_ball(n2, k))
                fail("point " + std::to_string(i + 1) + " outside B_k");
            if (i > prev && !(s.points[i - 1] < p))
                fail("block " + std::to_string(k) + " not in lexicographic order");
            if (!(s.times[i] > lo && s.times[i] < hi))
                fail("t_" + std::to_string(i + 1) + " outside (1/(k+2), 1/(k+1))");
        }
        prev = end;
    }
    if (prev != s.points.size())
        fail("m_K differs from the number of points");
    for (std::size_t i = 1; i < s.times.size(); ++i)
        if (!(s.times[i] < s.times[i - 1]))
            fail("times not strictly decreasing at " + std::to_string(i + 1));

    if (!s.has_radii())
        return bad;

    const std::size_t J = s.terms.size();
    if (s.log_R.size() != J || s.log_Rp.size() != J)
        return bad.push_back("radius arrays do not match the term count"), bad;
    for (auto t : s.terms)
        if (t >= s.points.size())
            return bad.push_back("term refers to a missing lattice point"), bad;
    if (!(s.N >= 2.0))
        fail("N < 2");
    if (!(s.log_R[0] >= std::log(2.0L + s.validity_radius) * (1.0L - 1e-18L)))
        fail("R_1 < 2 + R");
    for (std::size_t j = 1; j <= J; ++j) {
        const LogReal lr = s.log_R[j - 1], lrp = s.log_Rp[j - 1];
        if (std::abs(lrp - static_cast<LogReal>(s.N) * lr) > 1e-18L * std::abs(lrp))
            fail("log R'_" + std::to_string(j) + " != N log R_" + std::to_string(j));
        if (!(lr < lrp))
            fail("R_" + std::to_string(j) + " >= R'_" + std::to_string(j));
        if (j < J && !(lrp < s.log_R[j]))
            fail("R'_" + std::to_string(j) + " >= R_" + std::to_string(j + 1));
    }
    const LogReal log2 = std::log(2.0L);
    if (s.variant == Variant::theorem1) {
        for (std::size_t j = 1; j <= J; ++j)
            if (s.terms[j - 1] != j - 1)
                return bad.push_back("theorem1 terms must enumerate the lattice in order"), bad;
        for (std::size_t j = 2; j <= J; ++j) {
            const double tj = s.time(j);
            LogReal need_gap = log_neg_inf, need_speed = log_neg_inf;
            for (std::size_t l = 1; l < j; ++l) {
                const LogReal ldt = std::log(static_cast<LogReal>(s.time(l) - tj));
                need_gap = std::max(need_gap, static_cast<LogReal>(j) * log2 - ldt);
                const double d = detail::distance(s.point(l), s.point(j));
                if (d > 0.0)
                    need_speed = std::max(need_speed, std::log(static_cast<LogReal>(2.0 * d)) - ldt);
            }
            if (!(s.log_R[j - 1] > need_gap))
                fail("R_" + std::to_string(j) + " <= max_l 2^j/(t_l - t_j)");
            if (sym && !(log_inf_dphi_on_annulus(*sym, s.inner(j), s.outer(j)) > need_speed))
                fail("inf |phi'| on annulus " + std::to_string(j) + " <= max_l 2|x_l-x_j|/(t_l-t_j)");
        }
    } else {
        if (static_cast<int>(s.center.size()) != s.n || !(s.h > 0.0))
            return bad.push_back("theorem2 schedule lacks center or h"), bad;
        for (std::size_t j = 1; j <= J; ++j) {
            const double t = s.time(j);
            if (!(detail::distance(s.point(j), s.center) < s.eta(t)))
                fail("|x_p" + std::to_string(j) + " - x| >= eta(t)");
            if (j < J && !(t - s.time(j + 1) >= (3.0 / s.h) * s.eta(t)))
                fail("spacing t_p" + std::to_string(j) + " - t_p" + std::to_string(j + 1)
                     + " < (3/h) eta");
            if (j >= 2) {
                const LogReal need = s.variant == Variant::theorem2_strong
                                         ? static_cast<LogReal>(j) * log2
                                               - std::log(static_cast<LogReal>(s.time(j - 1) - t))
                                         : log_weak_radius_bound(j, t, s.gamma(t), s.beta);
                if (!(s.log_R[j - 1] > need))
                    fail("R_" + std::to_string(j) + " violates the Theorem-2 radius rule");
            }
        }
    }
    return bad;
}

inline void validate_or_throw(const Schedule& s, const DispersionSymbol* sym = nullptr)
{
    const auto bad = validate(s, sym);
    if (bad.empty())
        return;
    std::string msg = "invalid schedule:";
    for (const auto& b : bad)
        msg += "\n  " + b;
    throw ConstructionError(msg);
}

} // namespace divcert

#endif
