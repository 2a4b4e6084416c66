#ifndef DIVCERT_OSCINT_HPP
#define DIVCERT_OSCINT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "divcert/errors.hpp"
#include "divcert/logmath.hpp"
#include "divcert/quadrature.hpp"
#include "divcert/schedule.hpp"
#include "divcert/symbol.hpp"

namespace divcert {

using quad::cplx;

// Largest phase variation the brute-force radial quadrature accepts.
inline constexpr double direct_phase_cap = 1e6;
// compute_term prefers direct quadrature below this variation, IBP above.
inline constexpr double auto_direct_cap = 1e4;
// Phases beyond 2^52 have no meaningful fractional part in binary64.
inline constexpr double phase_resolution_limit = 0x1p52;

// Space-time point at which a term is evaluated.
struct Target {
    std::vector<double> x;
    double t = 0.0;
};

inline Target target_of(const Schedule& s, std::size_t k)
{
    return {s.point(k), s.time(k)};
}

struct PhaseData {
    double F = 0.0;
    double dF = 0.0;
    double d2F = 0.0;
};

// Radial phase r -> F(r) with derivatives; d3 may be empty.
struct RadialPhase {
    std::function<double(double)> F;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
    bool zero = false; // identically zero
};

inline RadialPhase zero_phase()
{
    auto z = [](double) { return 0.0; };
    return {z, z, z, z, true};
}

// F(r) = r dxw + dt phi(r, w).
inline RadialPhase schedule_phase(const DispersionSymbol& sym, double dxw, double dt,
                                  std::vector<double> w)
{
    if (dxw == 0.0 && dt == 0.0)
        return zero_phase();
    auto ww = std::make_shared<std::vector<double>>(std::move(w));
    RadialPhase p;
    p.F = [&sym, dxw, dt, ww](double r) { return r * dxw + dt * sym.phi(r, *ww); };
    p.d1 = [&sym, dxw, dt, ww](double r) { return dxw + dt * sym.dphi(r, *ww); };
    p.d2 = [&sym, dt, ww](double r) { return dt * sym.d2phi(r, *ww); };
    if (sym.has_third_derivative())
        p.d3 = [&sym, dt, ww](double r) { return dt * sym.d3phi(r, *ww); };
    return p;
}

namespace detail {

inline double dot(const std::vector<double>& a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return d;
}

inline void check_representable(LogReal la, LogReal lb)
{
    if (!LogRadius{lb}.representable())
        throw RegimeError("annulus radius exp(" + std::to_string(static_cast<double>(lb))
                          + ") is beyond binary64; only enclosures are available");
    if (!(la > 0.0L) || !(lb > la))
        throw DomainError("radial integral needs 1 < R < R'");
}

} // namespace detail

inline PhaseData phase_at(const DispersionSymbol& sym, const Schedule& s, std::size_t j,
                          const Target& target, double r, std::span<const double> w)
{
    const auto a = s.inner(j), b = s.outer(j);
    if (!b.representable())
        throw RegimeError("phase_at: term " + std::to_string(j)
                          + " has log-only radii; use term_enclosure");
    if (!(r >= a.r() && r <= b.r()))
        throw DomainError("phase_at: r outside [R_j, R'_j]");
    const double dxw = detail::dot(detail::diff(target.x, s.point(j)), w);
    const double dt = target.t - s.time(j);
    if (dxw == 0.0 && dt == 0.0)
        return {};
    return {r * dxw + dt * sym.phi(r, w), dxw + dt * sym.dphi(r, w), dt * sym.d2phi(r, w)};
}

enum class Method { direct, levin_ibp, closed_form };

inline const char* to_string(Method m)
{
    switch (m) {
    case Method::direct: return "direct";
    case Method::levin_ibp: return "levin-ibp";
    case Method::closed_form: return "closed-form";
    }
    return "?";
}

struct OscillatoryTerm {
    cplx value{};
    double abs_error = 0.0;
    Method method = Method::direct;
    std::size_t node_count = 0;
};

// sum |F(r_{i+1}) - F(r_i)| over 4096 steps uniform in log r.
inline double phase_variation(const RadialPhase& ph, double la, double lb)
{
    if (ph.zero)
        return 0.0;
    constexpr int steps = 4096;
    double total = 0.0;
    double prev = ph.F(std::exp(la));
    for (int i = 1; i <= steps; ++i) {
        const double u = (i == steps) ? lb : la + (lb - la) * i / steps;
        const double cur = ph.F(std::exp(u));
        total += std::abs(cur - prev);
        prev = cur;
    }
    return total;
}

// 4 ((log b)^{1/4} - (log a)^{1/4}), the integral of 1/(r (log r)^{3/4}).
inline LogReal log_absolute_radial(LogReal la, LogReal lb)
{
    return std::log(4.0L * (std::pow(lb, 0.25L) - std::pow(la, 0.25L)));
}

// Brute force: the integral over [R, R'] of amplitude e^{iF}/(r (log r)^{3/4}),
// computed as the integral over u = log r of u^{-3/4} e^{iF(e^u)} with panels
// of at most one oscillation (21 nodes each).
inline OscillatoryTerm radial_direct(const RadialPhase& ph, LogReal la, LogReal lb, double tol,
                                     double amplitude = 1.0, double cap = direct_phase_cap,
                                     std::size_t max_evals = 40'000'000)
{
    detail::check_representable(la, lb);
    const double a = static_cast<double>(la), b = static_cast<double>(lb);
    const double var = phase_variation(ph, a, b);
    if (var > cap)
        throw RegimeError("radial_direct: phase variation " + std::to_string(var)
                          + " exceeds the cap " + std::to_string(cap));
    const auto max_panels = static_cast<std::size_t>(cap / (std::numbers::pi)) + 4096;
    auto dphase = [&](double u) {
        const double r = std::exp(u);
        return r * ph.d1(r);
    };
    const auto breaks = quad::phase_panels(dphase, a, b, 2.0 * std::numbers::pi, max_panels);
    auto f = [&](double u) {
        const double amp = amplitude * std::pow(u, -0.75);
        if (ph.zero)
            return cplx(amp, 0.0);
        return amp * std::exp(cplx(0.0, ph.F(std::exp(u))));
    };
    const auto res = quad::integrate_partitioned<cplx>(f, breaks, tol, max_evals);
    return {res.value, res.abs_error, Method::direct, res.evaluations};
}

namespace detail {

// Amplitude g = A/(r L^{3/4}), L = log r, and its first two derivatives.
struct Amplitude {
    long double g, g1, g2;
};

inline Amplitude amplitude_at(long double r, long double L, long double A)
{
    const long double g = A / (r * std::pow(L, 0.75L));
    const long double s = 1.0L + 0.75L / L;
    return {g, -g * s / r, g / (r * r) * (s * s + s + 0.75L / (L * L))};
}

struct PhaseDerivs {
    long double F, f1, f2, f3;
};

inline PhaseDerivs phase_derivs(const RadialPhase& ph, double r, bool need_f3)
{
    PhaseDerivs d{ph.F(r), ph.d1(r), ph.d2(r), 0.0L};
    if (need_f3)
        d.f3 = ph.d3(r);
    if (!std::isfinite(d.F) || !std::isfinite(d.f1) || !std::isfinite(d.f2) || !std::isfinite(d.f3))
        throw RegimeError("phase derivatives are not finite at r = " + std::to_string(r));
    return d;
}

// p0 = g/F', p1 = p0'/F', and the remainder amplitudes p0', p1'.
struct IbpAmplitudes {
    long double p0, p1, dp0, dp1;
};

inline IbpAmplitudes ibp_amplitudes(const Amplitude& g, const PhaseDerivs& d)
{
    const long double f1 = d.f1, f2 = d.f2, f3 = d.f3;
    const long double p0 = g.g / f1;
    const long double dp0 = g.g1 / f1 - g.g * f2 / (f1 * f1);
    const long double p1 = dp0 / f1;
    const long double dp1 = g.g2 / (f1 * f1) - 3.0L * g.g1 * f2 / (f1 * f1 * f1)
                            - g.g * f3 / (f1 * f1 * f1) + 3.0L * g.g * f2 * f2 / (f1 * f1 * f1 * f1);
    return {p0, p1, dp0, dp1};
}

inline constexpr int stationarity_samples = 256;

inline void require_nonstationary(const RadialPhase& ph, double la, double lb)
{
    int sign = 0;
    for (int i = 0; i <= stationarity_samples; ++i) {
        const double u = (i == stationarity_samples) ? lb : la + (lb - la) * i / stationarity_samples;
        const double v = ph.d1(std::exp(u));
        const int sg = (v > 0.0) - (v < 0.0);
        if (sg == 0 || (sign != 0 && sg != sign))
            throw StationaryPhaseError("F' vanishes or changes sign near r = exp("
                                       + std::to_string(u) + ")");
        sign = sg;
    }
}

} // namespace detail

// Boundary part and remainder of the integration-by-parts split.
struct IbpSplit {
    cplx boundary{};
    double boundary_error = 0.0; // boundary terms whose phase is unresolvable
    double boundary_magnitude = 0.0;
    cplx remainder_coefficient{}; // integral = boundary + coefficient * remainder
    int depth = 1;
};

inline IbpSplit ibp_boundary(const RadialPhase& ph, LogReal la, LogReal lb, int depth,
                             double amplitude = 1.0)
{
    IbpSplit out;
    out.depth = depth;
    for (int side = 0; side < 2; ++side) {
        const LogReal L = side ? lb : la;
        const double r = std::exp(static_cast<double>(L));
        const auto g = detail::amplitude_at(r, L, amplitude);
        const auto d = detail::phase_derivs(ph, r, depth >= 2);
        const auto p = detail::ibp_amplitudes(g, d);
        const double sgn = side ? 1.0 : -1.0;
        // depth 1: [-i p0 e^{iF}];  depth 2 adds [p1 e^{iF}]
        const cplx coeff = cplx(0.0, -static_cast<double>(p.p0))
                           + (depth >= 2 ? cplx(static_cast<double>(p.p1), 0.0) : cplx{});
        const double mag = std::abs(coeff);
        out.boundary_magnitude += mag;
        if (std::abs(d.F) > phase_resolution_limit)
            out.boundary_error += mag;
        else
            out.boundary += sgn * coeff * std::exp(cplx(0.0, static_cast<double>(d.F)));
    }
    out.remainder_coefficient = depth >= 2 ? cplx(-1.0, 0.0) : cplx(0.0, 1.0);
    return out;
}

// Integration by parts `depth` times (1 or 2). The last remainder is
// quadratured directly when its variation is below the cap and its absolute
// bound exceeds tol; otherwise its absolute integral goes to abs_error.
inline OscillatoryTerm radial_ibp(const RadialPhase& ph, LogReal la, LogReal lb, int depth,
                                  double tol, double amplitude = 1.0,
                                  double cap = direct_phase_cap)
{
    detail::check_representable(la, lb);
    if (depth < 1 || depth > 2)
        throw InputError("radial_ibp: depth must be 1 or 2");
    if (depth == 2 && !ph.d3)
        depth = 1;
    if (ph.zero)
        throw StationaryPhaseError("radial_ibp: phase is identically zero");
    const double a = static_cast<double>(la), b = static_cast<double>(lb);
    detail::require_nonstationary(ph, a, b);

    const auto split = ibp_boundary(ph, la, lb, depth, amplitude);
    auto q = [&](double u) -> long double {
        const double r = std::exp(u);
        const auto g = detail::amplitude_at(r, u, amplitude);
        const auto p = detail::ibp_amplitudes(g, detail::phase_derivs(ph, r, depth >= 2));
        return depth >= 2 ? p.dp1 : p.dp0;
    };
    // |q| dr = |q(e^u)| e^u du
    auto absq = [&](double u) -> long double { return std::abs(q(u)) * std::exp(static_cast<long double>(u)); };
    const auto bound = quad::integrate<long double>(absq, a, b, tol / 4.0, 4'000'000, 64);
    const double rem_bound = static_cast<double>(bound.value) + bound.abs_error;

    OscillatoryTerm out;
    out.method = Method::levin_ibp;
    out.node_count = bound.evaluations + 2;
    if (split.boundary_error + rem_bound <= tol || phase_variation(ph, a, b) > cap) {
        out.value = split.boundary;
        out.abs_error = split.boundary_error + rem_bound;
        return out;
    }
    auto dphase = [&](double u) {
        const double r = std::exp(u);
        return r * ph.d1(r);
    };
    const auto breaks = quad::phase_panels(dphase, a, b, 2.0 * std::numbers::pi,
                                           static_cast<std::size_t>(cap / std::numbers::pi) + 4096);
    auto f = [&](double u) {
        const double r = std::exp(u);
        return static_cast<double>(q(u)) * r * std::exp(cplx(0.0, ph.F(r)));
    };
    const auto rem = quad::integrate_partitioned<cplx>(f, breaks, std::max(tol / 2.0, 1e-300));
    out.value = split.boundary + split.remainder_coefficient * rem.value;
    out.abs_error = split.boundary_error + rem.abs_error;
    out.node_count += rem.evaluations;
    return out;
}

// Per-annulus quantities shared by every enclosure of term j.
struct AnnulusStats {
    LogReal la = 0.0L, lb = 0.0L;       // log R_j, log R'_j
    LogReal log_m_a = 0.0L, log_m_b = 0.0L; // log inf_w |phi'| at R_j, R'_j
    LogReal log_m_min = 0.0L;           // over the annulus
    LogReal log_C = log_neg_inf;        // sup r|phi''|/(|phi'|^2 (log r)^{3/4})
    LogReal log_W = log_neg_inf;        // sup r^beta |phi''|/(log r)^{3/4}, weak variant
};

inline AnnulusStats annulus_stats(const DispersionSymbol& sym, const Schedule& s, std::size_t j)
{
    AnnulusStats st;
    const auto a = s.inner(j), b = s.outer(j);
    st.la = a.log_r;
    st.lb = b.log_r;
    st.log_m_a = sym.log_inf_abs_dphi(a);
    st.log_m_b = sym.log_inf_abs_dphi(b);
    st.log_m_min = log_inf_dphi_on_annulus(sym, a, b);
    st.log_C = log_sup_on_annulus(a, b, [&](LogRadius r) { return sym.log_sup_curvature_ratio(r); });
    if (s.variant == Variant::theorem2_weak)
        st.log_W = log_sup_on_annulus(a, b, [&](LogRadius r) { return sym.log_sup_weak_ratio(r, s.beta); });
    return st;
}

inline std::vector<AnnulusStats> annulus_table(const DispersionSymbol& sym, const Schedule& s)
{
    std::vector<AnnulusStats> out;
    out.reserve(s.size());
    for (std::size_t j = 1; j <= s.size(); ++j)
        out.push_back(annulus_stats(sym, s, j));
    return out;
}

// Inequality used for the lower bound on |F'|.
enum class Chain {
    phase_gap_half,     // |F'| >= (t - t_j)|phi'|/2
    phase_gap_third,    // |F'| >= (t - t_j)|phi'|/3, needs |phi'| >= h
    phase_gap_eta,      // |F'| >= eta(t)
    phase_gap_direct,   // |F'| >= (1 - d/((t - t_j) inf|phi'|)) (t - t_j)|phi'|
    absolute_integrand, // no phase used
};

inline const char* to_string(Chain c)
{
    switch (c) {
    case Chain::phase_gap_half: return "phase_gap_half";
    case Chain::phase_gap_third: return "phase_gap_third";
    case Chain::phase_gap_eta: return "phase_gap_eta";
    case Chain::phase_gap_direct: return "phase_gap_direct";
    case Chain::absolute_integrand: return "absolute_integrand";
    }
    return "?";
}

// Certified |A_j| <= bound. Pieces are the boundary terms and the
// remainder integral after one integration by parts.
struct Enclosure {
    std::size_t j = 0;
    LogReal log_bound = log_neg_inf;
    LogReal log_boundary = log_neg_inf;
    LogReal log_interior = log_neg_inf;
    Chain chain = Chain::absolute_integrand;
    LogReal log_phase_gap = log_neg_inf; // log of the |F'| lower bound constant (c dt or eta)

    double bound() const { return exp_upper(log_bound); }
    double boundary_bound() const { return exp_upper(log_boundary); }
    double interior_bound() const { return exp_upper(log_interior); }
};

// Geometry of the target set relative to term j.
struct TargetGap {
    LogReal log_d = log_neg_inf; // log of max |x - x_j|
    double dt_lo = 0.0;          // min (t - t_j)
    double dt_hi = 0.0;          // max (t - t_j)
    double t_lo = 0.0;           // min t, for eta
};

inline Enclosure absolute_enclosure(int n, const AnnulusStats& st, std::size_t j)
{
    Enclosure e;
    e.j = j;
    e.chain = Chain::absolute_integrand;
    e.log_interior = log_absolute_radial(st.la, st.lb);
    e.log_bound = std::log(static_cast<LogReal>(polar_constant(n))) + e.log_interior;
    return e;
}

inline Enclosure enclosure_from_gap(int n, const AnnulusStats& st, std::size_t j, Variant variant,
                                    double h, double beta, const Schedule& s, const TargetGap& gap)
{
    if (!(gap.dt_lo > 0.0))
        return absolute_enclosure(n, st, j);
    const LogReal ldt = std::log(static_cast<LogReal>(gap.dt_lo));
    const LogReal x = ldt + st.log_m_min; // log(dt inf|phi'|)
    const LogReal log_ga = -st.la - 0.75L * std::log(st.la);
    const LogReal log_gb = -st.lb - 0.75L * std::log(st.lb);
    const LogReal log2 = std::log(2.0L), log3 = std::log(3.0L);

    Enclosure e;
    e.j = j;
    std::optional<LogReal> lc;
    if (variant == Variant::theorem1 && gap.log_d < x - log2) {
        lc = -log2;
        e.chain = Chain::phase_gap_half;
    } else if (variant == Variant::theorem2_strong && h > 0.0
               && st.log_m_min >= std::log(static_cast<LogReal>(h))
               && gap.log_d <= std::log(2.0L * h / 3.0L) + ldt) {
        lc = -log3;
        e.chain = Chain::phase_gap_third;
    } else if (variant == Variant::theorem2_weak) {
        const LogReal log_eta = std::log(static_cast<LogReal>(s.eta(gap.t_lo)));
        const bool ok = gap.log_d == log_neg_inf
                            ? x >= log_eta
                            : gap.log_d < x && x + std::log1p(-std::exp(gap.log_d - x)) >= log_eta;
        if (ok && st.log_W < std::numeric_limits<LogReal>::infinity()) {
            e.chain = Chain::phase_gap_eta;
            e.log_phase_gap = log_eta;
            e.log_boundary = log_add(log_ga, log_gb) - log_eta;
            const LogReal term1 = log_ga - log_eta;
            const LogReal term2 = st.log_W == log_neg_inf
                                      ? log_neg_inf
                                      : std::log(static_cast<LogReal>(gap.dt_hi)) - 2.0L * log_eta
                                            + st.log_W - beta * st.la - std::log(static_cast<LogReal>(beta));
            e.log_interior = log_add(term1, term2);
            e.log_bound = std::log(static_cast<LogReal>(polar_constant(n)))
                          + log_add(e.log_boundary, e.log_interior);
            return e;
        }
    }
    if (!lc && gap.log_d < x) {
        const LogReal c = gap.log_d == log_neg_inf ? 1.0L : -std::expm1(gap.log_d - x);
        if (c > 0.0L) {
            lc = std::log(c);
            e.chain = Chain::phase_gap_direct;
        }
    }
    if (!lc)
        return absolute_enclosure(n, st, j);

    e.log_phase_gap = *lc + ldt;
    e.log_boundary = log_add(log_ga - (*lc + ldt + st.log_m_a), log_gb - (*lc + ldt + st.log_m_b));
    const LogReal term1 = log_ga - (*lc + ldt + st.log_m_min);
    const LogReal term2 = st.log_C == log_neg_inf ? log_neg_inf : st.log_C - 2.0L * *lc - ldt - st.la;
    e.log_interior = log_add(term1, term2);
    e.log_bound = std::log(static_cast<LogReal>(polar_constant(n))) + log_add(e.log_boundary, e.log_interior);
    return e;
}

inline TargetGap point_gap(const Schedule& s, std::size_t j, const Target& target)
{
    TargetGap g;
    const double d = detail::distance(target.x, s.point(j));
    g.log_d = d == 0.0 ? log_neg_inf : std::log(static_cast<LogReal>(d));
    g.dt_lo = g.dt_hi = target.t - s.time(j);
    g.t_lo = target.t;
    return g;
}

// Enclosure of term j at an arbitrary (x, t).
inline Enclosure term_enclosure_at(const DispersionSymbol& sym, const Schedule& s, std::size_t j,
                                   const Target& target, const AnnulusStats* cached = nullptr)
{
    const AnnulusStats st = cached ? *cached : annulus_stats(sym, s, j);
    return enclosure_from_gap(s.n, st, j, s.variant, s.h, s.beta, s, point_gap(s, j, target));
}

// Enclosure of A_j at (x_k, t_k); j < k uses the absolute integrand.
inline Enclosure term_enclosure(const DispersionSymbol& sym, const Schedule& s, std::size_t j,
                                std::size_t k, const AnnulusStats* cached = nullptr)
{
    s.check_term(j);
    s.check_term(k);
    if (j == k)
        throw DomainError("term_enclosure: j = k is the diagonal term, use diagonal_term_exact");
    const AnnulusStats st = cached ? *cached : annulus_stats(sym, s, j);
    if (j < k)
        return absolute_enclosure(s.n, st, j);
    return enclosure_from_gap(s.n, st, j, s.variant, s.h, s.beta, s, point_gap(s, j, target_of(s, k)));
}

// Worst case over {t_min <= t < 1, |x| <= x_max}.
inline Enclosure term_enclosure_over_set(const DispersionSymbol& sym, const Schedule& s,
                                         std::size_t j, double t_min, double x_max,
                                         const AnnulusStats* cached = nullptr)
{
    const AnnulusStats st = cached ? *cached : annulus_stats(sym, s, j);
    TargetGap g;
    const double d = x_max + detail::norm(s.point(j));
    g.log_d = d == 0.0 ? log_neg_inf : std::log(static_cast<LogReal>(d));
    g.dt_lo = t_min - s.time(j);
    g.dt_hi = 1.0 - s.time(j);
    g.t_lo = t_min;
    return enclosure_from_gap(s.n, st, j, s.variant, s.h, s.beta, s, g);
}

// (2 pi)^{-n} |S^{n-1}| 4 (1 - N^{-1/4}) (log R'_k)^{1/4}
inline double diagonal_term_exact(const Schedule& s, std::size_t k)
{
    s.check_term(k);
    const LogReal lb = s.log_Rp[k - 1], la = s.log_R[k - 1];
    return static_cast<double>(static_cast<LogReal>(polar_constant(s.n)) * 4.0L
                               * (std::pow(lb, 0.25L) - std::pow(la, 0.25L)));
}

struct AngularNodeTrace {
    std::vector<double> omega;
    OscillatoryTerm radial;
    std::vector<std::pair<double, double>> phase_samples; // (r, F)
};

struct TermTrace {
    std::size_t j = 0;
    std::vector<AngularNodeTrace> nodes;
};

inline OscillatoryTerm angular_integrate(int n, const std::function<cplx(std::span<const double>)>& f,
                                         double tol)
{
    const auto r = quad::integrate_sphere(n, f, tol);
    return {r.value, r.abs_error, Method::direct, r.nodes};
}

// A_j at target: (2 pi)^{-n} times the angular integral of the radial
// integral. Closed form for zero phase, direct below auto_direct_cap,
// integration by parts (depth 2) above.
inline OscillatoryTerm compute_term(const DispersionSymbol& sym, const Schedule& s, std::size_t j,
                                    const Target& target, double tol, TermTrace* trace = nullptr)
{
    s.check_term(j);
    const LogReal la = s.log_R[j - 1], lb = s.log_Rp[j - 1];
    const double pc = polar_constant(s.n);
    const auto dx = detail::diff(target.x, s.point(j));
    const double dt = target.t - s.time(j);
    const bool zero = dt == 0.0 && std::all_of(dx.begin(), dx.end(), [](double v) { return v == 0.0; });
    if (zero) {
        const double v = static_cast<double>(static_cast<LogReal>(pc) * 4.0L
                                             * (std::pow(lb, 0.25L) - std::pow(la, 0.25L)));
        if (trace)
            trace->j = j;
        return {cplx(v, 0.0), 4.0 * std::numeric_limits<double>::epsilon() * v, Method::closed_form, 0};
    }
    if (s.log_only(j))
        throw RegimeError("compute_term: term " + std::to_string(j) + " is in the log-only regime");
    const double measure = sphere_measure(s.n);
    const double rad_tol = tol / (2.0 * pc * measure);
    const double ang_tol = tol / (2.0 * pc);
    double max_rad_err = 0.0;
    std::size_t nodes = 0;
    bool any_ibp = false;
    auto radial = [&](std::span<const double> w) {
        const double dxw = detail::dot(dx, w);
        const auto ph = schedule_phase(sym, dxw, dt, std::vector<double>(w.begin(), w.end()));
        OscillatoryTerm r;
        if (ph.zero) {
            r = {cplx(static_cast<double>(std::exp(log_absolute_radial(la, lb))), 0.0), 0.0,
                 Method::closed_form, 0};
        } else if (phase_variation(ph, static_cast<double>(la), static_cast<double>(lb)) <= auto_direct_cap) {
            r = radial_direct(ph, la, lb, rad_tol);
        } else {
            r = radial_ibp(ph, la, lb, 2, rad_tol);
            any_ibp = true;
        }
        max_rad_err = std::max(max_rad_err, r.abs_error);
        nodes += r.node_count;
        if (trace) {
            AngularNodeTrace nt;
            nt.omega.assign(w.begin(), w.end());
            nt.radial = r;
            if (!ph.zero) {
                for (int i = 0; i <= 16; ++i) {
                    const double u = static_cast<double>(la + (lb - la) * i / 16);
                    const double rr = std::exp(u);
                    nt.phase_samples.emplace_back(rr, ph.F(rr));
                }
            }
            trace->nodes.push_back(std::move(nt));
        }
        return r.value;
    };
    if (trace)
        trace->j = j;
    const auto ang = quad::integrate_sphere(s.n, radial, ang_tol);
    OscillatoryTerm out;
    out.value = pc * ang.value;
    out.abs_error = pc * (ang.abs_error + measure * max_rad_err);
    out.method = any_ibp ? Method::levin_ibp : Method::direct;
    out.node_count = nodes;
    return out;
}

} // namespace divcert

#endif
