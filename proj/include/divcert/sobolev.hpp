#ifndef DIVCERT_SOBOLEV_HPP
#define DIVCERT_SOBOLEV_HPP

#include <cmath>
#include <vector>

#include "divcert/logmath.hpp"
#include "divcert/quadrature.hpp"
#include "divcert/schedule.hpp"

namespace divcert {

// Above this log radius (1 + e^{-2u})^{n/2} = 1 to far below double
// precision and the s = n/2 radial integral is elementary.
inline constexpr double sobolev_closed_form_from = 40.0;

inline constexpr double sobolev_rel_tol = 1e-8;

// |S^{n-1}| times the integral over log r in [la, lb] of
// u^{-3/2} e^{(2s-n)u} (1 + e^{-2u})^s, i.e. the H^s norm squared of the
// datum restricted to the annulus e^la < |xi| < e^lb.
inline double hs_annulus_norm(int n, double s, LogReal la, LogReal lb)
{
    if (!(s >= 0.0))
        throw InputError("hs_annulus_norm: s must be nonnegative");
    if (!(la > 0.0L) || !(lb >= la))
        throw DomainError("hs_annulus_norm: need 0 < log R <= log R'");
    const double measure = sphere_measure(n);
    const bool critical = std::abs(2.0 * s - n) == 0.0;
    LogReal split = lb;
    double value = 0.0;
    if (critical && lb > sobolev_closed_form_from) {
        split = std::max(la, static_cast<LogReal>(sobolev_closed_form_from));
        value += static_cast<double>(2.0L * (1.0L / std::sqrt(split) - 1.0L / std::sqrt(lb)));
    }
    if (split > la) {
        const double a = static_cast<double>(la), b = static_cast<double>(split);
        if ((2.0 * s - n) * b > 700.0)
            throw RegimeError("hs_annulus_norm: integrand overflows binary64 on this annulus");
        auto f = [&](double u) {
            return std::pow(u, -1.5) * std::exp((2.0 * s - n) * u) * std::pow(1.0 + std::exp(-2.0 * u), s);
        };
        const auto rough = quad::integrate<double>(f, a, b, 1e-6 * (b - a) * (f(a) + f(b)));
        const auto fine = quad::integrate<double>(f, a, b, 0.01 * sobolev_rel_tol * std::abs(rough.value));
        value += fine.value;
    }
    return measure * value;
}

// Partial sums of the squared norm over the first j_max annuli, j_max = 1..
inline std::vector<double> hs_partial_norms(const Schedule& sch, double s, std::size_t j_max)
{
    if (!sch.has_radii())
        throw PreconditionError("hs_partial_norms: schedule has no radii");
    if (j_max > sch.size())
        throw DomainError("hs_partial_norms: j_max exceeds schedule length");
    std::vector<double> out;
    double acc = 0.0;
    for (std::size_t j = 1; j <= j_max; ++j) {
        acc += hs_annulus_norm(sch.n, s, sch.log_R[j - 1], sch.log_Rp[j - 1]);
        out.push_back(acc);
    }
    return out;
}

inline double hs_partial_norm(const Schedule& sch, double s, std::size_t j_max)
{
    if (j_max == 0)
        return 0.0;
    return hs_partial_norms(sch, s, j_max).back();
}

// 2^{n/2} |S^{n-1}| int_{rho0}^inf dr / (r (log r)^rho)
//   = 2^{n/2} |S^{n-1}| (log rho0)^{1-rho} / (rho - 1)
// Bounds the s = n/2 norm squared of the datum outside radius rho0.
inline double hs_tail_bound(LogReal from_radius_log, int n, double rho = 1.5)
{
    if (!(from_radius_log > 0.0L))
        throw DomainError("hs_tail_bound: from_radius_log must be positive");
    if (!(rho > 1.0))
        throw InputError("hs_tail_bound: rho must exceed 1");
    return std::pow(2.0, 0.5 * n) * sphere_measure(n) * log_power(from_radius_log, 1.0 - rho) / (rho - 1.0);
}

inline constexpr double sobolev_converged_below = 1e-2;

struct SobolevReport {
    int n = 1;
    double s = 0.5;
    std::size_t j_max = 0;
    std::vector<double> partial_norms; // squared
    std::vector<double> increment_bounds; // hs_tail_bound(log R'_{j-1}) for j >= 2
    double tail_bound = 0.0;           // beyond R'_{j_max}
    bool converged = false;

    double norm() const { return partial_norms.empty() ? 0.0 : std::sqrt(partial_norms.back()); }
};

inline SobolevReport sobolev_report(const Schedule& sch, double s, std::size_t j_max)
{
    SobolevReport r;
    r.n = sch.n;
    r.s = s;
    r.j_max = j_max;
    r.partial_norms = hs_partial_norms(sch, s, j_max);
    for (std::size_t j = 2; j <= j_max; ++j)
        r.increment_bounds.push_back(hs_tail_bound(sch.log_Rp[j - 2], sch.n));
    if (j_max >= 1) {
        r.tail_bound = hs_tail_bound(sch.log_Rp[j_max - 1], sch.n);
        r.converged = r.tail_bound < sobolev_converged_below;
    }
    return r;
}

// int_{R^n} (1 + |xi|^2)^{-s} = pi^{n/2} Gamma(s - n/2) / Gamma(s), s > n/2
inline double decay_integral_limit(int n, double s)
{
    if (!(s > 0.5 * n))
        throw DomainError("decay_integral_limit: needs s > n/2");
    return std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(s - 0.5 * n) / std::tgamma(s);
}

// Same integral truncated to |xi| < r_max.
inline double decay_integral(int n, double s, double r_max, double tol = 1e-10)
{
    if (!(r_max > 0.0))
        throw DomainError("decay_integral: r_max must be positive");
    auto f = [&](double r) { return std::pow(r, n - 1) * std::pow(1.0 + r * r, -s); };
    return sphere_measure(n) * quad::integrate<double>(f, 0.0, r_max, tol, 20'000'000, 16).value;
}

} // namespace divcert

#endif
