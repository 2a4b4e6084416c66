#ifndef DIVCERT_LOGMATH_HPP
#define DIVCERT_LOGMATH_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "divcert/errors.hpp"

namespace divcert {

// Natural logarithms of annulus radii grow like N^j and leave the binary64
// range after a few hundred terms; they are carried in extended precision.
using LogReal = long double;

static_assert(std::numeric_limits<LogReal>::max_exponent10 >= 4000,
              "extended log range needed (x87 or IEEE quad long double)");

inline constexpr LogReal log_neg_inf = -std::numeric_limits<LogReal>::infinity();

// log(e^a + e^b), exact for -inf operands.
inline LogReal log_add(LogReal a, LogReal b)
{
    if (a < b)
        std::swap(a, b);
    if (b == log_neg_inf)
        return a;
    return a + std::log1p(std::exp(b - a));
}

inline LogReal log_sum(std::span<const LogReal> terms)
{
    LogReal hi = log_neg_inf;
    for (LogReal t : terms)
        hi = std::max(hi, t);
    if (hi == log_neg_inf)
        return hi;
    LogReal acc = 0;
    for (LogReal t : terms)
        acc += std::exp(t - hi);
    return hi + std::log(acc);
}

// exp(x) as a double; a strictly positive quantity whose value underflows is
// reported as the smallest subnormal so that it stays a valid upper bound.
inline double exp_upper(LogReal x)
{
    if (x == log_neg_inf)
        return 0.0;
    const double v = static_cast<double>(std::exp(x));
    if (v == 0.0)
        return std::numeric_limits<double>::denorm_min();
    return v;
}

// Surface measure of S^{n-1}; n = 1 is counting measure on {+1, -1}.
inline double sphere_measure(int n)
{
    switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: break;
    }
    if (n < 1)
        throw InputError("sphere_measure: dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// (2 pi)^{-n} |S^{n-1}|, the constant in front of every radial integral.
inline double polar_constant(int n)
{
    return sphere_measure(n) / std::pow(2.0 * std::numbers::pi, n);
}

// (log R)^p from log R without forming log R twice; log R may exceed double.
inline double log_power(LogReal log_r, double p)
{
    return static_cast<double>(std::exp(p * std::log(log_r)));
}

} // namespace divcert

#endif
