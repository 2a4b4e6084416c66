#ifndef DIVCERT_QUADRATURE_HPP
#define DIVCERT_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "divcert/errors.hpp"

namespace divcert::quad {

using cplx = std::complex<double>;

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> gk21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> gk21_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715966197565, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1,3,5,7,9.
inline constexpr std::array<double, 5> g10_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk21(F& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T kron = f(c) * gk21_weights[10];
    T gauss{};
    for (std::size_t i = 0; i < 10; ++i) {
        const T s = f(c - h * gk21_nodes[i]) + f(c + h * gk21_nodes[i]);
        kron += s * gk21_weights[i];
        if (i % 2 == 1)
            gauss += s * g10_weights[i / 2];
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, static_cast<double>(std::abs(kron - gauss))};
}

} // namespace detail

template <class T>
struct Result {
    T value{};
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

// Globally adaptive GK21 over an initial partition: repeatedly bisects the
// panel with the largest error estimate until the summed estimate is <= tol.
template <class T, class F>
Result<T> integrate_partitioned(F&& f, std::span<const double> breaks, double tol,
                                std::size_t max_evals = 20'000'000)
{
    if (breaks.size() < 2)
        throw InputError("integrate_partitioned: need at least two breakpoints");
    std::priority_queue<detail::Panel<T>> heap;
    Result<T> out;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto p = detail::gk21<T>(f, breaks[i], breaks[i + 1]);
        out.evaluations += 21;
        err += p.error;
        heap.push(p);
    }
    while (err > tol) {
        if (out.evaluations + 42 > max_evals) {
            throw BudgetError("adaptive quadrature: node budget exhausted, achieved error "
                                  + std::to_string(err),
                              err);
        }
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break; // interval at machine resolution
        heap.pop();
        auto left = detail::gk21<T>(f, worst.a, mid);
        auto right = detail::gk21<T>(f, mid, worst.b);
        out.evaluations += 42;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in a fixed (left-to-right) order so the result does not depend
    // on heap layout.
    std::vector<detail::Panel<T>> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    out.abs_error = 0.0;
    for (const auto& p : panels) {
        out.value += p.value;
        out.abs_error += p.error;
    }
    return out;
}

template <class T, class F>
Result<T> integrate(F&& f, double a, double b, double tol,
                    std::size_t max_evals = 20'000'000, int initial_panels = 1)
{
    std::vector<double> breaks(static_cast<std::size_t>(initial_panels) + 1);
    for (int i = 0; i <= initial_panels; ++i)
        breaks[static_cast<std::size_t>(i)] = a + (b - a) * i / initial_panels;
    breaks.back() = b;
    return integrate_partitioned<T>(std::forward<F>(f), breaks, tol, max_evals);
}

// Breakpoints on [a, b] such that the phase advances by at most `step`
// radians per panel, using the local phase derivative.
template <class DPhase>
std::vector<double> phase_panels(DPhase&& dphase, double a, double b, double step,
                                 std::size_t max_panels)
{
    std::vector<double> breaks{a};
    const double max_width = (b - a) / 8.0;
    double u = a;
    while (u < b) {
        const double s0 = std::abs(dphase(u));
        double w = std::min(b - u, max_width);
        if (s0 > 0.0)
            w = std::min(w, step / s0);
        for (int guard = 0; guard < 60; ++guard) {
            const double s1 = std::abs(dphase(std::min(u + w, b)));
            if (s1 * w <= 2.0 * step)
                break;
            w *= 0.5;
        }
        u = (u + w >= b || w <= 0.0) ? b : u + w;
        breaks.push_back(u);
        if (breaks.size() > max_panels)
            throw BudgetError("phase_panels: more than " + std::to_string(max_panels)
                                  + " oscillation panels required",
                              std::numeric_limits<double>::infinity());
    }
    return breaks;
}

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    if (n < 1)
        throw InputError("gauss_legendre: need at least one node");
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        w[0] = 2.0;
        return;
    }
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        x[lo] = -z;
        x[hi] = z;
        w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

struct AngularResult {
    cplx value{};
    double abs_error = 0.0; // last refinement change
    std::size_t nodes = 0;
};

inline constexpr std::size_t angular_node_budget = std::size_t{1} << 20;

// Integral over S^{n-1} with euclidean surface measure (counting measure on
// {+1,-1} for n = 1). Node counts double until successive values differ by
// less than tol.
template <class F>
AngularResult integrate_sphere(int n, F&& f, double tol)
{
    AngularResult out;
    if (n == 1) {
        const double plus[1] = {1.0};
        const double minus[1] = {-1.0};
        out.value = f(std::span<const double>(plus, 1)) + f(std::span<const double>(minus, 1));
        out.nodes = 2;
        return out;
    }
    if (n == 2) {
        std::size_t m = 8;
        cplx sum{};
        for (std::size_t i = 0; i < m; ++i) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
            const double w[2] = {std::cos(th), std::sin(th)};
            sum += f(std::span<const double>(w, 2));
        }
        cplx prev = sum * (2.0 * std::numbers::pi / static_cast<double>(m));
        while (true) {
            if (2 * m > angular_node_budget)
                throw BudgetError("integrate_sphere: no convergence within 2^20 nodes",
                                  std::abs(prev));
            for (std::size_t i = 0; i < m; ++i) {
                const double th = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5)
                                  / static_cast<double>(m);
                const double w[2] = {std::cos(th), std::sin(th)};
                sum += f(std::span<const double>(w, 2));
            }
            m *= 2;
            const cplx cur = sum * (2.0 * std::numbers::pi / static_cast<double>(m));
            const double change = std::abs(cur - prev);
            prev = cur;
            if (change < tol) {
                out.value = cur;
                out.abs_error = change;
                out.nodes = m;
                return out;
            }
        }
    }
    if (n == 3) {
        auto rule = [&](int p) {
            std::vector<double> x, w;
            gauss_legendre(p, x, w);
            const int m = 2 * p;
            cplx acc{};
            for (int i = 0; i < p; ++i) {
                const double s = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
                cplx ring{};
                for (int k = 0; k < m; ++k) {
                    const double ph = 2.0 * std::numbers::pi * k / m;
                    const double om[3] = {s * std::cos(ph), s * std::sin(ph), x[i]};
                    ring += f(std::span<const double>(om, 3));
                }
                acc += w[i] * ring * (2.0 * std::numbers::pi / m);
            }
            return acc;
        };
        int p = 4;
        cplx prev = rule(p);
        while (true) {
            p *= 2;
            const auto nodes = static_cast<std::size_t>(2 * p * p);
            if (nodes > angular_node_budget)
                throw BudgetError("integrate_sphere: no convergence within 2^20 nodes",
                                  std::abs(prev));
            const cplx cur = rule(p);
            const double change = std::abs(cur - prev);
            prev = cur;
            if (change < tol) {
                out.value = cur;
                out.abs_error = change;
                out.nodes = nodes;
                return out;
            }
        }
    }
    throw InputError("integrate_sphere: dimension must be 1, 2 or 3");
}

} // namespace divcert::quad

#endif
